#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "impactlab/checker.hpp"
#include "json.hpp"

namespace impactlab {

enum class GraphVariant { S, B, H, F };

inline const char* variant_name(GraphVariant v) {
    switch (v) {
        case GraphVariant::S: return "S";
        case GraphVariant::B: return "B";
        case GraphVariant::H: return "H";
        case GraphVariant::F: return "F";
    }
    return "?";
}

inline std::optional<GraphVariant> variant_from_string(std::string s) {
    if (s.size() != 1) return std::nullopt;
    switch (s[0]) {
        case 's': case 'S': return GraphVariant::S;
        case 'b': case 'B': return GraphVariant::B;
        case 'h': case 'H': return GraphVariant::H;
        case 'f': case 'F': return GraphVariant::F;
        default: return std::nullopt;
    }
}

enum class GraphNodeKind { Method, Field };
enum class EdgeKind { Call, Override, FieldRead, FieldWrite };

inline const char* edge_kind_name(EdgeKind k) {
    switch (k) {
        case EdgeKind::Call: return "call";
        case EdgeKind::Override: return "override";
        case EdgeKind::FieldRead: return "field_read";
        case EdgeKind::FieldWrite: return "field_write";
    }
    return "?";
}

/// Direction of field edges. Formal: a reader points at the field and the
/// field points at its writers, so reverse traversal from a writer reaches
/// the readers. Figure flips both for comparison runs.
enum class FieldOrientation { Formal, Figure };

struct GraphNode {
    GraphNodeKind kind;
    std::string id;
    friend auto operator<=>(const GraphNode&, const GraphNode&) = default;
};

struct GraphEdge {
    std::string from;
    std::string to;
    EdgeKind kind;
    friend auto operator<=>(const GraphEdge&, const GraphEdge&) = default;
};

struct CallGraph {
    GraphVariant variant = GraphVariant::B;
    std::vector<GraphNode> nodes;  // sorted by id
    std::vector<GraphEdge> edges;  // sorted, deduplicated
    std::set<std::string> test_ids;
    std::set<std::string> collapsed_ids;  // S only: methods lifted into an ancestor

    std::unordered_map<std::string, std::size_t> index;
    std::vector<std::vector<std::size_t>> out_adj;
    std::vector<std::vector<std::size_t>> in_adj;

    /// Sorts, deduplicates, and builds the adjacency indexes.
    void finalize() {
        std::sort(nodes.begin(), nodes.end(),
                  [](const GraphNode& a, const GraphNode& b) { return a.id < b.id; });
        nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
        std::sort(edges.begin(), edges.end());
        edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
        index.clear();
        for (std::size_t i = 0; i < nodes.size(); ++i) index[nodes[i].id] = i;
        out_adj.assign(nodes.size(), {});
        in_adj.assign(nodes.size(), {});
        for (const auto& e : edges) {
            auto f = index.find(e.from);
            auto t = index.find(e.to);
            if (f == index.end() || t == index.end()) continue;
            out_adj[f->second].push_back(t->second);
            in_adj[t->second].push_back(f->second);
        }
    }

    bool has_node(const std::string& id) const { return index.count(id) != 0; }

    std::size_t degree(const std::string& id) const {
        auto it = index.find(id);
        if (it == index.end()) return 0;
        return out_adj[it->second].size() + in_adj[it->second].size();
    }
};

namespace detail {

/// Topmost ancestor declaration of a method's signature, following override
/// links upward. A class parent wins over interface parents; among several
/// interface parents the lexicographically smallest id is taken so the
/// lifting is deterministic.
inline MethodRef lift_to_topmost(const CheckedProgram& cp, MethodRef m) {
    while (true) {
        auto it = cp.overrides.find(m);
        if (it == cp.overrides.end() || it->second.empty()) return m;
        const std::vector<MethodRef>& parents = it->second;
        const MethodRef* chosen = nullptr;
        for (const auto& p : parents) {
            const TypeInfo* ti = cp.type_info(p.owner);
            if (ti && !ti->is_interface) {
                chosen = &p;
                break;
            }
        }
        if (!chosen) {
            chosen = &parents.front();
            for (const auto& p : parents)
                if (p.render() < chosen->render()) chosen = &p;
        }
        m = *chosen;
    }
}

}  // namespace detail

/// Builds one of the four call-graph variants from a checked program.
///
///   B  node per declared method; edge caller -> statically resolved callee.
///   S  declaration-site emulation: nodes and call targets are lifted to the
///      topmost ancestor declaration; pure overrides lose their node.
///   H  B plus an Override edge from each overridden/implemented declaration
///      to the overriding method.
///   F  H plus one node per field, a read edge per reading method and a
///      write edge per writing method.
inline CallGraph build(const CheckedProgram& checked, GraphVariant variant,
                       FieldOrientation orientation = FieldOrientation::Formal) {
    CallGraph g;
    g.variant = variant;
    const bool lifted = variant == GraphVariant::S;

    auto repr = [&](const MethodRef& m) {
        return lifted ? detail::lift_to_topmost(checked, m) : m;
    };

    for (const auto& m : checked.methods_in_order) {
        MethodRef r = repr(m);
        if (lifted && !(r == m)) {
            g.collapsed_ids.insert(m.render());
            continue;
        }
        g.nodes.push_back({GraphNodeKind::Method, m.render()});
    }
    for (const auto& t : checked.tests) {
        std::string id = t.render();
        if (!g.collapsed_ids.count(id)) g.test_ids.insert(id);
    }

    // call edges; call sites in field initializers have no enclosing method
    // and contribute nothing
    for (const auto& [path, callee] : checked.call_targets) {
        Result<MethodRef> caller = method_at(checked, path);
        if (!caller) continue;
        g.edges.push_back({repr(caller.value()).render(), repr(callee).render(), EdgeKind::Call});
    }

    if (variant == GraphVariant::H || variant == GraphVariant::F) {
        for (const auto& [child, parents] : checked.overrides)
            for (const auto& parent : parents)
                g.edges.push_back({parent.render(), child.render(), EdgeKind::Override});
    }

    if (variant == GraphVariant::F) {
        for (const auto& [ref, info] : checked.fields)
            g.nodes.push_back({GraphNodeKind::Field, ref.render()});
        const bool formal = orientation == FieldOrientation::Formal;
        for (const auto& [path, field] : checked.read_targets) {
            Result<MethodRef> reader = method_at(checked, path);
            if (!reader) continue;
            std::string m = reader.value().render();
            std::string f = field.render();
            if (formal)
                g.edges.push_back({m, f, EdgeKind::FieldRead});
            else
                g.edges.push_back({f, m, EdgeKind::FieldRead});
        }
        for (const auto& [path, field] : checked.write_targets) {
            Result<MethodRef> writer = method_at(checked, path);
            if (!writer) continue;
            std::string m = writer.value().render();
            std::string f = field.render();
            if (formal)
                g.edges.push_back({f, m, EdgeKind::FieldWrite});
            else
                g.edges.push_back({m, f, EdgeKind::FieldWrite});
        }
    }

    g.finalize();
    return g;
}

/// The node of a declared method, or Absent (nullopt) when the variant does
/// not represent it — the unbounded-mutant path for variant S.
inline std::optional<GraphNode> node_for(const CallGraph& graph, const MethodRef& method) {
    auto it = graph.index.find(method.render());
    if (it == graph.index.end()) return std::nullopt;
    return graph.nodes[it->second];
}

/// True iff the node has no incident edges of any kind.
inline bool is_isolated(const CallGraph& graph, const GraphNode& node) {
    return graph.degree(node.id) == 0;
}

inline std::string export_json(const CallGraph& g) {
    nlohmann::ordered_json j;
    j["variant"] = variant_name(g.variant);
    j["nodes"] = nlohmann::ordered_json::array();
    for (const auto& n : g.nodes) {
        j["nodes"].push_back({{"id", n.id},
                              {"kind", n.kind == GraphNodeKind::Method ? "method" : "field"}});
    }
    j["edges"] = nlohmann::ordered_json::array();
    for (const auto& e : g.edges) {
        j["edges"].push_back({{"from", e.from}, {"to", e.to}, {"kind", edge_kind_name(e.kind)}});
    }
    return j.dump();
}

inline Result<CallGraph> import_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded()) return Result<CallGraph>::fail("invalid graph JSON");
    CallGraph g;
    auto v = variant_from_string(j.value("variant", ""));
    if (!v) return Result<CallGraph>::fail("invalid graph variant");
    g.variant = *v;
    for (const auto& n : j.value("nodes", nlohmann::json::array())) {
        std::string kind = n.value("kind", "");
        if (kind != "method" && kind != "field")
            return Result<CallGraph>::fail("invalid node kind '" + kind + "'");
        g.nodes.push_back(
            {kind == "method" ? GraphNodeKind::Method : GraphNodeKind::Field, n.value("id", "")});
    }
    for (const auto& e : j.value("edges", nlohmann::json::array())) {
        std::string kind = e.value("kind", "");
        EdgeKind k;
        if (kind == "call")
            k = EdgeKind::Call;
        else if (kind == "override")
            k = EdgeKind::Override;
        else if (kind == "field_read")
            k = EdgeKind::FieldRead;
        else if (kind == "field_write")
            k = EdgeKind::FieldWrite;
        else
            return Result<CallGraph>::fail("invalid edge kind '" + kind + "'");
        g.edges.push_back({e.value("from", ""), e.value("to", ""), k});
    }
    g.finalize();
    return Result<CallGraph>::ok(std::move(g));
}

/// Graphviz rendering: methods as ellipses, tests as double ellipses, fields
/// as boxes; the edge kind rides in the label attribute.
inline std::string export_dot(const CallGraph& g) {
    std::string out = "digraph callgraph {\n";
    out += "    rankdir=LR;\n";
    for (const auto& n : g.nodes) {
        out += "    \"" + n.id + "\" [";
        if (n.kind == GraphNodeKind::Field) {
            out += "shape=box";
        } else if (g.test_ids.count(n.id)) {
            out += "shape=ellipse, peripheries=2";
        } else {
            out += "shape=ellipse";
        }
        out += "];\n";
    }
    for (const auto& e : g.edges) {
        out += "    \"" + e.from + "\" -> \"" + e.to + "\" [label=\"" +
               edge_kind_name(e.kind) + "\"];\n";
    }
    out += "}\n";
    return out;
}

}  // namespace impactlab
