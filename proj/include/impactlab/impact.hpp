#pragma once

#include <deque>
#include <set>
#include <string>
#include <vector>

#include "impactlab/callgraph.hpp"
#include "impactlab/interpreter.hpp"
#include "json.hpp"

namespace impactlab {

struct Prediction {
    std::set<MethodRef> cis;
    bool unbounded = false;
};

/// Candidate impact set by reverse reachability: the tests whose nodes reach
/// the mutated method's node along forward edges. When the method has no
/// node in this variant, or its node is isolated, the prediction is
/// unbounded: the graph lacks the information to predict anything.
inline Result<Prediction> predict(const CallGraph& graph, const MethodRef& mutated,
                                  const std::set<MethodRef>& tests) {
    std::string id = mutated.render();
    auto it = graph.index.find(id);
    if (it == graph.index.end()) {
        if (graph.collapsed_ids.count(id)) return Result<Prediction>::ok({{}, true});
        return Result<Prediction>::fail("method not declared in graph: " + id);
    }
    std::size_t start = it->second;
    if (graph.out_adj[start].empty() && graph.in_adj[start].empty())
        return Result<Prediction>::ok({{}, true});

    std::vector<bool> visited(graph.nodes.size(), false);
    std::deque<std::size_t> queue;
    visited[start] = true;
    queue.push_back(start);
    while (!queue.empty()) {
        std::size_t n = queue.front();
        queue.pop_front();
        for (std::size_t m : graph.in_adj[n]) {
            if (!visited[m]) {
                visited[m] = true;
                queue.push_back(m);
            }
        }
    }
    Prediction p;
    for (const auto& t : tests) {
        auto ti = graph.index.find(t.render());
        if (ti != graph.index.end() && visited[ti->second]) p.cis.insert(t);
    }
    return Result<Prediction>::ok(std::move(p));
}

/// Actual impact set: tests failing under the mutant that did not already
/// fail on the baseline.
inline Result<std::set<MethodRef>> actual(const SuiteResult& suite_mutant,
                                          const SuiteResult& suite_baseline) {
    if (suite_mutant.outcomes.size() != suite_baseline.outcomes.size())
        return Result<std::set<MethodRef>>::fail("suite domains differ");
    std::set<MethodRef> ais;
    for (const auto& [test, outcome] : suite_mutant.outcomes) {
        auto it = suite_baseline.outcomes.find(test);
        if (it == suite_baseline.outcomes.end())
            return Result<std::set<MethodRef>>::fail("suite domains differ");
        if (outcome.failing() && !it->second.failing()) ais.insert(test);
    }
    return Result<std::set<MethodRef>>::ok(std::move(ais));
}

/// FPIS = CIS - (AIS ∩ CIS), FNIS = AIS - (AIS ∩ CIS).
inline std::pair<std::set<MethodRef>, std::set<MethodRef>> bohner(const std::set<MethodRef>& ais,
                                                                  const std::set<MethodRef>& cis) {
    std::set<MethodRef> fpis;
    std::set<MethodRef> fnis;
    for (const auto& t : cis)
        if (!ais.count(t)) fpis.insert(t);
    for (const auto& t : ais)
        if (!cis.count(t)) fnis.insert(t);
    return {std::move(fpis), std::move(fnis)};
}

struct ImpactRecord {
    std::string mutant_id;
    MethodRef mutated;
    std::set<MethodRef> ais;
    std::set<MethodRef> cis;
    std::set<MethodRef> fpis;
    std::set<MethodRef> fnis;
    bool unbounded = false;
};

inline ImpactRecord make_record(std::string mutant_id, MethodRef mutated,
                                std::set<MethodRef> ais, const Prediction& prediction) {
    ImpactRecord r;
    r.mutant_id = std::move(mutant_id);
    r.mutated = std::move(mutated);
    r.ais = std::move(ais);
    r.cis = prediction.cis;
    r.unbounded = prediction.unbounded;
    auto [fpis, fnis] = bohner(r.ais, r.cis);
    r.fpis = std::move(fpis);
    r.fnis = std::move(fnis);
    return r;
}

enum class MutantCategory { S, O, U, D };

inline const char* category_name(MutantCategory c) {
    switch (c) {
        case MutantCategory::S: return "S";
        case MutantCategory::O: return "O";
        case MutantCategory::U: return "U";
        case MutantCategory::D: return "D";
    }
    return "?";
}

/// Same / Overestimate / Underestimate / Different partition of a killed
/// mutant. Unbounded mutants land in U: with an empty CIS their FNIS is the
/// whole AIS.
inline Result<MutantCategory> classify(const ImpactRecord& record) {
    if (record.ais.empty())
        return Result<MutantCategory>::fail("record is not for a killed mutant (empty AIS)");
    if (record.unbounded) return Result<MutantCategory>::ok(MutantCategory::U);
    bool fp = !record.fpis.empty();
    bool fn = !record.fnis.empty();
    if (!fp && !fn) return Result<MutantCategory>::ok(MutantCategory::S);
    if (fp && !fn) return Result<MutantCategory>::ok(MutantCategory::O);
    if (!fp && fn) return Result<MutantCategory>::ok(MutantCategory::U);
    return Result<MutantCategory>::ok(MutantCategory::D);
}

struct MutantMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f_score = 0.0;
};

/// Precision |AIS∩CIS|/|CIS|, recall |AIS∩CIS|/|AIS|, and their harmonic
/// mean, computed as 2·|AIS∩CIS|/(|AIS|+|CIS|) so the result is the exact
/// rational value. Unbounded mutants and empty predictions score zero.
inline MutantMetrics metrics(const ImpactRecord& record) {
    if (record.unbounded || record.cis.empty() || record.ais.empty()) return {0.0, 0.0, 0.0};
    std::size_t tp = 0;
    for (const auto& t : record.cis)
        if (record.ais.count(t)) ++tp;
    MutantMetrics m;
    m.precision = static_cast<double>(tp) / static_cast<double>(record.cis.size());
    m.recall = static_cast<double>(tp) / static_cast<double>(record.ais.size());
    m.f_score = tp == 0 ? 0.0
                        : 2.0 * static_cast<double>(tp) /
                              static_cast<double>(record.ais.size() + record.cis.size());
    return m;
}

namespace detail {
inline nlohmann::ordered_json refs_to_sorted_ids(const std::set<MethodRef>& refs) {
    std::set<std::string> ids;
    for (const auto& r : refs) ids.insert(r.render());
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& s : ids) arr.push_back(s);
    return arr;
}
}  // namespace detail

/// One ledger line (JSON-lines format).
inline std::string render_record_line(const ImpactRecord& record) {
    nlohmann::ordered_json j;
    j["mutant"] = record.mutant_id;
    j["method"] = record.mutated.render();
    j["ais"] = detail::refs_to_sorted_ids(record.ais);
    j["cis"] = detail::refs_to_sorted_ids(record.cis);
    j["fpis"] = detail::refs_to_sorted_ids(record.fpis);
    j["fnis"] = detail::refs_to_sorted_ids(record.fnis);
    j["unbounded"] = record.unbounded;
    Result<MutantCategory> cat = classify(record);
    j["category"] = cat ? category_name(cat.value()) : "?";
    MutantMetrics m = metrics(record);
    j["p"] = m.precision;
    j["r"] = m.recall;
    j["f"] = m.f_score;
    return j.dump();
}

/// Parsed form of a ledger line; set members stay as rendered ids.
struct LedgerLine {
    std::string mutant;
    std::string method;
    std::vector<std::string> ais, cis, fpis, fnis;
    bool unbounded = false;
    std::string category;
    double p = 0, r = 0, f = 0;
};

inline Result<LedgerLine> parse_record_line(const std::string& line) {
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) return Result<LedgerLine>::fail("invalid ledger line");
    LedgerLine l;
    l.mutant = j.value("mutant", "");
    l.method = j.value("method", "");
    for (const auto& s : j.value("ais", nlohmann::json::array())) l.ais.push_back(s);
    for (const auto& s : j.value("cis", nlohmann::json::array())) l.cis.push_back(s);
    for (const auto& s : j.value("fpis", nlohmann::json::array())) l.fpis.push_back(s);
    for (const auto& s : j.value("fnis", nlohmann::json::array())) l.fnis.push_back(s);
    l.unbounded = j.value("unbounded", false);
    l.category = j.value("category", "");
    l.p = j.value("p", 0.0);
    l.r = j.value("r", 0.0);
    l.f = j.value("f", 0.0);
    return Result<LedgerLine>::ok(std::move(l));
}

}  // namespace impactlab
