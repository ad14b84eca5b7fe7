#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "impactlab/callgraph.hpp"
#include "impactlab/checker.hpp"
#include "impactlab/interpreter.hpp"
#include "json.hpp"

namespace impactlab {

enum class MutationOperator { ABS, AOR, LCR, ROR, UOI };

inline const char* operator_name(MutationOperator op) {
    switch (op) {
        case MutationOperator::ABS: return "ABS";
        case MutationOperator::AOR: return "AOR";
        case MutationOperator::LCR: return "LCR";
        case MutationOperator::ROR: return "ROR";
        case MutationOperator::UOI: return "UOI";
    }
    return "?";
}

inline std::optional<MutationOperator> operator_from_string(const std::string& s) {
    if (s == "ABS" || s == "abs") return MutationOperator::ABS;
    if (s == "AOR" || s == "aor") return MutationOperator::AOR;
    if (s == "LCR" || s == "lcr") return MutationOperator::LCR;
    if (s == "ROR" || s == "ror") return MutationOperator::ROR;
    if (s == "UOI" || s == "uoi") return MutationOperator::UOI;
    return std::nullopt;
}

inline const std::vector<MutationOperator>& all_operators() {
    static const std::vector<MutationOperator> ops = {
        MutationOperator::ABS, MutationOperator::AOR, MutationOperator::LCR,
        MutationOperator::ROR, MutationOperator::UOI};
    return ops;
}

enum class SiteKind { NumericExpr, ArithBinary, LogicalBinary, RelationalBinary, BoolExpr };

struct MutationSite {
    NodePath path;
    SiteKind kind;
    MethodRef enclosing;
};

enum class ReplacementKind {
    OperatorSwap,
    LeftOperand,
    RightOperand,
    ConstTrue,
    ConstFalse,
    AbsWrap,
    Negate,
    Increment,
    Decrement,
    Complement,
};

struct Replacement {
    ReplacementKind kind;
    BinaryOp op = BinaryOp::Add;  // meaningful for OperatorSwap only

    std::string render() const {
        switch (kind) {
            case ReplacementKind::OperatorSwap: return binary_op_symbol(op);
            case ReplacementKind::LeftOperand: return "left-operand";
            case ReplacementKind::RightOperand: return "right-operand";
            case ReplacementKind::ConstTrue: return "const-true";
            case ReplacementKind::ConstFalse: return "const-false";
            case ReplacementKind::AbsWrap: return "abs-wrap";
            case ReplacementKind::Negate: return "negate";
            case ReplacementKind::Increment: return "increment";
            case ReplacementKind::Decrement: return "decrement";
            case ReplacementKind::Complement: return "complement";
        }
        return "?";
    }
};

struct Mutant {
    std::string id;  // "<OP>-<site hash>-<k>", deterministic
    MutationOperator op;
    MutationSite site;
    Replacement replacement;
};

namespace detail {

inline std::uint64_t fnv1a64_path(const NodePath& p) {
    std::uint64_t h = 1469598103934665603ull;
    for (std::uint32_t v : p) {
        for (int b = 0; b < 4; ++b) {
            h ^= (v >> (8 * b)) & 0xffu;
            h *= 1099511628211ull;
        }
    }
    return h;
}

inline std::string site_hash(const NodePath& p) {
    static const char* hex = "0123456789abcdef";
    std::uint64_t h = fnv1a64_path(p);
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[static_cast<std::size_t>(i)] = hex[h & 0xf];
        h >>= 4;
    }
    return s;
}

}  // namespace detail

/// Enumerates the sites an operator applies to, in document order. Sites in
/// test methods are excluded: mutating the oracle would corrupt the ground
/// truth the whole evaluation rests on.
inline std::vector<MutationSite> sites(const CheckedProgram& checked, MutationOperator op) {
    std::vector<MutationSite> out;
    for (const auto& mref : checked.methods_in_order) {
        const MethodInfo& mi = *checked.method_info(mref);
        if (!mi.decl || mi.is_test) continue;
        NodePath base = mi.path;
        base.push_back(0);  // body block
        walk_with_paths(static_cast<const Node&>(*mi.decl->body), base,
                        [&](const Node& n, const NodePath& path) {
            auto typed = checked.static_types.find(path);
            switch (op) {
                case MutationOperator::ABS: {
                    if (typed == checked.static_types.end()) return;
                    if (typed->second != Type::int_t()) return;
                    if (n.kind == NodeKind::IntLit || n.kind == NodeKind::NameRead ||
                        n.kind == NodeKind::FieldRead || n.kind == NodeKind::CallExpr ||
                        n.kind == NodeKind::AbsCall || n.kind == NodeKind::ReflectCall)
                        out.push_back({path, SiteKind::NumericExpr, mref});
                    return;
                }
                case MutationOperator::AOR:
                    if (n.kind == NodeKind::BinaryExpr &&
                        is_arith_op(static_cast<const BinaryExpr&>(n).op))
                        out.push_back({path, SiteKind::ArithBinary, mref});
                    return;
                case MutationOperator::LCR:
                    if (n.kind == NodeKind::BinaryExpr &&
                        is_logical_op(static_cast<const BinaryExpr&>(n).op))
                        out.push_back({path, SiteKind::LogicalBinary, mref});
                    return;
                case MutationOperator::ROR:
                    if (n.kind == NodeKind::BinaryExpr &&
                        is_relational_op(static_cast<const BinaryExpr&>(n).op))
                        out.push_back({path, SiteKind::RelationalBinary, mref});
                    return;
                case MutationOperator::UOI: {
                    if (typed == checked.static_types.end()) return;
                    if (typed->second == Type::int_t())
                        out.push_back({path, SiteKind::NumericExpr, mref});
                    else if (typed->second == Type::bool_t())
                        out.push_back({path, SiteKind::BoolExpr, mref});
                    return;
                }
            }
        });
    }
    return out;
}

/// All mutants of one site, in a fixed order so ids are stable:
/// AOR 6 (4 operator swaps + L + R), LCR 5 (swap + T + F + L + R),
/// ROR 7 (5 swaps + T + F), ABS 1, UOI 3 on int / 1 on bool.
inline std::vector<Mutant> mutants_at(const CheckedProgram& checked, const MutationSite& site,
                                      MutationOperator op) {
    std::vector<Replacement> repls;
    const Node* node = node_at(checked.program, site.path);
    switch (op) {
        case MutationOperator::ABS:
            repls.push_back({ReplacementKind::AbsWrap});
            break;
        case MutationOperator::AOR: {
            BinaryOp cur = static_cast<const BinaryExpr*>(node)->op;
            for (BinaryOp o : {BinaryOp::Add, BinaryOp::Sub, BinaryOp::Mul, BinaryOp::Div,
                               BinaryOp::Mod})
                if (o != cur) repls.push_back({ReplacementKind::OperatorSwap, o});
            repls.push_back({ReplacementKind::LeftOperand});
            repls.push_back({ReplacementKind::RightOperand});
            break;
        }
        case MutationOperator::LCR: {
            BinaryOp cur = static_cast<const BinaryExpr*>(node)->op;
            repls.push_back({ReplacementKind::OperatorSwap,
                             cur == BinaryOp::And ? BinaryOp::Or : BinaryOp::And});
            repls.push_back({ReplacementKind::ConstTrue});
            repls.push_back({ReplacementKind::ConstFalse});
            repls.push_back({ReplacementKind::LeftOperand});
            repls.push_back({ReplacementKind::RightOperand});
            break;
        }
        case MutationOperator::ROR: {
            BinaryOp cur = static_cast<const BinaryExpr*>(node)->op;
            for (BinaryOp o : {BinaryOp::Lt, BinaryOp::Le, BinaryOp::Gt, BinaryOp::Ge,
                               BinaryOp::Eq, BinaryOp::Ne})
                if (o != cur) repls.push_back({ReplacementKind::OperatorSwap, o});
            repls.push_back({ReplacementKind::ConstTrue});
            repls.push_back({ReplacementKind::ConstFalse});
            break;
        }
        case MutationOperator::UOI:
            if (site.kind == SiteKind::BoolExpr) {
                repls.push_back({ReplacementKind::Complement});
            } else {
                repls.push_back({ReplacementKind::Negate});
                repls.push_back({ReplacementKind::Increment});
                repls.push_back({ReplacementKind::Decrement});
            }
            break;
    }
    std::vector<Mutant> out;
    out.reserve(repls.size());
    std::string hash = detail::site_hash(site.path);
    for (std::size_t k = 0; k < repls.size(); ++k) {
        Mutant m;
        m.id = std::string(operator_name(op)) + "-" + hash + "-" + std::to_string(k);
        m.op = op;
        m.site = site;
        m.replacement = repls[k];
        out.push_back(std::move(m));
    }
    return out;
}

/// Applies one mutant to a program, producing a new program that differs at
/// exactly the mutated subtree. Fails on stale paths: the path must address
/// an expression slot, and operator/operand replacements require the binary
/// node they were generated from.
inline Result<Program> apply(const Program& program, const Mutant& mutant) {
    if (mutant.site.path.empty()) return Result<Program>::fail("empty mutation path");
    Program copy = program.clone();
    NodePath parent_path(mutant.site.path.begin(), mutant.site.path.end() - 1);
    Node* parent = node_at(copy, parent_path);
    if (!parent)
        return Result<Program>::fail("stale mutation path " + render_path(mutant.site.path));
    std::unique_ptr<Expr>* slot = parent->expr_slot(mutant.site.path.back());
    if (!slot || !*slot)
        return Result<Program>::fail("path does not address a mutable expression: " +
                                     render_path(mutant.site.path));
    Expr* current = slot->get();
    Span sp = current->span;
    switch (mutant.replacement.kind) {
        case ReplacementKind::OperatorSwap: {
            if (current->kind != NodeKind::BinaryExpr)
                return Result<Program>::fail("stale path: operator swap on non-binary node");
            static_cast<BinaryExpr*>(current)->op = mutant.replacement.op;
            break;
        }
        case ReplacementKind::LeftOperand:
        case ReplacementKind::RightOperand: {
            if (current->kind != NodeKind::BinaryExpr)
                return Result<Program>::fail("stale path: operand replacement on non-binary node");
            auto* bin = static_cast<BinaryExpr*>(current);
            std::unique_ptr<Expr> taken =
                mutant.replacement.kind == ReplacementKind::LeftOperand ? std::move(bin->lhs)
                                                                        : std::move(bin->rhs);
            *slot = std::move(taken);
            break;
        }
        case ReplacementKind::ConstTrue:
            *slot = std::make_unique<BoolLit>(true, sp);
            break;
        case ReplacementKind::ConstFalse:
            *slot = std::make_unique<BoolLit>(false, sp);
            break;
        case ReplacementKind::AbsWrap: {
            std::unique_ptr<Expr> taken = std::move(*slot);
            *slot = std::make_unique<AbsCall>(std::move(taken), sp);
            break;
        }
        case ReplacementKind::Negate: {
            std::unique_ptr<Expr> taken = std::move(*slot);
            *slot = std::make_unique<UnaryExpr>(UnaryOp::Neg, std::move(taken), sp);
            break;
        }
        case ReplacementKind::Increment: {
            std::unique_ptr<Expr> taken = std::move(*slot);
            *slot = std::make_unique<BinaryExpr>(BinaryOp::Add, std::move(taken),
                                                 std::make_unique<IntLit>(1, sp), sp);
            break;
        }
        case ReplacementKind::Decrement: {
            std::unique_ptr<Expr> taken = std::move(*slot);
            *slot = std::make_unique<BinaryExpr>(BinaryOp::Sub, std::move(taken),
                                                 std::make_unique<IntLit>(1, sp), sp);
            break;
        }
        case ReplacementKind::Complement: {
            std::unique_ptr<Expr> taken = std::move(*slot);
            *slot = std::make_unique<UnaryExpr>(UnaryOp::Not, std::move(taken), sp);
            break;
        }
    }
    return Result<Program>::ok(std::move(copy));
}

enum class Viability { NonCompiling, Alive, Killed };

inline const char* viability_name(Viability v) {
    switch (v) {
        case Viability::NonCompiling: return "noncompiling";
        case Viability::Alive: return "alive";
        case Viability::Killed: return "killed";
    }
    return "?";
}

/// The compiles-and-is-killed gate: applies the mutant, re-checks it, and
/// compares the mutated suite against the baseline. A mutant is killed when
/// some test fails that did not fail on the original program.
inline Result<Viability> viability(const CheckedProgram& original, const Mutant& mutant,
                                   std::uint64_t step_budget,
                                   const SuiteResult* baseline = nullptr) {
    Result<Program> applied = apply(original.program, mutant);
    if (!applied) return Result<Viability>::fail(applied.error());
    CheckResult cr = check(applied.take());
    if (!cr.ok()) return Result<Viability>::ok(Viability::NonCompiling);
    SuiteResult base_local;
    if (!baseline) {
        base_local = run_suite(original, step_budget);
        baseline = &base_local;
    }
    SuiteResult mutated = run_suite(*cr.checked, step_budget);
    for (const auto& [test, outcome] : mutated.outcomes) {
        auto it = baseline->outcomes.find(test);
        bool base_failing = it != baseline->outcomes.end() && it->second.failing();
        if (outcome.failing() && !base_failing) return Result<Viability>::ok(Viability::Killed);
    }
    return Result<Viability>::ok(Viability::Alive);
}

/// Deterministic uniform sampling without replacement, preserving document
/// order. Identity when the cap is not exceeded.
inline std::vector<Mutant> sample(std::vector<Mutant> mutants, std::size_t cap,
                                  std::uint64_t seed) {
    if (mutants.size() <= cap) return mutants;
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> idx(mutants.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    for (std::size_t i = 0; i < cap; ++i) {
        // raw modulo keeps selection platform-independent; the bias at these
        // magnitudes is immaterial for sampling mutants
        std::size_t j = i + static_cast<std::size_t>(rng() % (idx.size() - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(cap);
    std::sort(idx.begin(), idx.end());
    std::vector<Mutant> out;
    out.reserve(cap);
    for (std::size_t i : idx) out.push_back(std::move(mutants[i]));
    return out;
}

struct ManifestEntry {
    Mutant mutant;
    Viability viability;
};

inline std::string render_manifest(const std::string& project, MutationOperator op,
                                   std::uint64_t seed, const std::vector<ManifestEntry>& entries) {
    nlohmann::ordered_json j;
    j["project"] = project;
    j["operator"] = operator_name(op);
    j["seed"] = seed;
    j["mutants"] = nlohmann::ordered_json::array();
    for (const auto& e : entries) {
        nlohmann::ordered_json m;
        m["id"] = e.mutant.id;
        m["path"] = e.mutant.site.path;
        m["replacement"] = e.mutant.replacement.render();
        m["enclosing"] = e.mutant.site.enclosing.render();
        m["viability"] = viability_name(e.viability);
        j["mutants"].push_back(std::move(m));
    }
    return j.dump();
}

}  // namespace impactlab
