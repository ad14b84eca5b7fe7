#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "impactlab/impact.hpp"
#include "impactlab/mutation.hpp"
#include "impactlab/parser.hpp"

namespace impactlab {

struct RunConfig {
    std::filesystem::path project_dir;
    GraphVariant variant = GraphVariant::B;
    MutationOperator op = MutationOperator::AOR;
    std::size_t cap = 3000;
    std::uint64_t seed = 0;
    std::uint64_t step_budget = interp::Machine::kDefaultBudget;
    bool exclude_unbounded = false;
    FieldOrientation orientation = FieldOrientation::Formal;
    unsigned workers = 0;  // 0 = hardware concurrency
};

inline unsigned resolve_workers(unsigned requested) {
    if (requested > 0) return requested;
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

/// Reads the `*.moo` files of a project directory in path order.
inline Result<std::vector<SourceUnit>> load_units(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    if (!fs::is_directory(dir, ec))
        return Result<std::vector<SourceUnit>>::fail("not a directory: " + dir.string());
    std::vector<fs::path> paths;
    for (const auto& entry : fs::directory_iterator(dir, ec)) {
        if (entry.is_regular_file() && entry.path().extension() == ".moo")
            paths.push_back(entry.path());
    }
    if (paths.empty())
        return Result<std::vector<SourceUnit>>::fail("no .moo files in " + dir.string());
    std::sort(paths.begin(), paths.end());
    std::vector<SourceUnit> units;
    for (const auto& p : paths) {
        std::ifstream in(p, std::ios::binary);
        if (!in) return Result<std::vector<SourceUnit>>::fail("cannot read " + p.string());
        std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        units.push_back({p.filename().string(), std::move(text)});
    }
    return Result<std::vector<SourceUnit>>::ok(std::move(units));
}

struct ProjectContext {
    std::string name;
    CheckedProgram checked;
    SuiteResult baseline;
};

inline std::string render_diagnostics(const std::vector<Diagnostic>& diags) {
    std::string s;
    for (const auto& d : diags) {
        s += d.render();
        s += "\n";
    }
    return s;
}

/// Parses, checks, and runs the baseline suite of a project directory.
inline Result<ProjectContext> load_project(const std::filesystem::path& dir,
                                           std::uint64_t step_budget) {
    auto units = load_units(dir);
    if (!units) return Result<ProjectContext>::fail(units.error());
    ParseResult pr = parse(units.value());
    if (!pr.ok())
        return Result<ProjectContext>::fail("parse failed:\n" + render_diagnostics(pr.diagnostics));
    CheckResult cr = check(std::move(*pr.program));
    if (!cr.ok())
        return Result<ProjectContext>::fail("check failed:\n" + render_diagnostics(cr.diagnostics));
    ProjectContext ctx;
    std::filesystem::path named = dir;
    if (named.filename().empty()) named = named.parent_path();
    // corpus layout keeps sources under <project>/src; report the project
    if (named.filename() == "src") named = named.parent_path();
    ctx.name = named.filename().string();
    ctx.checked = std::move(*cr.checked);
    ctx.baseline = run_suite(ctx.checked, step_budget);
    return Result<ProjectContext>::ok(std::move(ctx));
}

struct LedgerEntry {
    ImpactRecord record;
    MutantCategory category;
    MutantMetrics scores;
};

struct EvaluationLedger {
    std::vector<LedgerEntry> entries;  // enumeration order; mutant ids unique

    const LedgerEntry* find(const std::string& mutant_id) const {
        for (const auto& e : entries)
            if (e.record.mutant_id == mutant_id) return &e;
        return nullptr;
    }
};

struct EvaluationReport {
    std::string project;
    std::string op;
    std::string variant;
    std::size_t k = 0;
    std::size_t n = 0;
    std::size_t s = 0;
    std::size_t o = 0;
    std::size_t u = 0;
    std::size_t d = 0;
    double p_same = 0.0;
    double p_complete = 0.0;
    double mean_p = 0.0;
    double mean_r = 0.0;
    double mean_f = 0.0;
};

/// Averages and partition counts over the killed mutants of a ledger.
inline Result<EvaluationReport> aggregate(const std::string& project, const std::string& op,
                                          const std::string& variant,
                                          const EvaluationLedger& ledger) {
    if (ledger.entries.empty())
        return Result<EvaluationReport>::fail("cannot aggregate an empty ledger");
    EvaluationReport r;
    r.project = project;
    r.op = op;
    r.variant = variant;
    r.k = ledger.entries.size();
    for (const auto& e : ledger.entries) {
        if (e.record.unbounded) ++r.n;
        switch (e.category) {
            case MutantCategory::S: ++r.s; break;
            case MutantCategory::O: ++r.o; break;
            case MutantCategory::U: ++r.u; break;
            case MutantCategory::D: ++r.d; break;
        }
        r.mean_p += e.scores.precision;
        r.mean_r += e.scores.recall;
        r.mean_f += e.scores.f_score;
    }
    double k = static_cast<double>(r.k);
    r.mean_p /= k;
    r.mean_r /= k;
    r.mean_f /= k;
    r.p_same = static_cast<double>(r.s) / k;
    r.p_complete = static_cast<double>(r.s + r.o) / k;
    return Result<EvaluationReport>::ok(std::move(r));
}

namespace detail {

struct MutantEval {
    Mutant mutant;
    Viability viability = Viability::Alive;
    std::set<MethodRef> ais;
};

/// Applies, re-checks, and test-runs each sampled mutant; parallel over
/// mutants, deterministic in output order.
inline Result<std::vector<MutantEval>> evaluate_mutants(const ProjectContext& ctx,
                                                        MutationOperator op, std::size_t cap,
                                                        std::uint64_t seed,
                                                        std::uint64_t step_budget,
                                                        unsigned workers) {
    std::vector<Mutant> all;
    for (const auto& site : sites(ctx.checked, op)) {
        for (auto& m : mutants_at(ctx.checked, site, op)) all.push_back(std::move(m));
    }
    std::vector<Mutant> chosen = sample(std::move(all), cap, seed);

    std::vector<MutantEval> evals(chosen.size());
    std::vector<std::string> errors(chosen.size());
    std::atomic<std::size_t> next{0};
    unsigned nworkers = std::min<unsigned>(resolve_workers(workers),
                                           std::max<std::size_t>(chosen.size(), 1));
    auto work = [&]() {
        while (true) {
            std::size_t i = next.fetch_add(1);
            if (i >= chosen.size()) break;
            MutantEval& ev = evals[i];
            ev.mutant = chosen[i];
            Result<Program> applied = apply(ctx.checked.program, ev.mutant);
            if (!applied) {
                errors[i] = applied.error();
                continue;
            }
            CheckResult cr = check(applied.take());
            if (!cr.ok()) {
                ev.viability = Viability::NonCompiling;
                continue;
            }
            SuiteResult suite = run_suite(*cr.checked, step_budget);
            auto ais = actual(suite, ctx.baseline);
            if (!ais) {
                errors[i] = ais.error();
                continue;
            }
            ev.ais = ais.take();
            ev.viability = ev.ais.empty() ? Viability::Alive : Viability::Killed;
        }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < nworkers; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    for (const auto& e : errors)
        if (!e.empty()) return Result<std::vector<MutantEval>>::fail(e);
    return Result<std::vector<MutantEval>>::ok(std::move(evals));
}

}  // namespace detail

struct RunOutput {
    EvaluationLedger ledger;
    EvaluationReport report;
    std::vector<ManifestEntry> manifest;
};

struct MultiRunOutput {
    // One output per (operator, variant) in the requested order.
    std::vector<RunOutput> runs;
};

/// Runs the whole pipeline for each requested operator and variant. The
/// expensive part — executing every mutant's suite — happens once per
/// operator; each variant then only pays for graph construction and
/// prediction, which is why the graph is built once per variant rather than
/// per mutant.
inline Result<MultiRunOutput> evaluate_many(const std::filesystem::path& project_dir,
                                            const std::vector<MutationOperator>& ops,
                                            const std::vector<GraphVariant>& variants,
                                            std::size_t cap, std::uint64_t seed,
                                            std::uint64_t step_budget, bool exclude_unbounded,
                                            FieldOrientation orientation, unsigned workers) {
    Result<ProjectContext> ctx = load_project(project_dir, step_budget);
    if (!ctx) return Result<MultiRunOutput>::fail(ctx.error());
    if (ctx.value().checked.tests.empty())
        return Result<MultiRunOutput>::fail("project has no tests: " + project_dir.string());
    for (const auto& [test, outcome] : ctx.value().baseline.outcomes) {
        if (outcome.failing())
            return Result<MultiRunOutput>::fail("baseline failure in " + test.render() + " (" +
                                                test_status_name(outcome.status) + ": " +
                                                outcome.detail + ")");
    }

    std::map<GraphVariant, CallGraph> graphs;
    for (GraphVariant v : variants)
        graphs.emplace(v, build(ctx.value().checked, v, orientation));

    std::set<MethodRef> test_set(ctx.value().checked.tests.begin(),
                                 ctx.value().checked.tests.end());

    MultiRunOutput out;
    for (MutationOperator op : ops) {
        auto evals = detail::evaluate_mutants(ctx.value(), op, cap, seed, step_budget, workers);
        if (!evals) return Result<MultiRunOutput>::fail(evals.error());
        for (GraphVariant v : variants) {
            const CallGraph& graph = graphs.at(v);
            RunOutput run;
            std::size_t excluded = 0;
            for (const auto& ev : evals.value()) {
                run.manifest.push_back({ev.mutant, ev.viability});
                if (ev.viability != Viability::Killed) continue;
                auto prediction = predict(graph, ev.mutant.site.enclosing, test_set);
                if (!prediction) return Result<MultiRunOutput>::fail(prediction.error());
                ImpactRecord record = make_record(ev.mutant.id, ev.mutant.site.enclosing, ev.ais,
                                                  prediction.value());
                if (exclude_unbounded && record.unbounded) {
                    ++excluded;
                    continue;
                }
                auto cat = classify(record);
                if (!cat) return Result<MultiRunOutput>::fail(cat.error());
                LedgerEntry entry{std::move(record), cat.value(), {}};
                entry.scores = metrics(entry.record);
                run.ledger.entries.push_back(std::move(entry));
            }
            if (run.ledger.entries.empty()) {
                run.report.project = ctx.value().name;
                run.report.op = operator_name(op);
                run.report.variant = variant_name(v);
            } else {
                auto rep = aggregate(ctx.value().name, operator_name(op), variant_name(v),
                                     run.ledger);
                if (!rep) return Result<MultiRunOutput>::fail(rep.error());
                run.report = rep.take();
            }
            if (exclude_unbounded) run.report.n = excluded;
            out.runs.push_back(std::move(run));
        }
    }
    return Result<MultiRunOutput>::ok(std::move(out));
}

/// Single-run convenience form of evaluate_many.
inline Result<RunOutput> evaluate(const RunConfig& config) {
    auto multi = evaluate_many(config.project_dir, {config.op}, {config.variant}, config.cap,
                               config.seed, config.step_budget, config.exclude_unbounded,
                               config.orientation, config.workers);
    if (!multi) return Result<RunOutput>::fail(multi.error());
    return Result<RunOutput>::ok(std::move(multi.value().runs.front()));
}

// ---------------------------------------------------------------------------
// Timings
// ---------------------------------------------------------------------------

struct VariantTiming {
    double t_build_ms = 0.0;
    double t_pred_mean_us = 0.0;
};

struct TimingReport {
    std::string project;
    double t_test_ms = 0.0;
    std::map<GraphVariant, VariantTiming> per_variant;
};

namespace detail {
inline double median(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    std::size_t n = xs.size();
    if (n == 0) return 0.0;
    if (n % 2 == 1) return xs[n / 2];
    return (xs[n / 2 - 1] + xs[n / 2]) / 2.0;
}
}  // namespace detail

/// Wall-clock costs, medians over `repetitions` runs: suite execution,
/// graph construction per variant, and mean single-prediction time with
/// every declared method taken as the change source.
inline Result<TimingReport> timings(const std::filesystem::path& project_dir,
                                    const std::vector<GraphVariant>& variants, int repetitions,
                                    std::uint64_t step_budget) {
    if (repetitions < 3) return Result<TimingReport>::fail("need at least 3 repetitions");
    Result<ProjectContext> ctx = load_project(project_dir, step_budget);
    if (!ctx) return Result<TimingReport>::fail(ctx.error());
    const CheckedProgram& checked = ctx.value().checked;
    std::set<MethodRef> test_set(checked.tests.begin(), checked.tests.end());

    TimingReport report;
    report.project = ctx.value().name;

    using clock = std::chrono::steady_clock;
    std::vector<double> suite_times;
    for (int rep = 0; rep < repetitions; ++rep)
        suite_times.push_back(run_suite(checked, step_budget).wall_time_ms);
    report.t_test_ms = detail::median(std::move(suite_times));

    for (GraphVariant v : variants) {
        std::vector<double> build_times;
        std::vector<double> pred_times;
        for (int rep = 0; rep < repetitions; ++rep) {
            auto b0 = clock::now();
            CallGraph g = build(checked, v);
            auto b1 = clock::now();
            build_times.push_back(std::chrono::duration<double, std::milli>(b1 - b0).count());

            auto p0 = clock::now();
            for (const auto& m : checked.methods_in_order) {
                auto pr = predict(g, m, test_set);
                (void)pr;
            }
            auto p1 = clock::now();
            double total_us = std::chrono::duration<double, std::micro>(p1 - p0).count();
            pred_times.push_back(total_us /
                                 static_cast<double>(std::max<std::size_t>(
                                     checked.methods_in_order.size(), 1)));
        }
        VariantTiming vt;
        vt.t_build_ms = detail::median(std::move(build_times));
        vt.t_pred_mean_us = detail::median(std::move(pred_times));
        report.per_variant.emplace(v, vt);
    }
    return Result<TimingReport>::ok(std::move(report));
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

namespace detail {
inline std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}
}  // namespace detail

inline std::string render_report_csv(const std::vector<EvaluationReport>& reports) {
    std::string out = "project,operator,variant,k,n,p_same,p_complete,mean_p,mean_r,mean_f,s,o,u,d\n";
    for (const auto& r : reports) {
        out += r.project + "," + r.op + "," + r.variant + "," + std::to_string(r.k) + "," +
               std::to_string(r.n) + "," + detail::fixed6(r.p_same) + "," +
               detail::fixed6(r.p_complete) + "," + detail::fixed6(r.mean_p) + "," +
               detail::fixed6(r.mean_r) + "," + detail::fixed6(r.mean_f) + "," +
               std::to_string(r.s) + "," + std::to_string(r.o) + "," + std::to_string(r.u) + "," +
               std::to_string(r.d) + "\n";
    }
    return out;
}

/// Markdown table, one row per (project, operator, variant); the best
/// F-score within each (project, operator) group is bold, ties included.
inline std::string render_report_markdown(const std::vector<EvaluationReport>& reports) {
    std::map<std::pair<std::string, std::string>, double> best_f;
    for (const auto& r : reports) {
        auto key = std::make_pair(r.project, r.op);
        auto it = best_f.find(key);
        if (it == best_f.end() || r.mean_f > it->second) best_f[key] = r.mean_f;
    }
    std::string out =
        "| project | operator | variant | |K| | |N| | p_S | p_C | P | R | F |\n"
        "|---|---|---|---|---|---|---|---|---|---|\n";
    for (const auto& r : reports) {
        std::string f = detail::fixed6(r.mean_f);
        if (r.mean_f == best_f.at({r.project, r.op})) f = "**" + f + "**";
        out += "| " + r.project + " | " + r.op + " | " + r.variant + " | " +
               std::to_string(r.k) + " | " + std::to_string(r.n) + " | " +
               detail::fixed6(r.p_same) + " | " + detail::fixed6(r.p_complete) + " | " +
               detail::fixed6(r.mean_p) + " | " + detail::fixed6(r.mean_r) + " | " + f + " |\n";
    }
    return out;
}

inline std::string render_ledger_jsonl(const EvaluationLedger& ledger) {
    std::string out;
    for (const auto& e : ledger.entries) {
        out += render_record_line(e.record);
        out += "\n";
    }
    return out;
}

inline std::string render_timing_csv(const std::vector<TimingReport>& reports) {
    std::string out = "project,variant,t_test_ms,t_build_ms,t_pred_mean_us\n";
    for (const auto& r : reports) {
        for (const auto& [v, vt] : r.per_variant) {
            out += r.project + "," + variant_name(v) + "," + detail::fixed6(r.t_test_ms) + "," +
                   detail::fixed6(vt.t_build_ms) + "," + detail::fixed6(vt.t_pred_mean_us) + "\n";
        }
    }
    return out;
}

/// String-id view of an impact record, the shape a parsed ledger line gives.
struct ImpactView {
    std::string mutated_id;
    std::set<std::string> ais;
    std::set<std::string> cis;
};

inline ImpactView to_view(const ImpactRecord& record) {
    ImpactView v;
    v.mutated_id = record.mutated.render();
    for (const auto& t : record.ais) v.ais.insert(t.render());
    for (const auto& t : record.cis) v.cis.insert(t.render());
    return v;
}

/// Fig.-4 style propagation view of one mutant: the mutated node, correctly
/// predicted tests, false positives, missed tests, and plain application
/// nodes each get their own style; class counts ride in a comment line.
inline Result<std::string> render_impact_dot(const CallGraph& graph, const ImpactView& view) {
    const std::string& mutated_id = view.mutated_id;
    if (!graph.has_node(mutated_id))
        return Result<std::string>::fail("mutated method has no node in this graph: " +
                                         mutated_id);
    std::set<std::string> tp, fp, fn;
    for (const auto& t : view.cis) (view.ais.count(t) ? tp : fp).insert(t);
    for (const auto& t : view.ais)
        if (!view.cis.count(t)) fn.insert(t);
    for (const auto& sets : {&tp, &fp, &fn}) {
        for (const auto& id : *sets)
            if (!graph.has_node(id))
                return Result<std::string>::fail(
                    "record references a node absent from this graph: " + id);
    }
    std::size_t app = 0;
    for (const auto& n : graph.nodes)
        if (n.id != mutated_id && !tp.count(n.id) && !fp.count(n.id) && !fn.count(n.id)) ++app;

    std::string out = "digraph impact {\n";
    out += "    // tp=" + std::to_string(tp.size()) + " fp=" + std::to_string(fp.size()) +
           " fn=" + std::to_string(fn.size()) + " app=" + std::to_string(app) + "\n";
    out += "    rankdir=LR;\n";
    for (const auto& n : graph.nodes) {
        out += "    \"" + n.id + "\" [";
        if (n.id == mutated_id) {
            out += "class=\"mutated\", shape=ellipse, peripheries=3, style=filled, "
                   "fillcolor=lightblue";
        } else if (tp.count(n.id)) {
            out += "class=\"tp\", shape=box, style=filled, fillcolor=green";
        } else if (fp.count(n.id)) {
            out += "class=\"fp\", shape=diamond, style=filled, fillcolor=red";
        } else if (fn.count(n.id)) {
            out += "class=\"fn\", shape=star, style=filled, fillcolor=purple";
        } else {
            out += "class=\"app\", shape=" +
                   std::string(n.kind == GraphNodeKind::Field ? "box" : "circle");
        }
        out += "];\n";
    }
    for (const auto& e : graph.edges)
        out += "    \"" + e.from + "\" -> \"" + e.to + "\" [label=\"" + edge_kind_name(e.kind) +
               "\"];\n";
    out += "}\n";
    return Result<std::string>::ok(std::move(out));
}

inline Result<std::string> render_impact_dot(const CallGraph& graph, const ImpactRecord& record) {
    return render_impact_dot(graph, to_view(record));
}

/// The sampled mutants of one operator with their compile/kill status, the
/// manifest a mutate run writes.
inline Result<std::vector<ManifestEntry>> mutate_manifest(const std::filesystem::path& project_dir,
                                                          MutationOperator op, std::size_t cap,
                                                          std::uint64_t seed,
                                                          std::uint64_t step_budget,
                                                          unsigned workers) {
    Result<ProjectContext> ctx = load_project(project_dir, step_budget);
    if (!ctx) return Result<std::vector<ManifestEntry>>::fail(ctx.error());
    auto evals = detail::evaluate_mutants(ctx.value(), op, cap, seed, step_budget, workers);
    if (!evals) return Result<std::vector<ManifestEntry>>::fail(evals.error());
    std::vector<ManifestEntry> out;
    out.reserve(evals.value().size());
    for (auto& ev : evals.value()) out.push_back({std::move(ev.mutant), ev.viability});
    return Result<std::vector<ManifestEntry>>::ok(std::move(out));
}

}  // namespace impactlab
