// impactlab — change-impact prediction laboratory for MiniOO projects.
//
// Subcommands:
//   graph     build one call-graph variant and export it as JSON or DOT
//   mutate    enumerate/sample mutants and write the manifest
//   evaluate  full pipeline: mutants, suites, predictions, reports, timings
//   viz       render one mutant's propagation picture from a ledger
//   verify    check the bundled corpus against its recorded statistics

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "impactlab/impactlab.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitUsage = 2;

int fail(const std::string& message) {
    std::cerr << "impactlab: " << message << "\n";
    return kExitError;
}

bool write_file(const std::filesystem::path& path, const std::string& content,
                std::string& error) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        error = "cannot write " + path.string();
        return false;
    }
    out << content;
    return true;
}

impactlab::GraphVariant parse_variant_checked(const std::string& s) {
    auto v = impactlab::variant_from_string(s);
    if (!v) throw CLI::ValidationError("--variant", "unknown variant '" + s + "' (use s|b|h|f)");
    return *v;
}

std::vector<impactlab::GraphVariant> parse_variant_list(const std::string& s) {
    std::vector<impactlab::GraphVariant> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_variant_checked(item));
    if (out.empty()) throw CLI::ValidationError("--variant", "no variant given");
    return out;
}

std::vector<impactlab::MutationOperator> parse_op_list(const std::string& s) {
    using impactlab::MutationOperator;
    if (s == "all" || s == "ALL") return impactlab::all_operators();
    std::vector<MutationOperator> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto op = impactlab::operator_from_string(item);
        if (!op)
            throw CLI::ValidationError("--op", "unknown operator '" + item +
                                                   "' (use ABS|AOR|LCR|ROR|UOI or all)");
        out.push_back(*op);
    }
    if (out.empty()) throw CLI::ValidationError("--op", "no operator given");
    return out;
}

impactlab::FieldOrientation parse_orientation(const std::string& s) {
    if (s == "formal") return impactlab::FieldOrientation::Formal;
    if (s == "figure") return impactlab::FieldOrientation::Figure;
    throw CLI::ValidationError("--field-orientation", "use 'formal' or 'figure'");
}

}  // namespace

int main(int argc, char** argv) {
    using namespace impactlab;

    CLI::App app{"Call-graph based change impact prediction laboratory"};
    app.require_subcommand(1);

    // ---- graph -------------------------------------------------------------
    std::string g_dir, g_variant = "b", g_format = "json", g_out, g_orient = "formal";
    CLI::App* graph_cmd = app.add_subcommand("graph", "Build and export a call graph");
    graph_cmd->add_option("dir", g_dir, "project directory of .moo files")->required();
    graph_cmd->add_option("--variant", g_variant, "graph variant: s|b|h|f (default b)");
    graph_cmd->add_option("--format", g_format, "output format: json|dot")
        ->check(CLI::IsMember({"json", "dot"}));
    graph_cmd->add_option("-o,--out", g_out, "output file (stdout when omitted)");
    graph_cmd->add_option("--field-orientation", g_orient,
                          "field edge orientation: formal|figure");

    // ---- mutate ------------------------------------------------------------
    std::string m_dir, m_op, m_out;
    std::size_t m_cap = 3000;
    std::uint64_t m_seed = 0, m_budget = interp::Machine::kDefaultBudget;
    unsigned m_workers = 0;
    CLI::App* mutate_cmd = app.add_subcommand("mutate", "Generate mutants and write a manifest");
    mutate_cmd->add_option("dir", m_dir, "project directory of .moo files")->required();
    mutate_cmd->add_option("--op", m_op, "mutation operator: ABS|AOR|LCR|ROR|UOI")->required();
    mutate_cmd->add_option("--cap", m_cap, "sample cap per run (default 3000)");
    mutate_cmd->add_option("--seed", m_seed, "sampling seed (default 0)");
    mutate_cmd->add_option("--budget", m_budget, "per-test step budget (default 1000000)");
    mutate_cmd->add_option("--workers", m_workers, "worker threads (default: all cores)")
        ->envname("IMPACTLAB_WORKERS");
    mutate_cmd->add_option("-o,--out", m_out, "manifest file (stdout when omitted)");

    // ---- evaluate ----------------------------------------------------------
    std::string e_dir, e_variant = "b", e_op = "all", e_orient = "formal",
                e_outdir = "impactlab-out";
    std::size_t e_cap = 3000;
    std::uint64_t e_seed = 0, e_budget = interp::Machine::kDefaultBudget;
    unsigned e_workers = 0;
    bool e_exclude_unbounded = false;
    CLI::App* eval_cmd = app.add_subcommand("evaluate", "Run the full evaluation pipeline");
    eval_cmd->add_option("dir", e_dir, "project directory of .moo files")->required();
    eval_cmd->add_option("--variant", e_variant, "comma list of variants (default b)");
    eval_cmd->add_option("--op", e_op, "comma list of operators or 'all' (default all)");
    eval_cmd->add_option("--cap", e_cap, "sample cap per (project, operator) run");
    eval_cmd->add_option("--seed", e_seed, "sampling seed (default 0)");
    eval_cmd->add_option("--budget", e_budget, "per-test step budget (default 1000000)");
    eval_cmd->add_option("--workers", e_workers, "worker threads (default: all cores)")
        ->envname("IMPACTLAB_WORKERS");
    eval_cmd->add_flag("--exclude-unbounded", e_exclude_unbounded,
                       "drop unbounded mutants from the killed set instead of scoring them 0");
    eval_cmd->add_option("--field-orientation", e_orient,
                         "field edge orientation: formal|figure");
    eval_cmd->add_option("--out-dir", e_outdir, "output directory (default impactlab-out)");

    // ---- viz ---------------------------------------------------------------
    std::string v_dir, v_ledger, v_mutant, v_variant = "b", v_out, v_orient = "formal";
    CLI::App* viz_cmd = app.add_subcommand("viz", "Render one mutant's propagation as DOT");
    viz_cmd->add_option("dir", v_dir, "project directory of .moo files")->required();
    viz_cmd->add_option("--ledger", v_ledger, "ledger JSON-lines file")->required();
    viz_cmd->add_option("--mutant", v_mutant, "mutant id to render")->required();
    viz_cmd->add_option("--variant", v_variant, "graph variant the ledger was made with");
    viz_cmd->add_option("--field-orientation", v_orient, "field edge orientation");
    viz_cmd->add_option("-o,--out", v_out, "output file (stdout when omitted)");

    // ---- verify ------------------------------------------------------------
    std::string c_root;
    std::uint64_t c_budget = interp::Machine::kDefaultBudget;
    CLI::App* verify_cmd = app.add_subcommand("verify", "Verify corpus projects");
    verify_cmd->add_option("corpus", c_root, "corpus root directory")->required();
    verify_cmd->add_option("--budget", c_budget, "per-test step budget");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*graph_cmd) {
            GraphVariant variant = parse_variant_checked(g_variant);
            FieldOrientation orient = parse_orientation(g_orient);
            auto ctx = load_project(g_dir, interp::Machine::kDefaultBudget);
            if (!ctx) return fail(ctx.error());
            CallGraph graph = build(ctx.value().checked, variant, orient);
            std::string payload =
                g_format == "dot" ? export_dot(graph) : export_json(graph) + "\n";
            if (g_out.empty()) {
                std::cout << payload;
            } else {
                std::string err;
                if (!write_file(g_out, payload, err)) return fail(err);
            }
            return kExitOk;
        }

        if (*mutate_cmd) {
            auto op = operator_from_string(m_op);
            if (!op)
                throw CLI::ValidationError("--op", "unknown operator '" + m_op + "'");
            auto manifest = mutate_manifest(m_dir, *op, m_cap, m_seed, m_budget, m_workers);
            if (!manifest) return fail(manifest.error());
            std::string name = std::filesystem::path(m_dir).filename() == "src"
                                   ? std::filesystem::path(m_dir).parent_path().filename().string()
                                   : std::filesystem::path(m_dir).filename().string();
            std::string payload = render_manifest(name, *op, m_seed, manifest.value()) + "\n";
            if (m_out.empty()) {
                std::cout << payload;
            } else {
                std::string err;
                if (!write_file(m_out, payload, err)) return fail(err);
            }
            return kExitOk;
        }

        if (*eval_cmd) {
            std::vector<GraphVariant> variants = parse_variant_list(e_variant);
            std::vector<MutationOperator> ops = parse_op_list(e_op);
            FieldOrientation orient = parse_orientation(e_orient);
            auto multi = evaluate_many(e_dir, ops, variants, e_cap, e_seed, e_budget,
                                       e_exclude_unbounded, orient, e_workers);
            if (!multi) return fail(multi.error());

            std::filesystem::path outdir(e_outdir);
            std::string err;
            std::vector<EvaluationReport> reports;
            std::size_t run_index = 0;
            for (MutationOperator op : ops) {
                bool manifest_written = false;
                for (GraphVariant v : variants) {
                    const RunOutput& run = multi.value().runs[run_index++];
                    reports.push_back(run.report);
                    std::string ledger_name = std::string("ledger-") + operator_name(op) + "-" +
                                              variant_name(v) + ".jsonl";
                    if (!write_file(outdir / ledger_name, render_ledger_jsonl(run.ledger), err))
                        return fail(err);
                    if (!manifest_written) {
                        std::string manifest_name =
                            std::string("manifest-") + operator_name(op) + ".json";
                        if (!write_file(outdir / manifest_name,
                                        render_manifest(run.report.project, op, e_seed,
                                                        run.manifest) +
                                            "\n",
                                        err))
                            return fail(err);
                        manifest_written = true;
                    }
                }
            }
            if (!write_file(outdir / "report.csv", render_report_csv(reports), err))
                return fail(err);
            if (!write_file(outdir / "report.md", render_report_markdown(reports), err))
                return fail(err);
            auto timing = timings(e_dir, variants, 3, e_budget);
            if (!timing) return fail(timing.error());
            if (!write_file(outdir / "timings.csv", render_timing_csv({timing.value()}), err))
                return fail(err);
            std::cout << render_report_csv(reports);
            return kExitOk;
        }

        if (*viz_cmd) {
            GraphVariant variant = parse_variant_checked(v_variant);
            FieldOrientation orient = parse_orientation(v_orient);
            std::ifstream in(v_ledger, std::ios::binary);
            if (!in) return fail("cannot read ledger " + v_ledger);
            std::string line;
            std::optional<LedgerLine> found;
            while (std::getline(in, line)) {
                if (line.empty()) continue;
                auto parsed = parse_record_line(line);
                if (!parsed) return fail(parsed.error());
                if (parsed.value().mutant == v_mutant) {
                    found = parsed.take();
                    break;
                }
            }
            if (!found) return fail("mutant '" + v_mutant + "' not found in ledger");
            auto ctx = load_project(v_dir, interp::Machine::kDefaultBudget);
            if (!ctx) return fail(ctx.error());
            CallGraph graph = build(ctx.value().checked, variant, orient);
            ImpactView view;
            view.mutated_id = found->method;
            view.ais.insert(found->ais.begin(), found->ais.end());
            view.cis.insert(found->cis.begin(), found->cis.end());
            auto dot = render_impact_dot(graph, view);
            if (!dot) return fail(dot.error());
            if (v_out.empty()) {
                std::cout << dot.value();
            } else {
                std::string err;
                if (!write_file(v_out, dot.value(), err)) return fail(err);
            }
            return kExitOk;
        }

        if (*verify_cmd) {
            std::vector<VerifyEntry> entries = verify_corpus(c_root, c_budget);
            bool all_pass = true;
            for (const auto& e : entries) {
                std::cout << (e.pass ? "[ ok ] " : "[FAIL] ") << e.project;
                if (!e.pass) {
                    std::cout << ": " << e.detail;
                    all_pass = false;
                }
                std::cout << "\n";
            }
            return all_pass ? kExitOk : kExitError;
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << "impactlab: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        return fail(e.what());
    }
    return kExitUsage;
}
