#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "impactlab/pipeline.hpp"

namespace impactlab {

struct GraphStats {
    std::size_t nodes = 0;
    std::size_t edges = 0;
};

/// Recorded statistics of one corpus project. `methods` counts every
/// declared method including interface signatures and tests.
struct CorpusExpectation {
    std::size_t methods = 0;
    std::size_t tests = 0;
    std::map<GraphVariant, GraphStats> graphs;
};

inline CorpusExpectation compute_expectation(const CheckedProgram& checked) {
    CorpusExpectation e;
    e.methods = checked.methods_in_order.size();
    e.tests = checked.tests.size();
    for (GraphVariant v :
         {GraphVariant::S, GraphVariant::B, GraphVariant::H, GraphVariant::F}) {
        CallGraph g = build(checked, v);
        e.graphs[v] = {g.nodes.size(), g.edges.size()};
    }
    return e;
}

inline std::string render_expectation(const CorpusExpectation& e) {
    nlohmann::ordered_json j;
    j["methods"] = e.methods;
    j["tests"] = e.tests;
    j["graphs"] = nlohmann::ordered_json::object();
    for (const auto& [v, st] : e.graphs)
        j["graphs"][variant_name(v)] = {{"nodes", st.nodes}, {"edges", st.edges}};
    return j.dump(2) + "\n";
}

inline Result<CorpusExpectation> parse_expectation(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded()) return Result<CorpusExpectation>::fail("invalid expected.json");
    CorpusExpectation e;
    e.methods = j.value("methods", 0u);
    e.tests = j.value("tests", 0u);
    for (const auto& [key, st] : j.value("graphs", nlohmann::json::object()).items()) {
        auto v = variant_from_string(key);
        if (!v) return Result<CorpusExpectation>::fail("invalid variant key '" + key + "'");
        e.graphs[*v] = {st.value("nodes", 0u), st.value("edges", 0u)};
    }
    return Result<CorpusExpectation>::ok(std::move(e));
}

struct VerifyEntry {
    std::string project;
    bool pass = false;
    std::string detail;  // empty on pass
};

/// Checks one project: it parses, checks, its suite is green, its recorded
/// statistics match, and the B/H node sets are equal.
inline VerifyEntry verify_project(const std::filesystem::path& dir, std::uint64_t step_budget) {
    VerifyEntry entry;
    entry.project = dir.filename().string();
    auto fail = [&](std::string why) {
        entry.pass = false;
        if (!entry.detail.empty()) entry.detail += "; ";
        entry.detail += std::move(why);
    };

    Result<ProjectContext> ctx = load_project(dir / "src", step_budget);
    if (!ctx) {
        fail(ctx.error());
        return entry;
    }
    const CheckedProgram& checked = ctx.value().checked;
    if (checked.tests.empty()) fail("project has no tests");
    for (const auto& [test, outcome] : ctx.value().baseline.outcomes) {
        if (outcome.failing())
            fail("baseline failure: " + test.render() + " (" +
                 test_status_name(outcome.status) +
                 (outcome.detail.empty() ? "" : ": " + outcome.detail) + ")");
    }

    std::ifstream in(dir / "expected.json", std::ios::binary);
    if (!in) {
        fail("missing expected.json");
        return entry;
    }
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    Result<CorpusExpectation> expected = parse_expectation(text);
    if (!expected) {
        fail(expected.error());
        return entry;
    }

    CorpusExpectation actual = compute_expectation(checked);
    if (actual.methods != expected.value().methods)
        fail("methods: expected " + std::to_string(expected.value().methods) + ", got " +
             std::to_string(actual.methods));
    if (actual.tests != expected.value().tests)
        fail("tests: expected " + std::to_string(expected.value().tests) + ", got " +
             std::to_string(actual.tests));
    for (const auto& [v, st] : expected.value().graphs) {
        const GraphStats& got = actual.graphs[v];
        if (got.nodes != st.nodes || got.edges != st.edges)
            fail(std::string("graph ") + variant_name(v) + ": expected " +
                 std::to_string(st.nodes) + "n/" + std::to_string(st.edges) + "e, got " +
                 std::to_string(got.nodes) + "n/" + std::to_string(got.edges) + "e");
    }

    // structural identity independent of the recorded numbers
    CallGraph gb = build(checked, GraphVariant::B);
    CallGraph gh = build(checked, GraphVariant::H);
    if (gb.nodes != gh.nodes) fail("node sets of variants B and H differ");

    entry.pass = entry.detail.empty();
    return entry;
}

/// Verifies every project under the corpus root (sorted by name).
inline std::vector<VerifyEntry> verify_corpus(const std::filesystem::path& corpus_root,
                                              std::uint64_t step_budget =
                                                  interp::Machine::kDefaultBudget) {
    namespace fs = std::filesystem;
    std::vector<fs::path> dirs;
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(corpus_root, ec))
        if (entry.is_directory()) dirs.push_back(entry.path());
    std::sort(dirs.begin(), dirs.end());
    std::vector<VerifyEntry> out;
    if (ec || dirs.empty()) {
        out.push_back({corpus_root.string(), false, "no corpus projects found"});
        return out;
    }
    for (const auto& d : dirs) out.push_back(verify_project(d, step_budget));
    return out;
}

}  // namespace impactlab
