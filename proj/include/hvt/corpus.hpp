#pragma once

// Golden corpus runner. A manifest lists file cases (a command run on a
// problem file) and builtin cases (grids and tables computed in-process);
// each case carries expected values addressed by JSON pointers.

#include "hvt/commands.hpp"

#include <cstdlib>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#ifndef HVT_DEFAULT_CORPUS_DIR
#define HVT_DEFAULT_CORPUS_DIR "corpus"
#endif

namespace hvt {

inline std::string corpus_directory() {
    if (const char* env = std::getenv("HVT_CORPUS_DIR"); env && *env) return env;
    return HVT_DEFAULT_CORPUS_DIR;
}

namespace builtin {

inline const std::vector<Rational>& quarter_grid() {
    static const std::vector<Rational> g{Rational(-1), Rational(-3, 4), Rational(-1, 2), Rational(-1, 4), Rational(0),
                                         Rational(1, 4), Rational(1, 2),  Rational(3, 4),  Rational(1)};
    return g;
}

inline json pm1_triple_grid() {
    std::size_t cases = 0, disagreements = 0;
    for (const auto& a : quarter_grid())
        for (const auto& b : quarter_grid())
            for (const auto& c : quarter_grid()) {
                ++cases;
                bool closed = eval_triple_pm1(a, b, c).satisfied;
                if (closed != decide(pm1_triple_problem(a, b, c)).feasible()) ++disagreements;
            }
    return {{"cases", cases}, {"disagreements", disagreements}};
}

inline json chsh_grid() {
    const std::vector<Rational> g{Rational(-1), Rational(-1, 2), Rational(0), Rational(1, 2), Rational(1)};
    std::size_t cases = 0, disagreements = 0;
    for (const auto& a : g)
        for (const auto& b : g)
            for (const auto& c : g)
                for (const auto& d : g) {
                    ++cases;
                    if (eval_chsh(a, b, c, d).satisfied != decide(chsh_problem(a, b, c, d)).feasible()) ++disagreements;
                }
    return {{"cases", cases}, {"disagreements", disagreements}};
}

/// Zero-mean exchangeable pairs with rho on the quarter grid, plus every
/// exchangeable table with entries in multiples of 1/8.
inline json exchangeable_grid() {
    std::size_t cases = 0, mismatches = 0, built = 0;
    auto check = [&](const Rational& p11, const Rational& p10, const Rational& p00) {
        auto c = exchangeable_symmetric_construct(p11, p10, p10, p00);
        if (!c.criterion.rho) return;
        ++cases;
        bool expect = *c.criterion.rho >= 0;
        bool ok = c.model.has_value();
        if (ok) {
            ++built;
            std::map<Atom, Rational> target{{{0, 0}, p00}, {{0, 1}, p10}, {{1, 0}, p10}, {{1, 1}, p11}};
            JointDistribution want({pm1_variable("X"), pm1_variable("Y")}, target);
            ok = c.model->recompose() == want && verify_factorization(*c.model, FactorizationOrder::full).holds &&
                 c.model->points().size() <= 2;
        }
        if (ok != expect) ++mismatches;
    };
    for (const auto& rho : quarter_grid()) check((1 + rho) / 4, (1 - rho) / 4, (1 + rho) / 4);
    for (int a = 0; a <= 8; ++a)
        for (int b = 0; 2 * b + a <= 8; ++b) check(Rational(a, 8), Rational(b, 8), Rational(8 - a - 2 * b, 8));
    return {{"cases", cases}, {"constructed", built}, {"mismatches", mismatches}};
}

inline json pushforward_table() {
    auto dist = JointDistribution::uniform({pm1_variable("X"), pm1_variable("Y"), pm1_variable("Z")});
    std::vector<NamedFunction> fns{{"A", [](std::span<const Rational> v) { return Rational(v[0] + v[1]); }},
                                   {"B", [](std::span<const Rational> v) { return Rational(v[1] + v[2]); }}};
    auto ab = pushforward(dist, fns);
    auto p = [&](int a, int b) { return to_string(probability(ab, value_event(ab, "A", a) & value_event(ab, "B", b))); };
    return {{"P(A=-2,B=-2)", p(-2, -2)}, {"P(A=-2,B=0)", p(-2, 0)}, {"P(A=-2,B=2)", p(-2, 2)}, {"P(A=0,B=0)", p(0, 0)}};
}

inline json ghz_subsets() {
    auto config = GhzConfig::standard();
    auto analysis = ghz_subset_analysis(config);
    json minimal = json::array();
    for (auto mask : analysis.minimal_infeasible) {
        json subset = json::array();
        for (std::size_t i = 0; i < config.quadruples.size(); ++i)
            if (mask >> i & 1u) subset.push_back(describe(config.quadruples[i]));
        minimal.push_back(subset);
    }
    std::uint32_t all = (1u << config.quadruples.size()) - 1;
    std::uint32_t without_api = all & ~((1u << 1) | (1u << 5));
    return {{"full", analysis.feasible[all] ? "feasible" : "infeasible"},
            {"without_api", analysis.feasible[without_api] ? "feasible" : "infeasible"},
            {"minimal_infeasible", minimal}};
}

inline json ghz_replay() {
    GhzConfig sub;
    for (std::size_t i : {0u, 2u, 3u, 5u}) sub.quadruples.push_back(GhzConfig::standard().quadruples[i]);
    auto witness = decide(build_ghz_problem(sub)).witness;
    if (!witness) return {{"error", "subsystem unexpectedly infeasible"}};
    auto r = replay_proof_chain(*witness);
    std::size_t holds = 0, unmet = 0;
    for (const auto& c : r.cells)
        for (const auto& s : c.steps) {
            if (s.status == StepStatus::holds) ++holds;
            if (s.status == StepStatus::hypothesis_fails) ++unmet;
        }
    return {{"failures", r.first_failure.has_value()}, {"contradiction", r.contradiction}, {"holds", holds > 0}, {"unmet", unmet > 0}};
}

inline json gaussian_det3_grid() {
    std::size_t cases = 0, disagreements = 0, boundary = 0;
    for (int a = -10; a <= 10; ++a)
        for (int b = -10; b <= 10; ++b)
            for (int c = -10; c <= 10; ++c) {
                ++cases;
                Rational ra(a, 10), rb(b, 10), rc(c, 10);
                auto ineq = det_inequality_3var(ra, rb, rc);
                auto eig = eigenvalue_feasible(PartialCorrelationMatrix::three(a / 10.0, b / 10.0, c / 10.0));
                if (eig.boundary) ++boundary;
                if (ineq.satisfied != eig.feasible && !eig.boundary) ++disagreements;
            }
    return {{"cases", cases}, {"disagreements", disagreements}, {"boundary", boundary}};
}

inline const std::map<std::string, std::function<json()>>& registry() {
    static const std::map<std::string, std::function<json()>> r{
        {"pm1-triple-grid", pm1_triple_grid},   {"chsh-grid", chsh_grid},   {"exchangeable-grid", exchangeable_grid},
        {"pushforward-table", pushforward_table}, {"ghz-subsets", ghz_subsets}, {"ghz-replay", ghz_replay},
        {"gaussian-det3-grid", gaussian_det3_grid}};
    return r;
}

} // namespace builtin

struct CorpusRow {
    std::string anchor;
    bool pass = false;
    std::string detail;
};

struct CorpusSummary {
    std::vector<CorpusRow> rows;
    std::size_t failed() const {
        std::size_t n = 0;
        for (const auto& r : rows) n += r.pass ? 0 : 1;
        return n;
    }
};

namespace detail {

inline std::string compare_values(const json& report, const json& expected) {
    if (!expected.is_object()) return "expect.values must be an object";
    for (const auto& [pointer, want] : expected.items()) {
        json::json_pointer ptr(pointer);
        if (!report.contains(ptr)) return pointer + " missing";
        if (report.at(ptr) != want) return pointer + " = " + report.at(ptr).dump() + ", expected " + want.dump();
    }
    return {};
}

inline CorpusRow run_entry(const json& e, const std::filesystem::path& dir) {
    CorpusRow row;
    try {
        require_fields(e, "entry", {"anchor", "command", "file", "flags", "builtin", "expect"}, {"anchor", "expect"});
        row.anchor = string_field(e["anchor"], "anchor");
        const auto& expect = e["expect"];
        require_fields(expect, row.anchor + ".expect", {"exit", "values"});
        json report;
        if (e.contains("builtin")) {
            auto name = string_field(e["builtin"], "builtin");
            auto it = builtin::registry().find(name);
            if (it == builtin::registry().end()) throw ValidationError("unknown builtin '" + name + "'");
            report = it->second();
        } else {
            RunOptions run;
            std::vector<std::string> which;
            if (e.contains("flags")) {
                require_fields(e["flags"], row.anchor + ".flags", {"oracle", "which"});
                run.oracle = e["flags"].value("oracle", false);
                if (e["flags"].contains("which")) which = e["flags"]["which"].get<std::vector<std::string>>();
            }
            auto out = run_problem_command(string_field(e["command"], "command"), (dir / string_field(e["file"], "file")).string(),
                                           run, which);
            report = out.report;
            if (expect.contains("exit") && expect["exit"] != out.exit) {
                row.detail = "exit " + std::to_string(out.exit) + ", expected " + expect["exit"].dump();
                if (report.contains("error")) row.detail += " (" + report["error"].get<std::string>() + ")";
                return row;
            }
        }
        if (expect.contains("values")) row.detail = compare_values(report, expect["values"]);
        row.pass = row.detail.empty();
    } catch (const std::exception& ex) {
        row.pass = false;
        row.detail = ex.what();
    }
    return row;
}

} // namespace detail

inline CorpusSummary run_corpus(const std::string& directory = corpus_directory()) {
    std::filesystem::path dir(directory);
    json manifest = read_json_file((dir / "manifest.json").string());
    detail::require_fields(manifest, "manifest", {"schema", "entries"}, {"schema", "entries"});
    if (manifest["schema"] != "hvt-corpus/1") throw ValidationError("manifest: expected schema \"hvt-corpus/1\"");
    CorpusSummary s;
    for (const auto& e : manifest["entries"]) s.rows.push_back(detail::run_entry(e, dir));
    return s;
}

inline json corpus_json(const CorpusSummary& s) {
    json rows = json::array();
    for (const auto& r : s.rows) {
        json row{{"anchor", r.anchor}, {"status", r.pass ? "PASS" : "FAIL"}};
        if (!r.detail.empty()) row["detail"] = r.detail;
        rows.push_back(row);
    }
    return {{"schema", "hvt-corpus-report/1"},
            {"engine", {{"name", "hvt"}, {"version", engine_version()}}},
            {"entries", rows},
            {"passed", s.rows.size() - s.failed()},
            {"failed", s.failed()}};
}

} // namespace hvt
