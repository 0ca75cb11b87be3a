#pragma once

// Four-party product-moment system over eight +-1 observables
// A0, B0, C0, D0, Api, Api2, Cpi2, Dpi2, where the suffix is the phase
// (0, pi, pi/2). A constraint fixes E(A B C D) = -cos(p1 + p2 - p3 - p4).

#include "hvt/feasibility.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hvt {

/// Phases in units of pi/2, in the order (A, B, C, D).
struct GhzQuadruple {
    std::array<int, 4> quarter_turns{};
    std::optional<Rational> target_override;  // replaces -cos when set
};

struct GhzConfig {
    std::vector<GhzQuadruple> quadruples;

    static GhzConfig standard() {
        return {{{{0, 0, 0, 0}}, {{2, 0, 0, 0}}, {{1, 0, 1, 0}}, {{1, 0, 0, 1}}, {{0, 0, 1, 1}}, {{2, 0, 1, 1}}}};
    }
};

inline const std::array<std::string, 8>& ghz_variable_names() {
    static const std::array<std::string, 8> names{"A0", "B0", "C0", "D0", "Api", "Api2", "Cpi2", "Dpi2"};
    return names;
}

/// Variable name for a family letter and a phase in units of pi/2.
inline std::string ghz_variable(char family, int quarter_turns) {
    int k = ((quarter_turns % 4) + 4) % 4;
    std::string base(1, family);
    if (k == 0) return base + "0";
    if (k == 2 && family == 'A') return base + "pi";
    if (k == 1 && family != 'B') return base + "pi2";
    throw ValidationError(std::string("no observable ") + family + " at phase " + std::to_string(k) + "*pi/2");
}

/// -cos(k * pi/2).
inline Rational neg_cos_quarter_turns(int k) {
    static const std::array<int, 4> table{-1, 0, 1, 0};
    return table[static_cast<std::size_t>(((k % 4) + 4) % 4)];
}

inline Rational ghz_target(const GhzQuadruple& q) {
    if (q.target_override) return *q.target_override;
    const auto& t = q.quarter_turns;
    return neg_cos_quarter_turns(t[0] + t[1] - t[2] - t[3]);
}

inline Monomial ghz_monomial(const GhzQuadruple& q) {
    static const std::array<char, 4> families{'A', 'B', 'C', 'D'};
    Monomial m;
    for (std::size_t i = 0; i < 4; ++i) m[ghz_variable(families[i], q.quarter_turns[i])] = 1;
    return m;
}

inline std::string describe(const GhzQuadruple& q) {
    static const std::array<const char*, 4> phase{"0", "pi/2", "pi", "3pi/2"};
    std::string s = "(";
    for (std::size_t i = 0; i < 4; ++i) {
        if (i) s += ",";
        s += phase[static_cast<std::size_t>(((q.quarter_turns[i] % 4) + 4) % 4)];
    }
    return s + ")->" + to_string(ghz_target(q));
}

inline MomentProblem build_ghz_problem(const GhzConfig& config) {
    MomentProblem p;
    p.label = "ghz";
    p.higher_order = true;
    for (const auto& n : ghz_variable_names()) p.variables.push_back(pm1_variable(n));
    for (const auto& q : config.quadruples) p.constraints.push_back({ghz_monomial(q), ghz_target(q)});
    validate(p);
    return p;
}

inline FeasibilityResult prove_ghz_infeasible(const GhzConfig& config, const DecideOptions& options = {}) {
    return decide(build_ghz_problem(config), options);
}

/// Verdict for every subset of the configured constraints, indexed by bitmask.
struct GhzSubsetAnalysis {
    std::vector<bool> feasible;
    std::vector<std::uint32_t> minimal_infeasible;
};

inline GhzSubsetAnalysis ghz_subset_analysis(const GhzConfig& config) {
    const std::size_t n = config.quadruples.size();
    if (n > 12) throw SizeError("subset analysis is limited to 12 constraints");
    GhzSubsetAnalysis out;
    out.feasible.assign(std::size_t(1) << n, true);
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        // a superset of an infeasible subset is infeasible
        bool known_bad = false;
        for (std::size_t i = 0; i < n && !known_bad; ++i)
            if ((mask >> i & 1u) && !out.feasible[mask & ~(1u << i)]) known_bad = true;
        if (known_bad) {
            out.feasible[mask] = false;
            continue;
        }
        GhzConfig sub;
        for (std::size_t i = 0; i < n; ++i)
            if (mask >> i & 1u) sub.quadruples.push_back(config.quadruples[i]);
        out.feasible[mask] = decide(build_ghz_problem(sub)).feasible();
        if (!out.feasible[mask]) out.minimal_infeasible.push_back(mask);
    }
    return out;
}

// Replay of the probability-one argument on a concrete distribution.

enum class StepStatus { holds, fails, vacuous, hypothesis_fails };

inline const char* to_string(StepStatus s) {
    switch (s) {
        case StepStatus::holds: return "holds";
        case StepStatus::fails: return "fails";
        case StepStatus::vacuous: return "vacuous";
        case StepStatus::hypothesis_fails: return "hypothesis fails";
    }
    return "?";
}

struct ReplayStep {
    std::string id;
    std::string statement;
    std::vector<std::size_t> uses;  // indices into the standard quadruple list
    StepStatus status = StepStatus::vacuous;
    std::optional<Rational> value;  // conditional probability, when evaluated
};

struct ReplayCell {
    std::array<int, 4> signs{};  // s1..s4 for A0, B0, C0, D0
    Rational probability;
    std::vector<ReplayStep> steps;
};

struct ReplayReport {
    std::vector<bool> constraint_holds;  // per standard quadruple
    std::vector<ReplayCell> cells;        // positive-probability sign cells
    std::optional<std::pair<std::size_t, std::size_t>> first_failure;  // (cell, step) of the first "fails"
    std::optional<std::pair<std::size_t, std::size_t>> first_unmet;    // first "hypothesis fails"
    bool contradiction = false;  // both A_pi statements hold on some cell
};

/// Replays the chain on every sign cell (A0,B0,C0,D0) = (s1..s4) with positive
/// probability. Statements that condition on C0 D0 = s3 s4 are evaluated on the
/// finer cell {B0=s2, C0=s3, D0=s4}; the coarser event does not fix D0, so the
/// unrefined step is not entailed by the constraints.
inline ReplayReport replay_proof_chain(const JointDistribution& dist) {
    const auto& names = ghz_variable_names();
    std::array<std::size_t, 8> pos{};
    for (std::size_t i = 0; i < 8; ++i) {
        pos[i] = dist.index_of(names[i]);
        const auto& v = dist.variables()[pos[i]];
        if (v.support != pm1_variable(v.name).support) throw ValidationError("'" + v.name + "' is not a +-1 variable");
    }
    enum { A0, B0, C0, D0, Api, Api2, Cpi2, Dpi2 };

    const auto standard = GhzConfig::standard();
    ReplayReport report;
    for (const auto& q : standard.quadruples) report.constraint_holds.push_back(expectation(dist, ghz_monomial(q)) == ghz_target(q));

    auto val = [&](const std::vector<Rational>& v, int k) { return v[pos[static_cast<std::size_t>(k)]] > 0 ? 1 : -1; };
    auto event = [&](auto pred) {
        return event_where(dist, [&](const std::vector<Rational>& v) { return pred(v); });
    };

    std::vector<std::array<int, 4>> cells;
    for (int m = 0; m < 16; ++m) cells.push_back({m & 8 ? 1 : -1, m & 4 ? 1 : -1, m & 2 ? 1 : -1, m & 1 ? 1 : -1});

    for (const auto& s : cells) {
        const int s1 = s[0], s2 = s[1], s3 = s[2], s4 = s[3];
        Event cell = event([&](const auto& v) { return val(v, A0) == s1 && val(v, B0) == s2 && val(v, C0) == s3 && val(v, D0) == s4; });
        Rational pcell = probability(dist, cell);
        if (pcell == 0) continue;
        ReplayCell rc;
        rc.signs = s;
        rc.probability = pcell;

        Event refined = event([&](const auto& v) { return val(v, B0) == s2 && val(v, C0) == s3 && val(v, D0) == s4; });
        Event b_d = event([&](const auto& v) { return val(v, B0) == s2 && val(v, D0) == s4; });
        Event b_cd2 = event([&](const auto& v) { return val(v, B0) == s2 && val(v, Cpi2) * val(v, Dpi2) == s3 * s4; });

        auto hypotheses_hold = [&](const std::vector<std::size_t>& uses) {
            for (auto u : uses)
                if (!report.constraint_holds[u]) return false;
            return true;
        };
        auto certain = [&](std::string id, std::string statement, std::vector<std::size_t> uses, const Event& target,
                           const Event& given) {
            ReplayStep st{std::move(id), std::move(statement), std::move(uses), StepStatus::vacuous, std::nullopt};
            if (!hypotheses_hold(st.uses)) {
                st.status = StepStatus::hypothesis_fails;
            } else if (auto p = conditional(dist, target, given)) {
                st.value = *p;
                st.status = *p == 1 ? StepStatus::holds : StepStatus::fails;
            }
            rc.steps.push_back(std::move(st));
        };

        rc.steps.push_back({"positive-cell", "P(A0=s1, B0=s2, C0=s3, D0=s4) > 0", {}, StepStatus::holds, pcell});
        {
            ReplayStep st{"sign-product", "s1 s2 s3 s4 = -1", {0}, StepStatus::holds, std::nullopt};
            if (!hypotheses_hold(st.uses)) st.status = StepStatus::hypothesis_fails;
            else if (s1 * s2 * s3 * s4 != -1) st.status = StepStatus::fails;
            rc.steps.push_back(std::move(st));
        }
        certain("api-plus", "P(Api = s2s3s4 | B0=s2, C0=s3, D0=s4) = 1", {1},
                event([&](const auto& v) { return val(v, Api) == s2 * s3 * s4; }), refined);
        certain("a0c0-given-b0d0", "P(A0C0 = -s2s4 | B0=s2, D0=s4) = 1", {0},
                event([&](const auto& v) { return val(v, A0) * val(v, C0) == -s2 * s4; }), b_d);
        certain("a0c0-given-cell", "P(A0C0 = -s2s4 | B0=s2, C0=s3, D0=s4) = 1", {0},
                event([&](const auto& v) { return val(v, A0) * val(v, C0) == -s2 * s4; }), refined);
        certain("api2cpi2-given-cell", "P(Api2Cpi2 = -s2s4 | B0=s2, C0=s3, D0=s4) = 1", {2},
                event([&](const auto& v) { return val(v, Api2) * val(v, Cpi2) == -s2 * s4; }), refined);
        certain("ac-equal", "P(A0C0 = Api2Cpi2 | B0=s2, C0=s3, D0=s4) = 1", {0, 2},
                event([&](const auto& v) { return val(v, A0) * val(v, C0) == val(v, Api2) * val(v, Cpi2); }), refined);
        certain("ad-equal", "P(A0D0 = Api2Dpi2 | B0=s2, C0=s3, D0=s4) = 1", {0, 3},
                event([&](const auto& v) { return val(v, A0) * val(v, D0) == val(v, Api2) * val(v, Dpi2); }), refined);
        certain("cd-equal", "P(C0D0 = Cpi2Dpi2 | B0=s2, C0=s3, D0=s4) = 1", {0, 2, 3},
                event([&](const auto& v) { return val(v, C0) * val(v, D0) == val(v, Cpi2) * val(v, Dpi2); }), refined);
        certain("cd2-value", "P(Cpi2Dpi2 = s3s4 | B0=s2, C0=s3, D0=s4) = 1", {0, 2, 3},
                event([&](const auto& v) { return val(v, Cpi2) * val(v, Dpi2) == s3 * s4; }), refined);
        {
            ReplayStep st{"b0-cd2-positive", "P(B0=s2, Cpi2Dpi2 = s3s4) > 0", {0, 2, 3}, StepStatus::holds, probability(dist, b_cd2)};
            if (!hypotheses_hold(st.uses)) st.status = StepStatus::hypothesis_fails;
            else if (*st.value == 0) st.status = StepStatus::fails;
            rc.steps.push_back(std::move(st));
        }
        certain("api-minus-given-cd2", "P(Api = -s2s3s4 | B0=s2, Cpi2Dpi2 = s3s4) = 1", {5},
                event([&](const auto& v) { return val(v, Api) == -s2 * s3 * s4; }), b_cd2);
        certain("api-minus", "P(Api = -s2s3s4 | B0=s2, C0=s3, D0=s4) = 1", {0, 2, 3, 5},
                event([&](const auto& v) { return val(v, Api) == -s2 * s3 * s4; }), refined);

        const auto& steps = rc.steps;
        auto status_of = [&](const std::string& id) {
            for (const auto& st : steps)
                if (st.id == id) return st.status;
            return StepStatus::vacuous;
        };
        if (status_of("api-plus") == StepStatus::holds && status_of("api-minus") == StepStatus::holds) report.contradiction = true;
        report.cells.push_back(std::move(rc));
    }

    for (std::size_t c = 0; c < report.cells.size(); ++c)
        for (std::size_t k = 0; k < report.cells[c].steps.size(); ++k) {
            auto st = report.cells[c].steps[k].status;
            if (st == StepStatus::fails && !report.first_failure) report.first_failure = {c, k};
            if (st == StepStatus::hypothesis_fails && !report.first_unmet) report.first_unmet = {c, k};
        }
    return report;
}

} // namespace hvt
