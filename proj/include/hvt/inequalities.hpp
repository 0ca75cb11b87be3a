#pragma once

// Closed-form inequality evaluators for correlations of two-valued and
// three-valued observables, plus builders for the matching moment problems
// so each verdict can be cross-checked against the LP.

#include "hvt/feasibility.hpp"
#include "hvt/surd.hpp"

#include <array>
#include <string>
#include <utility>
#include <vector>

namespace hvt {

struct InequalityReport {
    std::string id;
    std::vector<std::pair<std::string, Surd>> inputs;
    bool satisfied = true;
    Surd slack;  // negative iff violated
    std::vector<std::pair<std::string, Surd>> components;
    std::vector<std::string> notes;
};

namespace detail {

inline InequalityReport make_report(std::string id, std::vector<std::pair<std::string, Surd>> inputs, Surd slack) {
    InequalityReport r;
    r.id = std::move(id);
    r.inputs = std::move(inputs);
    r.satisfied = slack.sign() >= 0;
    r.slack = std::move(slack);
    return r;
}

inline void check_bound(const std::vector<std::pair<std::string, Surd>>& inputs, const Surd& bound) {
    for (const auto& [name, v] : inputs)
        if (abs(v) > bound) throw DomainError(name + " = " + v.str() + " is outside [-" + bound.str() + ", " + bound.str() + "]");
}

} // namespace detail

/// -1 <= a+b+c <= 1 + 2 min(a,b,c) on arbitrary inputs, for applying the
/// +-1 criterion to covariances or correlations of other variables.
inline InequalityReport eval_triple_form(const Surd& a, const Surd& b, const Surd& c, std::string id = "triple-form") {
    Surd sum = a + b + c;
    Surd lower = sum + 1;
    Surd upper = 1 + 2 * min(a, min(b, c)) - sum;
    auto r = detail::make_report(std::move(id), {{"XY", a}, {"YZ", b}, {"XZ", c}}, min(lower, upper));
    r.components = {{"sum", sum}, {"lower", lower}, {"upper", upper}};
    return r;
}

/// -1 <= E(XY)+E(YZ)+E(XZ) <= 1 + 2 min(E(XY),E(YZ),E(XZ)) for zero-mean +-1 triples.
inline InequalityReport eval_triple_pm1(const Surd& exy, const Surd& eyz, const Surd& exz) {
    std::vector<std::pair<std::string, Surd>> in{{"E(XY)", exy}, {"E(YZ)", eyz}, {"E(XZ)", exz}};
    detail::check_bound(in, 1);
    auto r = eval_triple_form(exy, eyz, exz, "pm1-triple");
    r.inputs = std::move(in);
    return r;
}

/// E(XY)+E(YZ)+E(XZ) - 2(x0+y0+z0) >= -1 for +-1 triples with means x0, y0, z0.
inline InequalityReport eval_generalized_lower(const Surd& exy, const Surd& eyz, const Surd& exz, const Surd& x0,
                                               const Surd& y0, const Surd& z0) {
    std::vector<std::pair<std::string, Surd>> moments{{"E(XY)", exy}, {"E(YZ)", eyz}, {"E(XZ)", exz}};
    detail::check_bound(moments, 1);
    for (const auto& [name, v] : std::vector<std::pair<std::string, Surd>>{{"E(X)", x0}, {"E(Y)", y0}, {"E(Z)", z0}})
        if (abs(v) >= 1) throw DomainError(name + " = " + v.str() + " must satisfy |mean| < 1");
    Surd sum = exy + eyz + exz;
    Surd lhs = sum - 2 * (x0 + y0 + z0);
    auto in = moments;
    in.insert(in.end(), {{"E(X)", x0}, {"E(Y)", y0}, {"E(Z)", z0}});
    auto r = detail::make_report("generalized-lower", std::move(in), lhs + 1);
    r.components = {{"lhs", lhs}, {"means-free lower", sum + 1}};
    // P(all -1) + P(all +1) = (1 + sum)/4 for any means, so only sum >= -1 is
    // forced; with a positive mean sum the stated bound is stronger than that
    if ((x0 + y0 + z0).sign() > 0)
        r.notes.push_back("mean sum is positive: this bound can fail for moments of an actual joint distribution; "
                          "the means-free bound E(XY)+E(YZ)+E(XZ) >= -1 is the necessary one");
    return r;
}

/// 1 + E(YZ) >= |E(XY) - E(XZ)|.
inline InequalityReport eval_bell_original(const Surd& exy, const Surd& eyz, const Surd& exz) {
    std::vector<std::pair<std::string, Surd>> in{{"E(XY)", exy}, {"E(YZ)", eyz}, {"E(XZ)", exz}};
    detail::check_bound(in, 1);
    Surd lhs = 1 + eyz;
    Surd rhs = abs(exy - exz);
    auto r = detail::make_report("bell-original", std::move(in), lhs - rhs);
    r.components = {{"1+E(YZ)", lhs}, {"|E(XY)-E(XZ)|", rhs}};
    return r;
}

struct ChshOptions {
    Rational j = Rational(1, 2);
    bool normalized = false;  // inputs are moments of A/j-scaled observables
};

/// Two-setting inequalities. For j = 1/2 (or normalized inputs) all four
/// sign patterns -2 <= S_k <= 2 are evaluated. For raw spin-j inputs with
/// observables in {-j, ..., j} the single bound
/// |E(a,b)-E(a,b')| + |E(a',b)+E(a',b')| <= 2j is evaluated.
inline InequalityReport eval_chsh(const Surd& eab, const Surd& eabp, const Surd& eapb, const Surd& eapbp,
                                  const ChshOptions& options = {}) {
    const Rational& j = options.j;
    if (j <= 0 || denominator(2 * j) != 1) throw DomainError("j must be a positive half-integer, got " + to_string(j));
    std::vector<std::pair<std::string, Surd>> in{{"E(AB)", eab}, {"E(AB')", eabp}, {"E(A'B)", eapb}, {"E(A'B')", eapbp}};
    const bool four = j == Rational(1, 2) || options.normalized;
    detail::check_bound(in, four ? Rational(1) : Rational(j * j));
    if (four) {
        std::array<Surd, 4> e{eab, eabp, eapb, eapbp};
        Surd total = eab + eabp + eapb + eapbp;
        std::optional<Surd> slack;
        std::vector<std::pair<std::string, Surd>> comps;
        static const std::array<const char*, 4> names{"S(-AB)", "S(-AB')", "S(-A'B)", "S(-A'B')"};
        for (std::size_t k = 0; k < 4; ++k) {
            Surd s = total - 2 * e[k];
            Surd sk = 2 - abs(s);
            comps.emplace_back(names[k], s);
            slack = slack ? min(*slack, sk) : sk;
        }
        auto r = detail::make_report("chsh", std::move(in), *slack);
        r.components = std::move(comps);
        if (options.normalized && j != Rational(1, 2)) r.notes.push_back("inputs taken as normalized moments, spin j = " + to_string(j));
        return r;
    }
    Surd lhs = abs(eab - eabp) + abs(eapb + eapbp);
    auto r = detail::make_report("chsh", std::move(in), Surd(Rational(2 * j)) - lhs);
    r.components = {{"lhs", lhs}, {"bound", Surd(Rational(2 * j))}};
    r.notes.push_back("raw spin-j mode, observables in {-j, ..., j}, bound 2j");
    if (j > 1)
        r.notes.push_back("a deterministic model with all observables equal to j reaches 2j^2 > 2j, so this raw bound is not "
                          "implied by a hidden variable for j > 1; use the normalized mode");
    return r;
}

/// |E(a,b)-E(a,b')| + |E(a',b)+E(a',b')| + 2(|E(a,b)|-1)(|E(a,b')|-1) <= 2.
inline InequalityReport eval_spin1_strengthened(const Surd& eab, const Surd& eabp, const Surd& eapb, const Surd& eapbp) {
    std::vector<std::pair<std::string, Surd>> in{{"E(ab)", eab}, {"E(ab')", eabp}, {"E(a'b)", eapb}, {"E(a'b')", eapbp}};
    detail::check_bound(in, 1);
    Surd base = abs(eab - eabp) + abs(eapb + eapbp);
    Surd extra = 2 * (abs(eab) - 1) * (abs(eabp) - 1);
    Surd lhs = base + extra;
    auto r = detail::make_report("spin1-strengthened", std::move(in), 2 - lhs);
    r.components = {{"base", base}, {"extra", extra}, {"lhs", lhs}};
    // A = 0 everywhere with A' = B = B' = 1 gives moments (0, 0, 1, 1) and lhs 4
    if (!r.satisfied)
        r.notes.push_back("a violation does not exclude a spin-1 hidden variable: the deterministic model a=0, a'=b=b'=1 "
                          "violates this bound; only base <= 2 is implied");
    return r;
}

// Moment problems for LP cross-checks.

/// Zero-mean +-1 triple X, Y, Z with the three product moments.
inline MomentProblem pm1_triple_problem(const Rational& exy, const Rational& eyz, const Rational& exz,
                                        const std::array<Rational, 3>& means = {0, 0, 0}) {
    MomentProblem p;
    p.label = "pm1-triple";
    p.variables = {pm1_variable("X"), pm1_variable("Y"), pm1_variable("Z")};
    p.constraints = {{{{"X", 1}}, means[0]},         {{{"Y", 1}}, means[1]},         {{{"Z", 1}}, means[2]},
                     {{{"X", 1}, {"Y", 1}}, exy}, {{{"Y", 1}, {"Z", 1}}, eyz}, {{{"X", 1}, {"Z", 1}}, exz}};
    return p;
}

/// Zero-mean +-1 quadruple A, A', B, B' with the four cross moments.
inline MomentProblem chsh_problem(const Rational& eab, const Rational& eabp, const Rational& eapb, const Rational& eapbp) {
    MomentProblem p;
    p.label = "chsh";
    p.variables = {pm1_variable("A"), pm1_variable("Ap"), pm1_variable("B"), pm1_variable("Bp")};
    p.constraints = {{{{"A", 1}}, 0},
                     {{{"Ap", 1}}, 0},
                     {{{"B", 1}}, 0},
                     {{{"Bp", 1}}, 0},
                     {{{"A", 1}, {"B", 1}}, eab},
                     {{{"A", 1}, {"Bp", 1}}, eabp},
                     {{{"Ap", 1}, {"B", 1}}, eapb},
                     {{{"Ap", 1}, {"Bp", 1}}, eapbp}};
    return p;
}

} // namespace hvt
