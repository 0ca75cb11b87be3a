#pragma once

#include "hvt/fourier_motzkin.hpp"
#include "hvt/probability.hpp"
#include "hvt/simplex.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace hvt {

enum class Relation { equal, at_least, at_most };

inline const char* to_string(Relation r) {
    switch (r) {
        case Relation::equal: return "=";
        case Relation::at_least: return ">=";
        case Relation::at_most: return "<=";
    }
    return "?";
}

/// E(monomial) = target, or >= / <= target for the slack extension.
struct MomentConstraint {
    Monomial exponents;
    Rational target;
    Relation relation = Relation::equal;
};

/// Observables plus exact moment constraints on their joint distribution.
struct MomentProblem {
    std::vector<FiniteRandomVariable> variables;
    std::vector<MomentConstraint> constraints;
    std::string label;
    bool higher_order = false;  // allow exponents above 2
};

enum class Verdict { feasible, infeasible };

inline const char* to_string(Verdict v) { return v == Verdict::feasible ? "feasible" : "infeasible"; }

/// Witness distribution when feasible; otherwise a Farkas vector over the
/// constraint rows followed by the normalization row.
struct FeasibilityResult {
    Verdict verdict = Verdict::infeasible;
    std::optional<JointDistribution> witness;
    std::optional<std::vector<Rational>> certificate;
    std::string method;

    bool feasible() const { return verdict == Verdict::feasible; }
};

struct DecideOptions {
    std::size_t atom_cap = std::size_t(1) << 20;
};

inline constexpr std::size_t oracle_atom_cap = 4096;

namespace detail {

inline std::vector<ResolvedMonomial> resolve_all(const MomentProblem& problem) {
    std::vector<ResolvedMonomial> out;
    out.reserve(problem.constraints.size());
    for (const auto& c : problem.constraints) out.push_back(resolve_monomial(problem.variables, c.exponents));
    return out;
}

inline std::size_t checked_atom_count(const MomentProblem& problem, std::size_t cap) {
    auto n = AtomLattice(problem.variables).count(cap);
    if (!n)
        throw SizeError("problem '" + problem.label + "' has more than " + std::to_string(cap) +
                        " atoms; eliminate or coarsen variables before deciding");
    return *n;
}

/// Smallest and largest value a monomial takes over the atom lattice.
inline std::pair<Rational, Rational> monomial_range(const MomentProblem& problem, const ResolvedMonomial& monomial) {
    Rational lo = 1, hi = 1;
    for (const auto& [k, e] : monomial) {
        Rational vmin, vmax;
        bool first = true;
        for (const auto& v : problem.variables[k].support) {
            Rational p = pow(v, e);
            if (first || p < vmin) vmin = p;
            if (first || p > vmax) vmax = p;
            first = false;
        }
        Rational c[4] = {lo * vmin, lo * vmax, hi * vmin, hi * vmax};
        lo = *std::min_element(c, c + 4);
        hi = *std::max_element(c, c + 4);
    }
    return {lo, hi};
}

/// Column layout shared by the solvers: atoms first, then one slack per inequality.
struct ColumnLayout {
    std::size_t atoms = 0;
    std::vector<std::size_t> slack_row;  // constraint index of each slack column
    std::size_t rows = 0;                // constraints + normalization
    std::size_t cols() const { return atoms + slack_row.size(); }
};

inline ColumnLayout layout(const MomentProblem& problem, std::size_t atoms) {
    ColumnLayout l;
    l.atoms = atoms;
    for (std::size_t i = 0; i < problem.constraints.size(); ++i)
        if (problem.constraints[i].relation != Relation::equal) l.slack_row.push_back(i);
    l.rows = problem.constraints.size() + 1;
    return l;
}

inline void fill_column(const MomentProblem& problem, const std::vector<ResolvedMonomial>& monomials,
                        const AtomLattice& lattice, const ColumnLayout& l, std::size_t j, std::vector<Rational>& out) {
    out.assign(l.rows, Rational(0));
    if (j < l.atoms) {
        Atom atom = lattice.decode(j);
        for (std::size_t i = 0; i < monomials.size(); ++i) out[i] = monomial_value(problem.variables, monomials[i], atom);
        out[l.rows - 1] = 1;
        return;
    }
    std::size_t row = l.slack_row[j - l.atoms];
    out[row] = problem.constraints[row].relation == Relation::at_least ? -1 : 1;
}

inline std::vector<Rational> rhs(const MomentProblem& problem) {
    std::vector<Rational> b;
    for (const auto& c : problem.constraints) b.push_back(c.target);
    b.emplace_back(1);
    return b;
}

inline JointDistribution witness_from(const MomentProblem& problem, const AtomLattice& lattice,
                                      std::span<const Rational> atom_mass) {
    std::map<Atom, Rational> mass;
    for (std::size_t j = 0; j < atom_mass.size(); ++j)
        if (atom_mass[j] != 0) mass.emplace(lattice.decode(j), atom_mass[j]);
    return JointDistribution(problem.variables, mass);
}

} // namespace detail

/// Checks the structural invariants of a problem; throws ValidationError.
inline void validate(const MomentProblem& problem) {
    std::set<std::string> names;
    for (const auto& v : problem.variables) {
        FiniteRandomVariable check(v.name, v.support);
        if (!names.insert(v.name).second) throw ValidationError("duplicate variable name '" + v.name + "'");
    }
    std::set<Monomial> seen;
    for (const auto& c : problem.constraints) {
        resolve_monomial(problem.variables, c.exponents);
        for (const auto& [name, e] : c.exponents)
            if (e > 2 && !problem.higher_order)
                throw ValidationError("exponent " + std::to_string(e) + " on '" + name +
                                      "' requires the problem to be flagged higher_order");
        if (!seen.insert(c.exponents).second) throw ValidationError("duplicate constraint on the same moment");
    }
}

/// True when `dist` is over the problem's variables and meets every constraint exactly.
inline bool satisfies(const MomentProblem& problem, const JointDistribution& dist) {
    if (dist.variables() != problem.variables) return false;
    for (const auto& c : problem.constraints) {
        Rational e = expectation(dist, c.exponents);
        bool ok = c.relation == Relation::equal      ? e == c.target
                  : c.relation == Relation::at_least ? e >= c.target
                                                     : e <= c.target;
        if (!ok) return false;
    }
    return true;
}

/// Exact Farkas check: the combination is >= 0 on every atom (and respects the
/// sign restriction of each slack) while its constant term is negative.
inline bool verify_certificate(const MomentProblem& problem, std::span<const Rational> certificate,
                               const DecideOptions& options = {}) {
    if (certificate.size() != problem.constraints.size() + 1)
        throw ValidationError("certificate has " + std::to_string(certificate.size()) + " entries, expected " +
                              std::to_string(problem.constraints.size() + 1));
    validate(problem);
    auto monomials = detail::resolve_all(problem);
    std::size_t atoms = detail::checked_atom_count(problem, options.atom_cap);
    AtomLattice lattice(problem.variables);
    auto l = detail::layout(problem, atoms);
    std::vector<Rational> column;
    for (std::size_t j = 0; j < l.cols(); ++j) {
        detail::fill_column(problem, monomials, lattice, l, j, column);
        Rational v = 0;
        for (std::size_t i = 0; i < l.rows; ++i) v += certificate[i] * column[i];
        if (v < 0) return false;
    }
    auto b = detail::rhs(problem);
    Rational constant = 0;
    for (std::size_t i = 0; i < l.rows; ++i) constant += certificate[i] * b[i];
    return constant < 0;
}

/// Decides whether some joint distribution meets every constraint.
///
/// Exact rational phase-one simplex over atom masses. Targets outside the
/// range a monomial can take are rejected up front with a two-term
/// certificate. Every witness and certificate is re-verified before return.
inline FeasibilityResult decide(const MomentProblem& problem, const DecideOptions& options = {}) {
    validate(problem);
    auto monomials = detail::resolve_all(problem);
    std::size_t atoms = detail::checked_atom_count(problem, options.atom_cap);
    AtomLattice lattice(problem.variables);
    const std::size_t m = problem.constraints.size();

    FeasibilityResult result;
    for (std::size_t i = 0; i < m; ++i) {
        const auto& c = problem.constraints[i];
        auto [lo, hi] = detail::monomial_range(problem, monomials[i]);
        std::vector<Rational> cert(m + 1, Rational(0));
        if (c.target > hi && c.relation != Relation::at_most) {
            cert[i] = -1;
            cert[m] = hi;
        } else if (c.target < lo && c.relation != Relation::at_least) {
            cert[i] = 1;
            cert[m] = -lo;
        } else {
            continue;
        }
        result.verdict = Verdict::infeasible;
        result.certificate = std::move(cert);
        result.method = "range";
        return result;
    }

    auto l = detail::layout(problem, atoms);
    auto b = detail::rhs(problem);
    auto column = [&](std::size_t j, std::vector<Rational>& out) {
        detail::fill_column(problem, monomials, lattice, l, j, out);
    };
    PhaseOneResult lp = exact_phase_one(l.rows, l.cols(), column, b);
    result.method = "simplex";
    if (lp.feasible) {
        result.verdict = Verdict::feasible;
        result.witness = detail::witness_from(problem, lattice, std::span(lp.primal).first(atoms));
        if (!satisfies(problem, *result.witness)) throw std::logic_error("simplex witness fails its constraints");
    } else {
        result.verdict = Verdict::infeasible;
        result.certificate = std::move(lp.farkas);
        if (!verify_certificate(problem, *result.certificate, options))
            throw std::logic_error("simplex certificate does not verify");
    }
    return result;
}

/// Independent decision procedure used to cross-check `decide`.
///
/// Duplicate columns are merged, then membership of the right-hand side in
/// the cone of columns is settled by Fourier-Motzkin elimination of the
/// Farkas alternative. No pivoting code is shared with `decide`.
inline FeasibilityResult brute_force_oracle(const MomentProblem& problem, std::size_t atom_cap = oracle_atom_cap) {
    validate(problem);
    auto monomials = detail::resolve_all(problem);
    std::size_t atoms = detail::checked_atom_count(problem, atom_cap);
    AtomLattice lattice(problem.variables);
    auto l = detail::layout(problem, atoms);

    std::vector<std::vector<Rational>> distinct;
    std::vector<std::size_t> representative;  // distinct column -> first original column
    std::map<std::vector<Rational>, std::size_t> index;
    std::vector<Rational> column;
    for (std::size_t j = 0; j < l.cols(); ++j) {
        detail::fill_column(problem, monomials, lattice, l, j, column);
        if (index.emplace(column, distinct.size()).second) {
            distinct.push_back(column);
            representative.push_back(j);
        }
    }

    ConeMembership cone = cone_membership(distinct, detail::rhs(problem));
    FeasibilityResult result;
    result.method = "fourier-motzkin";
    if (cone.member) {
        std::vector<Rational> mass(atoms, Rational(0));
        for (std::size_t k = 0; k < distinct.size(); ++k)
            if (representative[k] < atoms) mass[representative[k]] += cone.weights[k];
        result.verdict = Verdict::feasible;
        result.witness = detail::witness_from(problem, lattice, mass);
        if (!satisfies(problem, *result.witness)) throw std::logic_error("oracle witness fails its constraints");
    } else {
        result.verdict = Verdict::infeasible;
        result.certificate = std::move(cone.separator);
        if (!verify_certificate(problem, *result.certificate, {atom_cap}))
            throw std::logic_error("oracle certificate does not verify");
    }
    return result;
}

/// Per-support-position +1/-1 image of one variable.
struct SignMap {
    std::string variable;
    std::vector<int> signs;
};

enum class ReductionVerdict { original_infeasible, inconclusive, underdetermined };

inline const char* to_string(ReductionVerdict v) {
    switch (v) {
        case ReductionVerdict::original_infeasible: return "original-infeasible";
        case ReductionVerdict::inconclusive: return "inconclusive";
        case ReductionVerdict::underdetermined: return "underdetermined";
    }
    return "?";
}

struct ReductionResult {
    ReductionVerdict verdict = ReductionVerdict::inconclusive;
    std::optional<MomentProblem> mapped;
    std::optional<FeasibilityResult> mapped_result;
    std::string detail;
};

namespace detail {

/// Coefficients c_0..c_{k-1} of the interpolating polynomial through (x_i, y_i).
inline std::vector<Rational> interpolate(std::span<const Rational> xs, std::span<const Rational> ys) {
    const std::size_t k = xs.size();
    std::vector<Rational> coeffs(k, Rational(0));
    for (std::size_t i = 0; i < k; ++i) {
        // basis polynomial prod_{j != i} (x - x_j) / (x_i - x_j)
        std::vector<Rational> basis{Rational(1)};
        Rational denom = 1;
        for (std::size_t j = 0; j < k; ++j) {
            if (j == i) continue;
            std::vector<Rational> next(basis.size() + 1, Rational(0));
            for (std::size_t d = 0; d < basis.size(); ++d) {
                next[d + 1] += basis[d];
                next[d] -= basis[d] * xs[j];
            }
            basis = std::move(next);
            denom *= xs[i] - xs[j];
        }
        for (std::size_t d = 0; d < basis.size(); ++d) coeffs[d] += ys[i] * basis[d] / denom;
    }
    return coeffs;
}

} // namespace detail

/// Maps each variable through a +1/-1 function and decides the induced problem.
///
/// The mapped mean of every variable and the mapped product moment of every
/// pair that shares a constraint in `problem` are expanded as polynomials in
/// the original moments. A missing original moment yields `underdetermined`;
/// an infeasible mapped problem proves the original infeasible; a feasible
/// one proves nothing.
inline ReductionResult reduce_then_test(const MomentProblem& problem, std::span<const SignMap> signmaps,
                                        const DecideOptions& options = {}) {
    validate(problem);
    const std::size_t n = problem.variables.size();
    std::vector<std::vector<Rational>> poly(n);
    std::vector<char> mapped(n, 0);
    for (const auto& sm : signmaps) {
        std::optional<std::size_t> k;
        for (std::size_t i = 0; i < n; ++i)
            if (problem.variables[i].name == sm.variable) k = i;
        if (!k) throw ConstraintMismatch("sign map for unknown variable '" + sm.variable + "'");
        if (mapped[*k]) throw ValidationError("two sign maps for '" + sm.variable + "'");
        const auto& support = problem.variables[*k].support;
        if (sm.signs.size() != support.size())
            throw ValidationError("sign map for '" + sm.variable + "' is not total on its support");
        std::vector<Rational> ys;
        for (int s : sm.signs) {
            if (s != 1 && s != -1) throw ValidationError("sign map values must be +1 or -1");
            ys.emplace_back(s);
        }
        poly[*k] = detail::interpolate(support, ys);
        mapped[*k] = 1;
    }
    for (std::size_t i = 0; i < n; ++i)
        if (!mapped[i]) throw ValidationError("no sign map for '" + problem.variables[i].name + "'");

    std::map<Monomial, Rational> known;
    for (const auto& c : problem.constraints)
        if (c.relation == Relation::equal) known.emplace(c.exponents, c.target);

    ReductionResult result;
    auto moment = [&](const Monomial& m) -> std::optional<Rational> {
        if (m.empty()) return Rational(1);
        auto it = known.find(m);
        if (it == known.end()) return std::nullopt;
        return it->second;
    };
    auto describe = [](const Monomial& m) {
        std::string s = "E(";
        for (const auto& [name, e] : m) s += name + (e > 1 ? "^" + std::to_string(e) : "") + " ";
        if (s.back() == ' ') s.pop_back();
        return s + ")";
    };
    // E(f_u(U) f_v(V)) expanded over the interpolating coefficients
    auto mapped_moment = [&](std::vector<std::size_t> vars) -> std::optional<Rational> {
        Rational total = 0;
        std::vector<std::size_t> degree(vars.size(), 0);
        for (;;) {
            Rational coeff = 1;
            Monomial m;
            for (std::size_t t = 0; t < vars.size(); ++t) {
                coeff *= poly[vars[t]][degree[t]];
                if (degree[t] > 0) m[problem.variables[vars[t]].name] = static_cast<unsigned>(degree[t]);
            }
            if (coeff != 0) {
                auto e = moment(m);
                if (!e) {
                    result.detail = "mapped moment needs " + describe(m) + ", which is not given";
                    return std::nullopt;
                }
                total += coeff * *e;
            }
            std::size_t t = 0;
            for (; t < vars.size(); ++t) {
                if (++degree[t] < poly[vars[t]].size()) break;
                degree[t] = 0;
            }
            if (t == vars.size()) break;
        }
        return total;
    };

    MomentProblem reduced;
    reduced.label = problem.label.empty() ? "sign-reduced" : problem.label + " (sign-reduced)";
    for (const auto& v : problem.variables) reduced.variables.push_back(pm1_variable(v.name));
    for (std::size_t i = 0; i < n; ++i) {
        auto e = mapped_moment({i});
        if (!e) {
            result.verdict = ReductionVerdict::underdetermined;
            return result;
        }
        reduced.constraints.push_back({{{problem.variables[i].name, 1}}, *e, Relation::equal});
    }
    std::set<std::pair<std::size_t, std::size_t>> pairs;
    for (const auto& c : problem.constraints) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < n; ++i)
            if (c.exponents.count(problem.variables[i].name)) members.push_back(i);
        for (std::size_t a = 0; a < members.size(); ++a)
            for (std::size_t b = a + 1; b < members.size(); ++b) pairs.emplace(members[a], members[b]);
    }
    for (const auto& [i, j] : pairs) {
        auto e = mapped_moment({i, j});
        if (!e) {
            result.verdict = ReductionVerdict::underdetermined;
            return result;
        }
        reduced.constraints.push_back(
            {{{problem.variables[i].name, 1}, {problem.variables[j].name, 1}}, *e, Relation::equal});
    }

    result.mapped_result = decide(reduced, options);
    result.mapped = std::move(reduced);
    if (result.mapped_result->feasible()) {
        result.verdict = ReductionVerdict::inconclusive;
        result.detail = "mapped problem is feasible; the reduction only proves infeasibility";
    } else {
        result.verdict = ReductionVerdict::original_infeasible;
        result.detail = "mapped problem is infeasible, so the original moments admit no joint distribution";
    }
    return result;
}

} // namespace hvt
