#pragma once

#include "hvt/rational.hpp"
#include "hvt/surd.hpp"

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace hvt {

/// A constraint or monomial names a variable the distribution does not have.
class ConstraintMismatch : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Named observable with a strictly increasing finite rational support.
struct FiniteRandomVariable {
    std::string name;
    std::vector<Rational> support;

    FiniteRandomVariable() = default;
    FiniteRandomVariable(std::string n, std::vector<Rational> s) : name(std::move(n)), support(std::move(s)) {
        if (name.empty()) throw ValidationError("variable name must not be empty");
        if (support.empty()) throw ValidationError("variable '" + name + "' has an empty support");
        for (std::size_t i = 1; i < support.size(); ++i)
            if (!(support[i - 1] < support[i]))
                throw ValidationError("support of '" + name + "' is not strictly increasing");
    }

    std::size_t size() const { return support.size(); }

    std::optional<std::size_t> index_of(const Rational& value) const {
        for (std::size_t i = 0; i < support.size(); ++i)
            if (support[i] == value) return i;
        return std::nullopt;
    }

    friend bool operator==(const FiniteRandomVariable&, const FiniteRandomVariable&) = default;
};

/// The +1/-1 observable most of the inequalities are about.
inline FiniteRandomVariable pm1_variable(std::string name) {
    return FiniteRandomVariable(std::move(name), {Rational(-1), Rational(1)});
}

/// Support indices, one per variable, in declaration order.
using Atom = std::vector<std::size_t>;

/// Variable name to positive integer exponent.
using Monomial = std::map<std::string, unsigned>;

/// Mixed-radix enumeration of every atom over a list of variables.
class AtomLattice {
public:
    explicit AtomLattice(std::span<const FiniteRandomVariable> variables) {
        radices_.reserve(variables.size());
        for (const auto& v : variables) radices_.push_back(v.size());
    }

    /// Number of atoms, or nullopt when it exceeds `cap`.
    std::optional<std::size_t> count(std::size_t cap = static_cast<std::size_t>(-1)) const {
        std::size_t n = 1;
        for (std::size_t r : radices_) {
            if (r != 0 && n > cap / r) return std::nullopt;
            n *= r;
        }
        if (n > cap) return std::nullopt;
        return n;
    }

    /// Atom with the given mixed-radix index; the last variable varies fastest.
    Atom decode(std::size_t index) const {
        Atom atom(radices_.size());
        for (std::size_t k = radices_.size(); k-- > 0;) {
            atom[k] = index % radices_[k];
            index /= radices_[k];
        }
        return atom;
    }

    std::size_t encode(const Atom& atom) const {
        std::size_t index = 0;
        for (std::size_t k = 0; k < radices_.size(); ++k) index = index * radices_[k] + atom[k];
        return index;
    }

    template <class Fn>
    void for_each(Fn&& fn) const {
        auto total = count();
        if (!total) throw SizeError("atom lattice too large to enumerate");
        Atom atom(radices_.size(), 0);
        for (std::size_t i = 0; i < *total; ++i) {
            fn(static_cast<const Atom&>(atom));
            for (std::size_t k = radices_.size(); k-- > 0;) {
                if (++atom[k] < radices_[k]) break;
                atom[k] = 0;
            }
        }
    }

    const std::vector<std::size_t>& radices() const { return radices_; }

private:
    std::vector<std::size_t> radices_;
};

/// Exact probability assignment over the atoms of several variables.
///
/// Only atoms with positive mass are stored. Masses are nonnegative and sum
/// to exactly one; an absent atom has probability zero.
class JointDistribution {
public:
    JointDistribution() = default;

    JointDistribution(std::vector<FiniteRandomVariable> variables, const std::map<Atom, Rational>& mass)
        : variables_(std::move(variables)) {
        std::set<std::string> names;
        for (const auto& v : variables_)
            if (!names.insert(v.name).second) throw ValidationError("duplicate variable name '" + v.name + "'");
        Rational total = 0;
        for (const auto& [atom, p] : mass) {
            check_atom(atom);
            if (p < 0) throw ValidationError("negative probability " + to_string(p));
            total += p;
            if (p != 0) mass_.emplace(atom, p);
        }
        if (total != 1) throw ValidationError("probabilities sum to " + to_string(total) + ", not 1");
    }

    /// Builds a distribution from value tuples instead of support indices.
    static JointDistribution from_values(std::vector<FiniteRandomVariable> variables,
                                         const std::vector<std::pair<std::vector<Rational>, Rational>>& entries) {
        std::map<Atom, Rational> mass;
        for (const auto& [values, p] : entries) {
            if (values.size() != variables.size()) throw ValidationError("value tuple has the wrong arity");
            Atom atom(values.size());
            for (std::size_t k = 0; k < values.size(); ++k) {
                auto idx = variables[k].index_of(values[k]);
                if (!idx)
                    throw ValidationError(to_string(values[k]) + " is not in the support of '" + variables[k].name + "'");
                atom[k] = *idx;
            }
            mass[atom] += p;
        }
        return JointDistribution(std::move(variables), mass);
    }

    static JointDistribution point_mass(std::vector<FiniteRandomVariable> variables, const Atom& atom) {
        return JointDistribution(std::move(variables), {{atom, Rational(1)}});
    }

    static JointDistribution uniform(std::vector<FiniteRandomVariable> variables) {
        AtomLattice lattice(variables);
        auto n = lattice.count(1u << 24);
        if (!n) throw SizeError("uniform distribution over too many atoms");
        std::map<Atom, Rational> mass;
        Rational p(1, static_cast<long>(*n));
        lattice.for_each([&](const Atom& a) { mass.emplace(a, p); });
        return JointDistribution(std::move(variables), mass);
    }

    const std::vector<FiniteRandomVariable>& variables() const { return variables_; }
    const std::map<Atom, Rational>& masses() const { return mass_; }
    AtomLattice lattice() const { return AtomLattice(variables_); }

    Rational probability(const Atom& atom) const {
        auto it = mass_.find(atom);
        return it == mass_.end() ? Rational(0) : it->second;
    }

    std::optional<std::size_t> find(const std::string& name) const {
        for (std::size_t k = 0; k < variables_.size(); ++k)
            if (variables_[k].name == name) return k;
        return std::nullopt;
    }

    std::size_t index_of(const std::string& name) const {
        auto k = find(name);
        if (!k) throw ConstraintMismatch("unknown variable '" + name + "'");
        return *k;
    }

    const Rational& value(const Atom& atom, std::size_t variable) const {
        return variables_[variable].support[atom[variable]];
    }

    std::vector<Rational> values(const Atom& atom) const {
        std::vector<Rational> out;
        out.reserve(atom.size());
        for (std::size_t k = 0; k < atom.size(); ++k) out.push_back(value(atom, k));
        return out;
    }

    friend bool operator==(const JointDistribution&, const JointDistribution&) = default;

private:
    void check_atom(const Atom& atom) const {
        if (atom.size() != variables_.size()) throw ValidationError("atom has the wrong arity");
        for (std::size_t k = 0; k < atom.size(); ++k)
            if (atom[k] >= variables_[k].size())
                throw ValidationError("atom index out of range for variable '" + variables_[k].name + "'");
    }

    std::vector<FiniteRandomVariable> variables_;
    std::map<Atom, Rational> mass_;
};

/// Resolved monomial: (variable position, exponent) pairs.
using ResolvedMonomial = std::vector<std::pair<std::size_t, unsigned>>;

inline ResolvedMonomial resolve_monomial(std::span<const FiniteRandomVariable> variables, const Monomial& monomial) {
    if (monomial.empty()) throw ValidationError("a moment needs at least one variable");
    ResolvedMonomial resolved;
    for (const auto& [name, exponent] : monomial) {
        if (exponent == 0) throw ValidationError("exponent of '" + name + "' must be positive");
        std::optional<std::size_t> position;
        for (std::size_t k = 0; k < variables.size(); ++k)
            if (variables[k].name == name) position = k;
        if (!position) throw ConstraintMismatch("unknown variable '" + name + "' in moment");
        resolved.emplace_back(*position, exponent);
    }
    return resolved;
}

inline Rational monomial_value(std::span<const FiniteRandomVariable> variables, const ResolvedMonomial& monomial,
                               const Atom& atom) {
    Rational v = 1;
    for (const auto& [k, e] : monomial) v *= pow(variables[k].support[atom[k]], e);
    return v;
}

/// Exact E(prod X_i^{e_i}).
inline Rational expectation(const JointDistribution& dist, const Monomial& monomial) {
    auto resolved = resolve_monomial(dist.variables(), monomial);
    Rational sum = 0;
    for (const auto& [atom, p] : dist.masses()) sum += p * monomial_value(dist.variables(), resolved, atom);
    return sum;
}

inline Rational mean(const JointDistribution& dist, const std::string& x) { return expectation(dist, {{x, 1}}); }

inline Rational variance(const JointDistribution& dist, const std::string& x) {
    Rational m = mean(dist, x);
    return expectation(dist, {{x, 2}}) - m * m;
}

inline Rational covariance(const JointDistribution& dist, const std::string& x, const std::string& y) {
    if (x == y) return variance(dist, x);
    return expectation(dist, {{x, 1}, {y, 1}}) - mean(dist, x) * mean(dist, y);
}

/// Pearson correlation, exact in Q(sqrt(Var X * Var Y)); nullopt when a variance is zero.
inline std::optional<Surd> correlation(const JointDistribution& dist, const std::string& x, const std::string& y) {
    Rational vx = variance(dist, x), vy = variance(dist, y);
    if (vx == 0 || vy == 0) return std::nullopt;
    Rational product = vx * vy;
    // cov / sqrt(vx vy) = cov * sqrt(vx vy) / (vx vy)
    return Surd::sqrt(product) * Surd(covariance(dist, x, y) / product);
}

/// Finite-valued function of all variables of a distribution.
struct NamedFunction {
    std::string name;
    std::function<Rational(std::span<const Rational>)> fn;
};

/// Distribution of (f_1(X), ..., f_k(X)); output supports are the realized ranges.
inline JointDistribution pushforward(const JointDistribution& dist, std::span<const NamedFunction> functions) {
    std::vector<std::vector<Rational>> images;
    std::vector<std::set<Rational>> ranges(functions.size());
    images.reserve(dist.masses().size());
    for (const auto& [atom, p] : dist.masses()) {
        auto values = dist.values(atom);
        std::vector<Rational> image;
        for (std::size_t k = 0; k < functions.size(); ++k) {
            if (!functions[k].fn) throw ValidationError("function '" + functions[k].name + "' is empty");
            Rational y;
            try {
                y = functions[k].fn(values);
            } catch (const Error&) {
                throw;
            } catch (const std::exception& e) {
                throw ValidationError("function '" + functions[k].name + "' failed: " + e.what());
            }
            ranges[k].insert(y);
            image.push_back(std::move(y));
        }
        images.push_back(std::move(image));
    }
    std::vector<FiniteRandomVariable> outputs;
    for (std::size_t k = 0; k < functions.size(); ++k)
        outputs.emplace_back(functions[k].name, std::vector<Rational>(ranges[k].begin(), ranges[k].end()));

    std::vector<std::pair<std::vector<Rational>, Rational>> entries;
    std::size_t i = 0;
    for (const auto& [atom, p] : dist.masses()) entries.emplace_back(images[i++], p);
    return JointDistribution::from_values(std::move(outputs), entries);
}

/// Marginal over the named variables, keeping their full supports.
inline JointDistribution marginal(const JointDistribution& dist, const std::vector<std::string>& names) {
    std::vector<std::size_t> positions;
    std::vector<FiniteRandomVariable> vars;
    for (const auto& n : names) {
        positions.push_back(dist.index_of(n));
        vars.push_back(dist.variables()[positions.back()]);
    }
    std::map<Atom, Rational> mass;
    for (const auto& [atom, p] : dist.masses()) {
        Atom sub;
        for (std::size_t k : positions) sub.push_back(atom[k]);
        mass[sub] += p;
    }
    return JointDistribution(std::move(vars), mass);
}

/// Set of atoms of a distribution's lattice.
struct Event {
    std::set<Atom> atoms;

    bool contains(const Atom& a) const { return atoms.count(a) != 0; }

    friend Event operator&(const Event& x, const Event& y) {
        Event r;
        for (const auto& a : x.atoms)
            if (y.contains(a)) r.atoms.insert(a);
        return r;
    }
    friend Event operator|(const Event& x, const Event& y) {
        Event r = x;
        r.atoms.insert(y.atoms.begin(), y.atoms.end());
        return r;
    }
};

/// Atoms of the full lattice on which `predicate(values)` holds.
template <class Predicate>
Event event_where(const JointDistribution& dist, Predicate&& predicate) {
    Event e;
    dist.lattice().for_each([&](const Atom& a) {
        if (predicate(dist.values(a))) e.atoms.insert(a);
    });
    return e;
}

inline Event sure_event(const JointDistribution& dist) {
    return event_where(dist, [](const auto&) { return true; });
}

inline Event complement(const JointDistribution& dist, const Event& e) {
    Event r;
    dist.lattice().for_each([&](const Atom& a) {
        if (!e.contains(a)) r.atoms.insert(a);
    });
    return r;
}

/// {X = c}
inline Event value_event(const JointDistribution& dist, const std::string& x, const Rational& c) {
    std::size_t k = dist.index_of(x);
    return event_where(dist, [&](const std::vector<Rational>& v) { return v[k] == c; });
}

/// {X = Y}
inline Event equal_event(const JointDistribution& dist, const std::string& x, const std::string& y) {
    std::size_t i = dist.index_of(x), j = dist.index_of(y);
    return event_where(dist, [&](const std::vector<Rational>& v) { return v[i] == v[j]; });
}

inline Rational probability(const JointDistribution& dist, const Event& e) {
    Rational p = 0;
    for (const auto& [atom, m] : dist.masses())
        if (e.contains(atom)) p += m;
    return p;
}

/// P(A | B), or nullopt when P(B) = 0.
inline std::optional<Rational> conditional(const JointDistribution& dist, const Event& a, const Event& b) {
    Rational pb = probability(dist, b);
    if (pb == 0) return std::nullopt;
    return probability(dist, a & b) / pb;
}

} // namespace hvt
