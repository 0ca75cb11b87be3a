#pragma once

#include "hvt/probability.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hvt {

/// One support point of a hidden variable: its probability and the joint
/// conditional distribution of the observables given that point.
struct LambdaPoint {
    std::string label;
    Rational probability;
    JointDistribution conditional;
};

/// Finite hidden variable. `context_tables` is empty for a model with one
/// global lambda distribution; otherwise it maps a context name to the lambda
/// probabilities (in point order) used in that context.
class HiddenVariableModel {
public:
    HiddenVariableModel(std::vector<FiniteRandomVariable> variables, std::vector<LambdaPoint> points,
                        std::map<std::string, std::vector<Rational>> context_tables = {})
        : variables_(std::move(variables)), points_(std::move(points)), contexts_(std::move(context_tables)) {
        if (points_.empty()) throw ValidationError("hidden variable needs at least one point");
        Rational total = 0;
        std::set<std::string> labels;
        for (const auto& p : points_) {
            if (p.probability < 0) throw ValidationError("negative lambda probability at " + p.label);
            if (!labels.insert(p.label).second) throw ValidationError("duplicate lambda label " + p.label);
            if (p.conditional.variables() != variables_)
                throw ValidationError("conditional at " + p.label + " is over different variables");
            total += p.probability;
        }
        if (total != 1) throw ValidationError("lambda probabilities sum to " + to_string(total));
        for (const auto& [name, table] : contexts_) {
            if (table.size() != points_.size()) throw ValidationError("context table '" + name + "' has the wrong length");
            Rational t = 0;
            for (const auto& q : table) {
                if (q < 0) throw ValidationError("negative probability in context table '" + name + "'");
                t += q;
            }
            if (t != 1) throw ValidationError("context table '" + name + "' does not sum to 1");
        }
    }

    const std::vector<FiniteRandomVariable>& variables() const { return variables_; }
    const std::vector<LambdaPoint>& points() const { return points_; }
    const std::map<std::string, std::vector<Rational>>& context_tables() const { return contexts_; }

    /// P(X_k = support[i] | lambda) for every i.
    std::vector<Rational> conditional_marginal(std::size_t point, std::size_t k) const {
        std::vector<Rational> out(variables_[k].size());
        for (const auto& [atom, p] : points_[point].conditional.masses()) out[atom[k]] += p;
        return out;
    }

    bool deterministic() const {
        for (const auto& p : points_)
            if (p.conditional.masses().size() != 1) return false;
        return true;
    }

    /// Mixture sum_lambda P(lambda) P(. | lambda).
    JointDistribution recompose() const {
        std::map<Atom, Rational> mass;
        for (const auto& p : points_)
            for (const auto& [atom, q] : p.conditional.masses()) mass[atom] += p.probability * q;
        return JointDistribution(variables_, mass);
    }

private:
    std::vector<FiniteRandomVariable> variables_;
    std::vector<LambdaPoint> points_;
    std::map<std::string, std::vector<Rational>> contexts_;
};

inline std::string atom_label(const JointDistribution& dist, const Atom& atom) {
    std::string s = "(";
    for (std::size_t k = 0; k < atom.size(); ++k) {
        if (k) s += ",";
        s += to_string(dist.value(atom, k));
    }
    return s + ")";
}

/// One lambda point per positive-mass atom, each carrying a point mass.
inline HiddenVariableModel construct_deterministic(const JointDistribution& dist) {
    std::vector<LambdaPoint> points;
    for (const auto& [atom, p] : dist.masses())
        points.push_back({atom_label(dist, atom), p, JointDistribution::point_mass(dist.variables(), atom)});
    return HiddenVariableModel(dist.variables(), std::move(points));
}

enum class FactorizationOrder { first, second, full };

inline const char* to_string(FactorizationOrder o) {
    switch (o) {
        case FactorizationOrder::first: return "1";
        case FactorizationOrder::second: return "2";
        case FactorizationOrder::full: return "full";
    }
    return "?";
}

struct FactorizationReport {
    bool holds = true;
    Rational discrepancy = 0;  // max absolute deviation over lambda points
    std::string worst_point;   // label where the maximum occurs, empty when zero
};

namespace detail {

inline Rational conditional_moment(const HiddenVariableModel& model, std::size_t point, std::size_t k, unsigned power) {
    auto marg = model.conditional_marginal(point, k);
    Rational e = 0;
    for (std::size_t i = 0; i < marg.size(); ++i) e += marg[i] * pow(model.variables()[k].support[i], power);
    return e;
}

inline Rational product_moment_gap(const HiddenVariableModel& model, std::size_t point, unsigned power) {
    const auto& cond = model.points()[point].conditional;
    Rational joint = 0;
    for (const auto& [atom, p] : cond.masses()) {
        Rational v = p;
        for (std::size_t k = 0; k < atom.size(); ++k) v *= pow(cond.value(atom, k), power);
        joint += v;
    }
    Rational product = 1;
    for (std::size_t k = 0; k < model.variables().size(); ++k) product *= conditional_moment(model, point, k, power);
    return abs(joint - product);
}

inline Rational full_gap(const HiddenVariableModel& model, std::size_t point) {
    const auto& vars = model.variables();
    std::vector<std::vector<Rational>> marg;
    for (std::size_t k = 0; k < vars.size(); ++k) marg.push_back(model.conditional_marginal(point, k));
    Rational worst = 0;
    const auto& cond = model.points()[point].conditional;
    AtomLattice(vars).for_each([&](const Atom& a) {
        Rational product = 1;
        for (std::size_t k = 0; k < a.size() && product != 0; ++k) product *= marg[k][a[k]];
        Rational gap = abs(cond.probability(a) - product);
        if (gap > worst) worst = gap;
    });
    return worst;
}

} // namespace detail

/// Order first checks E(X1...Xn|l) = prod E(Xi|l); second additionally checks
/// the same identity for squares; full checks the conditional pmf factorizes.
inline FactorizationReport verify_factorization(const HiddenVariableModel& model, FactorizationOrder order) {
    FactorizationReport r;
    for (std::size_t i = 0; i < model.points().size(); ++i) {
        Rational gap;
        if (order == FactorizationOrder::full) {
            gap = detail::full_gap(model, i);
        } else {
            gap = detail::product_moment_gap(model, i, 1);
            if (order == FactorizationOrder::second) {
                Rational g2 = detail::product_moment_gap(model, i, 2);
                if (g2 > gap) gap = g2;
            }
        }
        if (gap > r.discrepancy) {
            r.discrepancy = gap;
            r.worst_point = model.points()[i].label;
        }
    }
    r.holds = r.discrepancy == 0;
    return r;
}

/// True iff the lambda distribution does not depend on the measurement context.
/// Every declared context must map to the global lambda probabilities.
inline bool verify_noncontextuality(const HiddenVariableModel& model, const std::vector<std::string>& contexts) {
    const auto& tables = model.context_tables();
    for (const auto& c : contexts) {
        auto it = tables.find(c);
        if (it == tables.end()) continue;  // falls back to the global table
        for (std::size_t i = 0; i < model.points().size(); ++i)
            if (it->second[i] != model.points()[i].probability) return false;
    }
    return true;
}

struct ExchangeableCriterion {
    bool exists = false;
    std::optional<Rational> rho;  // nullopt when a variance is zero
};

namespace detail {

inline void check_exchangeable(const Rational& p11, const Rational& p10, const Rational& p01, const Rational& p00) {
    for (const auto* p : {&p11, &p10, &p01, &p00})
        if (*p < 0) throw ValidationError("negative probability " + to_string(*p));
    if (p11 + p10 + p01 + p00 != 1) throw ValidationError("probabilities do not sum to 1");
    if (p10 != p01) throw ValidationError("pair is not exchangeable: p10 != p01");
}

} // namespace detail

/// Nonnegative correlation test for an exchangeable pair of +-1 variables.
/// Both variables share the mean m = p11 - p00 and variance 1 - m^2, so rho
/// is rational.
inline ExchangeableCriterion exchangeable_symmetric_criterion(const Rational& p11, const Rational& p10,
                                                              const Rational& p01, const Rational& p00) {
    detail::check_exchangeable(p11, p10, p01, p00);
    Rational m = p11 - p00;
    Rational var = 1 - m * m;
    ExchangeableCriterion c;
    if (var == 0) return c;
    Rational exy = p11 + p00 - p10 - p01;
    c.rho = (exy - m * m) / var;
    c.exists = *c.rho >= 0;
    return c;
}

struct ExchangeableConstruction {
    ExchangeableCriterion criterion;
    std::optional<HiddenVariableModel> model;
    std::vector<std::pair<Rational, Rational>> mixture;  // (t_i, weight_i)
    std::string explanation;
};

inline std::string t_label(const Rational& t) { return "t=" + to_string(t); }

/// Builds lambda with at most two points; at point t the pair is independent
/// with P(X=1)=P(Y=1)=(1+t)/2. Matching E(X)=m and E(XY)=s needs a measure on
/// [-1,1] with mean m and second moment s. When v = s - m^2 >= 0 one anchor
/// may sit at t=1, which keeps everything rational.
inline ExchangeableConstruction exchangeable_symmetric_construct(const Rational& p11, const Rational& p10,
                                                                 const Rational& p01, const Rational& p00) {
    ExchangeableConstruction out;
    out.criterion = exchangeable_symmetric_criterion(p11, p10, p01, p00);
    if (!out.criterion.rho) {
        out.explanation = "correlation undefined: zero variance";
        return out;
    }
    if (!out.criterion.exists) {
        out.explanation = "negative correlation " + to_string(*out.criterion.rho) + ": no symmetric factoring mixture";
        return out;
    }
    Rational m = p11 - p00;
    Rational s = p11 + p00 - p10 - p01;
    Rational v = s - m * m;
    if (v == 0) {
        out.mixture = {{m, Rational(1)}};
    } else {
        // weight w at t=1 and 1-w at a: w + (1-w)a = m, w + (1-w)a^2 = s
        Rational d = 1 - m;
        Rational w = v / (v + d * d);
        Rational a = m - v / d;
        out.mixture = {{a, 1 - w}, {Rational(1), w}};
        std::sort(out.mixture.begin(), out.mixture.end());
    }
    std::vector<FiniteRandomVariable> vars{pm1_variable("X"), pm1_variable("Y")};
    std::vector<LambdaPoint> points;
    for (const auto& [t, w] : out.mixture) {
        Rational up = (1 + t) / 2, down = 1 - up;
        std::map<Atom, Rational> cond{{{0, 0}, down * down}, {{0, 1}, down * up}, {{1, 0}, up * down}, {{1, 1}, up * up}};
        points.push_back({t_label(t), w, JointDistribution(vars, cond)});
    }
    out.model.emplace(vars, std::move(points));
    out.explanation = "mixture of " + std::to_string(out.mixture.size()) + " independent symmetric point(s)";
    return out;
}

} // namespace hvt
