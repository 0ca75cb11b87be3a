#pragma once

// Second-order criteria for jointly Gaussian observables. This is the only
// floating-point part of the library; verdicts within tol of zero are labeled
// "boundary".

#include "hvt/inequalities.hpp"
#include "hvt/rational.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace hvt {

inline constexpr double default_tolerance = 1e-10;

/// Symmetric unit-diagonal matrix with a mask of known entries.
class PartialCorrelationMatrix {
public:
    explicit PartialCorrelationMatrix(std::size_t n) : values_(Eigen::MatrixXd::Identity(n, n)), known_(n, std::vector<char>(n, 0)) {
        for (std::size_t i = 0; i < n; ++i) known_[i][i] = 1;
    }

    static PartialCorrelationMatrix full(const Eigen::MatrixXd& m) {
        if (m.rows() != m.cols()) throw ValidationError("correlation matrix must be square");
        PartialCorrelationMatrix out(static_cast<std::size_t>(m.rows()));
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            if (m(i, i) != 1.0) throw ValidationError("diagonal entry " + std::to_string(i) + " is not 1");
            for (Eigen::Index j = 0; j < m.cols(); ++j)
                if (m(i, j) != m(j, i)) throw ValidationError("correlation matrix is not symmetric");
        }
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            for (Eigen::Index j = i + 1; j < m.cols(); ++j) out.set(static_cast<std::size_t>(i), static_cast<std::size_t>(j), m(i, j));
        return out;
    }

    /// 3x3 matrix over (X, Y, Z) from its off-diagonal entries.
    static PartialCorrelationMatrix three(double rxy, double rxz, double ryz) {
        PartialCorrelationMatrix out(3);
        out.set(0, 1, rxy);
        out.set(0, 2, rxz);
        out.set(1, 2, ryz);
        return out;
    }

    std::size_t size() const { return known_.size(); }

    void set(std::size_t i, std::size_t j, double r) {
        if (i == j) throw ValidationError("diagonal entries are fixed at 1");
        if (!(r >= -1.0 && r <= 1.0)) throw ValidationError("correlation " + std::to_string(r) + " is outside [-1, 1]");
        values_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = r;
        values_(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = r;
        known_[i][j] = known_[j][i] = 1;
    }

    bool known(std::size_t i, std::size_t j) const { return known_[i][j] != 0; }
    double at(std::size_t i, std::size_t j) const { return values_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)); }

    bool complete() const {
        for (const auto& row : known_)
            for (char k : row)
                if (!k) return false;
        return true;
    }

    /// Upper-triangle positions of unknown entries, row-major.
    std::vector<std::pair<std::size_t, std::size_t>> missing() const {
        std::vector<std::pair<std::size_t, std::size_t>> out;
        for (std::size_t i = 0; i < size(); ++i)
            for (std::size_t j = i + 1; j < size(); ++j)
                if (!known_[i][j]) out.emplace_back(i, j);
        return out;
    }

    /// Matrix with unknown entries set to 0.
    const Eigen::MatrixXd& matrix() const { return values_; }

private:
    Eigen::MatrixXd values_;
    std::vector<std::vector<char>> known_;
};

struct GaussianSpec {
    std::vector<std::string> names;
    std::vector<double> means;
    std::vector<double> variances;
    PartialCorrelationMatrix correlations{0};

    void validate() const {
        const std::size_t n = names.size();
        if (means.size() != n || variances.size() != n || correlations.size() != n)
            throw ValidationError("gaussian spec sizes disagree");
        for (std::size_t i = 0; i < n; ++i)
            if (!(variances[i] > 0)) throw ValidationError("variance of '" + names[i] + "' must be positive");
    }
};

struct EigenReport {
    bool feasible = false;
    bool boundary = false;  // |lambda_min| <= tol
    double lambda_min = 0;
    std::vector<double> eigenvalues;
    double residual = 0;  // max_k ||M v_k - lambda_k v_k||
};

inline EigenReport eigen_report(const Eigen::MatrixXd& m, double tol) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
    if (solver.info() != Eigen::Success) throw DomainError("symmetric eigensolver did not converge");
    EigenReport r;
    const auto& vals = solver.eigenvalues();
    const auto& vecs = solver.eigenvectors();
    for (Eigen::Index k = 0; k < vals.size(); ++k) {
        r.eigenvalues.push_back(vals(k));
        r.residual = std::max(r.residual, (m * vecs.col(k) - vals(k) * vecs.col(k)).norm());
    }
    r.lambda_min = vals.size() ? vals(0) : 1.0;
    r.feasible = r.lambda_min >= -tol;
    r.boundary = std::abs(r.lambda_min) <= tol;
    return r;
}

inline EigenReport eigenvalue_feasible(const PartialCorrelationMatrix& corr, double tol = default_tolerance) {
    if (!corr.complete()) throw ValidationError("eigenvalue test needs every correlation");
    return eigen_report(corr.matrix(), tol);
}

/// rxy^2 + rxz^2 + ryz^2 <= 2 rxy ryz rxz + 1, exact on rational inputs.
inline InequalityReport det_inequality_3var(const Rational& rxy, const Rational& rxz, const Rational& ryz) {
    std::vector<std::pair<std::string, Surd>> in{{"rho(X,Y)", rxy}, {"rho(X,Z)", rxz}, {"rho(Y,Z)", ryz}};
    detail::check_bound(in, 1);
    Rational lhs = rxy * rxy + rxz * rxz + ryz * ryz;
    Rational rhs = 2 * rxy * ryz * rxz + 1;
    auto r = detail::make_report("gaussian-det3", std::move(in), Surd(Rational(rhs - lhs)));
    r.components = {{"lhs", lhs}, {"rhs", rhs}};
    return r;
}

struct CompletionOptions {
    double tol = default_tolerance;
    std::size_t starts = 32;
    std::size_t steps = 200;
    std::uint64_t seed = 20240917;
};

struct CompletionReport {
    bool feasible = false;
    bool boundary = false;
    double lambda_min = 0;
    Eigen::MatrixXd completion;  // best found, also when infeasible
    std::optional<std::pair<double, double>> interval;  // closed-form range for the 3x3 one-missing case
    std::string method;
};

inline constexpr std::size_t completion_max_dim = 8;
inline constexpr std::size_t completion_max_missing = 6;

namespace detail {

inline double min_eigenvalue(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
    return solver.eigenvalues()(0);
}

inline Eigen::MatrixXd fill(const PartialCorrelationMatrix& corr, const std::vector<std::pair<std::size_t, std::size_t>>& holes,
                            const std::vector<double>& x) {
    Eigen::MatrixXd m = corr.matrix();
    for (std::size_t k = 0; k < holes.size(); ++k) {
        auto i = static_cast<Eigen::Index>(holes[k].first), j = static_cast<Eigen::Index>(holes[k].second);
        m(i, j) = m(j, i) = x[k];
    }
    return m;
}

} // namespace detail

/// Fills the missing correlations to maximize the smallest eigenvalue.
/// Multi-start compass search with shrinking steps; start 0 is all zeros and
/// the remaining starts are drawn from a seeded generator.
inline CompletionReport complete_correlations(const PartialCorrelationMatrix& corr, const CompletionOptions& options = {}) {
    const std::size_t n = corr.size();
    auto holes = corr.missing();
    if (n > completion_max_dim) throw SizeError("completion supports at most 8 variables");
    if (holes.size() > completion_max_missing) throw SizeError("completion supports at most 6 missing correlations");

    CompletionReport r;
    auto finish = [&](Eigen::MatrixXd m) {
        r.lambda_min = detail::min_eigenvalue(m);
        r.feasible = r.lambda_min >= -options.tol;
        r.boundary = std::abs(r.lambda_min) <= options.tol;
        r.completion = std::move(m);
        return r;
    };

    if (holes.empty()) {
        r.method = "none-missing";
        return finish(corr.matrix());
    }
    if (n == 3 && holes.size() == 1) {
        // det >= 0 with the other two entries fixed gives an interval for the hole
        auto [i, j] = holes[0];
        std::size_t k = 3 - i - j;
        double r1 = corr.at(i, k), r2 = corr.at(j, k);
        double rad = std::sqrt(std::max(0.0, (1 - r1 * r1) * (1 - r2 * r2)));
        double lo = r1 * r2 - rad, hi = r1 * r2 + rad;
        r.interval = {lo, hi};
        r.method = "closed-form";
        return finish(detail::fill(corr, holes, {std::clamp((lo + hi) / 2, -1.0, 1.0)}));
    }

    r.method = "compass-search";
    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::vector<double> best_x;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < options.starts; ++s) {
        std::vector<double> x(holes.size(), 0.0);
        if (s > 0)
            for (auto& v : x) v = unif(rng);
        double f = detail::min_eigenvalue(detail::fill(corr, holes, x));
        double step = 0.5;
        for (std::size_t it = 0; it < options.steps && step > 1e-13; ++it) {
            bool improved = false;
            for (std::size_t k = 0; k < x.size(); ++k)
                for (double dir : {1.0, -1.0}) {
                    auto y = x;
                    y[k] = std::clamp(y[k] + dir * step, -1.0, 1.0);
                    double g = detail::min_eigenvalue(detail::fill(corr, holes, y));
                    if (g > f) {
                        x = std::move(y);
                        f = g;
                        improved = true;
                    }
                }
            if (!improved) step /= 2;
        }
        if (f > best || (f == best && x < best_x)) {
            best = f;
            best_x = x;
        }
    }
    return finish(detail::fill(corr, holes, best_x));
}

struct HiddenVariableNote {
    std::vector<std::string> names;
    Eigen::MatrixXd correlation;
    double lambda_min = 0;
    std::string assertion;
};

/// Statement that a feasible Gaussian spec admits a factoring hidden variable.
/// Missing correlations are completed first.
inline HiddenVariableNote gaussian_hidden_variable_note(const GaussianSpec& spec, double tol = default_tolerance) {
    spec.validate();
    Eigen::MatrixXd m;
    double lmin;
    if (spec.correlations.complete()) {
        auto e = eigenvalue_feasible(spec.correlations, tol);
        if (!e.feasible) throw DomainError("correlation matrix has negative eigenvalue " + std::to_string(e.lambda_min));
        m = spec.correlations.matrix();
        lmin = e.lambda_min;
    } else {
        CompletionOptions o;
        o.tol = tol;
        auto c = complete_correlations(spec.correlations, o);
        if (!c.feasible) throw DomainError("no positive semidefinite completion found, best lambda_min " + std::to_string(c.lambda_min));
        m = c.completion;
        lmin = c.lambda_min;
    }
    HiddenVariableNote note{spec.names, m, lmin, ""};
    note.assertion =
        "the correlation matrix is positive semidefinite, so a jointly Gaussian distribution with these means, variances "
        "and correlations exists; its joint distribution yields a deterministic hidden variable with one global lambda "
        "distribution satisfying first and second order factorization";
    return note;
}

} // namespace hvt
