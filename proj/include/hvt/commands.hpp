#pragma once

// Command implementations shared by the hvt executable and the tests. Each
// returns a JSON report and the process exit status: 0 feasible or satisfied,
// 1 infeasible or violated, 2 error.

#include "hvt/io.hpp"

#include <string>
#include <vector>

namespace hvt {

struct RunOptions {
    std::optional<std::size_t> atom_cap;
    std::optional<double> tol;
    bool oracle = false;
};

struct CommandOutput {
    json report;
    int exit = 2;
};

namespace detail {

inline json report_header(const std::string& command, const ProblemFile& pf) {
    return {{"schema", report_schema},
            {"engine", {{"name", "hvt"}, {"version", engine_version()}}},
            {"command", command},
            {"input", pf.raw}};
}

inline DecideOptions decide_options(const ProblemFile& pf, const RunOptions& run) {
    DecideOptions o;
    if (pf.atom_cap) o.atom_cap = *pf.atom_cap;
    if (run.atom_cap) o.atom_cap = *run.atom_cap;
    return o;
}

inline double tolerance(const ProblemFile& pf, const RunOptions& run) {
    if (run.tol) return *run.tol;
    if (pf.tol) return *pf.tol;
    return default_tolerance;
}

inline void require_exact(const ProblemFile& pf) {
    if (!pf.exact) throw ValidationError("constraints: irrational targets cannot be decided exactly; use the inequalities command");
}

/// Gaussian verdict, completing missing entries first.
inline json gaussian_verdict(const ProblemFile& pf, double tol, bool& feasible) {
    const auto& corr = pf.gaussian.correlations;
    json out;
    if (corr.complete()) {
        auto e = eigenvalue_feasible(corr, tol);
        feasible = e.feasible;
        out = {{"method", "eigenvalues"}, {"lambda_min", e.lambda_min}, {"eigenvalues", e.eigenvalues}, {"residual", e.residual}};
        out["label"] = e.boundary ? "boundary" : e.feasible ? "feasible" : "infeasible";
    } else {
        CompletionOptions o;
        o.tol = tol;
        auto c = complete_correlations(corr, o);
        feasible = c.feasible;
        out = {{"method", c.method}, {"lambda_min", c.lambda_min}, {"completion", matrix_json(c.completion)}};
        if (c.interval) out["interval"] = {c.interval->first, c.interval->second};
        out["label"] = c.boundary ? "boundary" : c.feasible ? "feasible" : "infeasible";
    }
    out["verdict"] = feasible ? "feasible" : "infeasible";
    out["tol"] = tol;
    return out;
}

} // namespace detail

inline CommandOutput cmd_decide(const ProblemFile& pf, const RunOptions& run = {}) {
    CommandOutput out;
    out.report = detail::report_header("decide", pf);
    if (pf.kind == "gaussian") {
        bool feasible = false;
        out.report["module"] = "gaussian";
        out.report.update(detail::gaussian_verdict(pf, detail::tolerance(pf, run), feasible));
        out.exit = feasible ? 0 : 1;
        return out;
    }
    detail::require_exact(pf);
    auto result = decide(pf.problem, detail::decide_options(pf, run));
    out.report["module"] = pf.kind == "ghz" ? "ghz" : "feasibility";
    out.report.update(result_json(pf.problem, result));
    if (run.oracle) {
        AtomLattice lattice(pf.problem.variables);
        if (!lattice.count(oracle_atom_cap)) {
            out.report["oracle"] = {{"skipped", "atom count exceeds " + std::to_string(oracle_atom_cap)}};
        } else {
            auto o = brute_force_oracle(pf.problem);
            bool agrees = o.verdict == result.verdict;
            out.report["oracle"] = {{"verdict", to_string(o.verdict)}, {"method", o.method}, {"agrees", agrees}};
            if (!agrees) {
                out.exit = 2;
                return out;
            }
        }
    }
    out.exit = result.feasible() ? 0 : 1;
    return out;
}

inline CommandOutput cmd_hidden_variable(const ProblemFile& pf, const RunOptions& run = {}) {
    CommandOutput out;
    out.report = detail::report_header("hidden-variable", pf);
    out.report["module"] = "hidden_variable";
    if (pf.kind == "gaussian") {
        GaussianSpec spec = pf.gaussian;
        double tol = detail::tolerance(pf, run);
        bool feasible = false;
        out.report["gaussian"] = detail::gaussian_verdict(pf, tol, feasible);
        out.report["verdict"] = feasible ? "feasible" : "infeasible";
        if (!feasible) {
            out.exit = 1;
            return out;
        }
        auto note = gaussian_hidden_variable_note(spec, tol);
        out.report["note"] = {{"names", note.names},
                              {"correlation", matrix_json(note.correlation)},
                              {"lambda_min", note.lambda_min},
                              {"assertion", note.assertion}};
        out.exit = 0;
        return out;
    }
    detail::require_exact(pf);
    auto result = decide(pf.problem, detail::decide_options(pf, run));
    out.report.update(result_json(pf.problem, result));
    if (!result.feasible()) {
        out.exit = 1;
        return out;
    }
    JointDistribution joint = *result.witness;
    std::string source = "lp-witness";
    if (pf.distribution) {
        if (!satisfies(pf.problem, *pf.distribution))
            throw ValidationError("distribution: does not satisfy the constraints");
        joint = *pf.distribution;
        source = "file-distribution";
    }
    auto model = construct_deterministic(joint);
    json fact = json::object();
    for (auto order : {FactorizationOrder::first, FactorizationOrder::second, FactorizationOrder::full}) {
        auto f = verify_factorization(model, order);
        fact[to_string(order)] = {{"holds", f.holds}, {"discrepancy", to_string(f.discrepancy)}};
    }
    std::vector<std::string> contexts;
    for (const auto& [name, vars] : pf.contexts) contexts.push_back(name);
    out.report["joint_source"] = source;
    out.report["model"] = model_json(model);
    out.report["factorization"] = fact;
    out.report["noncontextual"] = verify_noncontextuality(model, contexts);
    out.report["recomposes"] = model.recompose() == joint;
    out.exit = 0;
    return out;
}

namespace detail {

/// Equality-target lookup with the +-1 convention E(X^2) = 1.
struct MomentTable {
    const ProblemFile& pf;

    std::optional<Surd> get(const Monomial& m) const {
        for (const auto& [mono, t] : pf.targets)
            if (mono == m) return t;
        if (m.size() == 1 && m.begin()->second % 2 == 0) {
            for (const auto& v : pf.problem.variables)
                if (v.name == m.begin()->first && v.support == pm1_variable(v.name).support) return Surd(1);
        }
        return std::nullopt;
    }

    Surd need(const Monomial& m, std::vector<std::string>& missing) const {
        auto v = get(m);
        if (!v) {
            missing.push_back(monomial_string(m));
            return Surd(0);
        }
        return *v;
    }
};

inline bool all_pm1(const ProblemFile& pf, const std::vector<std::string>& names) {
    for (const auto& n : names)
        for (const auto& v : pf.problem.variables)
            if (v.name == n && v.support != pm1_variable(n).support) return false;
    return true;
}

inline bool all_within_unit(const ProblemFile& pf, const std::vector<std::string>& names) {
    for (const auto& n : names)
        for (const auto& v : pf.problem.variables)
            if (v.name == n && (v.support.front() < -1 || v.support.back() > 1)) return false;
    return true;
}

inline std::string role(const ProblemFile& pf, const std::string& r) {
    auto it = pf.roles.find(r);
    return it == pf.roles.end() ? r : it->second;
}

inline bool has_variables(const ProblemFile& pf, const std::vector<std::string>& names) {
    for (const auto& n : names) {
        bool found = false;
        for (const auto& v : pf.problem.variables) found = found || v.name == n;
        if (!found) return false;
    }
    return true;
}

} // namespace detail

/// Evaluates every applicable inequality (or those listed in `which`) and
/// cross-checks each verdict against the LP when the targets are exact.
inline CommandOutput cmd_inequalities(const ProblemFile& pf, const std::vector<std::string>& which = {},
                                      const RunOptions& run = {}) {
    CommandOutput out;
    out.report = detail::report_header("inequalities", pf);
    out.report["module"] = pf.kind == "gaussian" ? "gaussian" : "inequality_suite";
    std::vector<InequalityReport> rows;
    std::vector<std::string> notes;
    std::optional<bool> reference;  // LP or eigenvalue verdict
    std::string reference_method;

    if (pf.kind == "gaussian") {
        bool feasible = false;
        out.report["gaussian"] = detail::gaussian_verdict(pf, detail::tolerance(pf, run), feasible);
        reference = feasible;
        reference_method = "eigenvalues";
        const auto& e = pf.exact_correlations;
        if (e.size() == 3 && e[0][1] && e[0][2] && e[1][2]) rows.push_back(det_inequality_3var(*e[0][1], *e[0][2], *e[1][2]));
        else notes.push_back("gaussian-det3 needs a fully known 3x3 matrix");
    } else if (pf.kind == "finite-moment") {
        detail::MomentTable table{pf};
        std::vector<std::string> missing;
        const std::string X = detail::role(pf, "X"), Y = detail::role(pf, "Y"), Z = detail::role(pf, "Z");
        const std::string A = detail::role(pf, "A"), Ap = detail::role(pf, "Ap"), B = detail::role(pf, "B"), Bp = detail::role(pf, "Bp");
        auto prod = [](const std::string& a, const std::string& b) { return Monomial{{a, 1}, {b, 1}}; };
        if (detail::has_variables(pf, {X, Y, Z})) {
            Surd exy = table.need(prod(X, Y), missing), eyz = table.need(prod(Y, Z), missing), exz = table.need(prod(X, Z), missing);
            auto x0 = table.get({{X, 1}}), y0 = table.get({{Y, 1}}), z0 = table.get({{Z, 1}});
            const bool means = x0 && y0 && z0;
            const bool zero_means = means && x0->sign() == 0 && y0->sign() == 0 && z0->sign() == 0;
            if (!missing.empty()) throw ValidationError("inequalities: missing moments " + json(missing).dump());
            if (detail::all_pm1(pf, {X, Y, Z})) {
                if (zero_means) rows.push_back(eval_triple_pm1(exy, eyz, exz));
                else notes.push_back("pm1-triple needs zero means");
                if (means) {
                    if (abs(*x0) < 1 && abs(*y0) < 1 && abs(*z0) < 1)
                        rows.push_back(eval_generalized_lower(exy, eyz, exz, *x0, *y0, *z0));
                    else notes.push_back("generalized-lower needs |mean| < 1");
                }
                rows.push_back(eval_bell_original(exy, eyz, exz));
            }
            if (means && !zero_means) {
                auto cov = [&](const std::string& a, const std::string& b, const Surd& e) {
                    return e - *table.get({{a, 1}}) * *table.get({{b, 1}});
                };
                rows.push_back(eval_triple_form(cov(X, Y, exy), cov(Y, Z, eyz), cov(X, Z, exz), "triple-form:covariance"));
            } else if (zero_means && !detail::all_pm1(pf, {X, Y, Z})) {
                rows.push_back(eval_triple_form(exy, eyz, exz, "triple-form:covariance"));
            }
            auto vx = table.get({{X, 2}}), vy = table.get({{Y, 2}}), vz = table.get({{Z, 2}});
            if (means && vx && vy && vz && !(zero_means && detail::all_pm1(pf, {X, Y, Z}))) {
                try {
                    auto var = [&](const Surd& second, const Surd& m) { return (second - m * m).as_rational(); };
                    Rational sx = var(*vx, *x0), sy = var(*vy, *y0), sz = var(*vz, *z0);
                    if (sx == 0 || sy == 0 || sz == 0) throw DomainError("zero variance");
                    auto rho = [&](const Surd& c, const Rational& va, const Rational& vb) {
                        return Surd::sqrt(va * vb) * (c / Rational(va * vb));
                    };
                    Surd rxy = rho(exy - *x0 * *y0, sx, sy), ryz = rho(eyz - *y0 * *z0, sy, sz), rxz = rho(exz - *x0 * *z0, sx, sz);
                    rows.push_back(eval_triple_form(rxy, ryz, rxz, "triple-form:correlation"));
                } catch (const DomainError& e) {
                    notes.push_back(std::string("triple-form:correlation not evaluated: ") + e.what());
                }
            }
        }
        if (detail::has_variables(pf, {A, Ap, B, Bp})) {
            Surd eab = table.need(prod(A, B), missing), eabp = table.need(prod(A, Bp), missing);
            Surd eapb = table.need(prod(Ap, B), missing), eapbp = table.need(prod(Ap, Bp), missing);
            if (!missing.empty()) throw ValidationError("inequalities: missing moments " + json(missing).dump());
            ChshOptions o{pf.spin_j, pf.normalized};
            rows.push_back(eval_chsh(eab, eabp, eapb, eapbp, o));
            if (detail::all_within_unit(pf, {A, Ap, B, Bp})) rows.push_back(eval_spin1_strengthened(eab, eabp, eapb, eapbp));
        }
        if (pf.exact) {
            auto options = detail::decide_options(pf, run);
            if (AtomLattice(pf.problem.variables).count(options.atom_cap)) {
                reference = decide(pf.problem, options).feasible();
                reference_method = "lp";
            } else {
                notes.push_back("cross-check skipped: atom cap exceeded");
            }
        } else {
            notes.push_back("cross-check skipped: irrational targets");
        }
    } else {
        throw ValidationError("inequalities: no closed-form inequality applies to kind \"" + pf.kind + "\"");
    }

    if (!which.empty()) {
        std::vector<InequalityReport> kept;
        for (const auto& id : which) {
            bool found = false;
            for (const auto& r : rows)
                if (r.id == id) {
                    kept.push_back(r);
                    found = true;
                }
            if (!found) throw ValidationError("inequalities: '" + id + "' does not apply to this problem");
        }
        rows = std::move(kept);
    }
    if (rows.empty()) throw ValidationError("inequalities: no inequality applies to this problem");

    json table = json::object();
    bool all_satisfied = true;
    for (const auto& r : rows) {
        json row = inequality_json(r);
        if (reference) {
            bool agrees = r.satisfied == *reference;
            row["cross_check"] = {{"method", reference_method}, {"feasible", *reference}, {"agrees", agrees}};
        }
        all_satisfied = all_satisfied && r.satisfied;
        table[r.id] = row;
    }
    out.report["inequalities"] = table;
    if (reference) out.report["reference"] = {{"method", reference_method}, {"verdict", *reference ? "feasible" : "infeasible"}};
    if (!notes.empty()) out.report["notes"] = notes;
    out.report["verdict"] = all_satisfied ? "satisfied" : "violated";
    out.exit = all_satisfied ? 0 : 1;
    return out;
}

/// Runs a problem command on a file, mapping every error to exit status 2.
inline CommandOutput run_problem_command(const std::string& command, const std::string& path, const RunOptions& run = {},
                                         const std::vector<std::string>& which = {}) {
    try {
        auto pf = load_problem(path);
        if (command == "decide") return cmd_decide(pf, run);
        if (command == "hidden-variable") return cmd_hidden_variable(pf, run);
        if (command == "inequalities") return cmd_inequalities(pf, which, run);
        throw ValidationError("unknown command '" + command + "'");
    } catch (const std::exception& e) {
        CommandOutput out;
        out.report = {{"schema", report_schema},
                      {"engine", {{"name", "hvt"}, {"version", engine_version()}}},
                      {"command", command},
                      {"error", e.what()}};
        out.exit = 2;
        return out;
    }
}

} // namespace hvt
