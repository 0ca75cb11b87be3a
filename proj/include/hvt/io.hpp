#pragma once

// Problem files (schema "hvt-problem/1") and report serialization.
// Exact values are written as "p/q" strings; quadratic surds as an object
// with the exact expression, minimal polynomial and a rational enclosure.

#include "hvt/feasibility.hpp"
#include "hvt/gaussian.hpp"
#include "hvt/ghz.hpp"
#include "hvt/hidden_variable.hpp"
#include "hvt/inequalities.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>
#include <string>

namespace hvt {

using json = nlohmann::json;

inline constexpr const char* problem_schema = "hvt-problem/1";
inline constexpr const char* report_schema = "hvt-report/1";

#ifndef HVT_VERSION
#define HVT_VERSION "1.0.0"
#endif

inline const char* engine_version() { return HVT_VERSION; }

/// Parsed problem file. `targets` keeps every equality target, including
/// irrational ones that cannot enter the LP; `exact` is false when any exist.
struct ProblemFile {
    json raw;
    std::string kind, label, anchor;

    MomentProblem problem;
    std::vector<std::pair<Monomial, Surd>> targets;
    bool exact = true;
    std::optional<JointDistribution> distribution;
    std::map<std::string, std::string> roles;
    std::map<std::string, std::vector<std::string>> contexts;

    GhzConfig ghz;

    GaussianSpec gaussian;
    std::vector<std::vector<std::optional<Rational>>> exact_correlations;  // rational reading of each entry

    std::optional<std::size_t> atom_cap;
    std::optional<double> tol;
    Rational spin_j = Rational(1, 2);
    bool normalized = false;
};

namespace detail {

inline void require_fields(const json& obj, const std::string& where, std::initializer_list<const char*> allowed,
                           std::initializer_list<const char*> required = {}) {
    if (!obj.is_object()) throw ValidationError(where + ": expected an object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, value] : obj.items())
        if (!ok.count(key)) throw ValidationError(where + ": unknown field '" + key + "'");
    for (const char* r : required)
        if (!obj.contains(r)) throw ValidationError(where + ": missing field '" + r + "'");
}

inline Rational rational_field(const json& v, const std::string& where) {
    if (v.is_number_integer()) return Rational(v.get<long long>());
    if (v.is_string()) {
        try {
            return parse_rational(v.get<std::string>());
        } catch (const ValidationError& e) {
            throw ValidationError(where + ": " + e.what());
        }
    }
    throw ValidationError(where + ": expected an integer or a \"p/q\" string");
}

inline Surd surd_field(const json& v, const std::string& where) {
    if (v.is_object()) {
        require_fields(v, where, {"neg_cos_deg"}, {"neg_cos_deg"});
        const auto& d = v.at("neg_cos_deg");
        if (!d.is_number_integer()) throw ValidationError(where + ".neg_cos_deg: expected an integer number of degrees");
        try {
            return neg_cos_degrees(d.get<long>());
        } catch (const DomainError& e) {
            throw ValidationError(where + ": " + e.what());
        }
    }
    return rational_field(v, where);
}

inline std::string string_field(const json& v, const std::string& where) {
    if (!v.is_string()) throw ValidationError(where + ": expected a string");
    return v.get<std::string>();
}

inline Relation relation_field(const json& v, const std::string& where) {
    auto s = string_field(v, where);
    if (s == "=" || s == "==") return Relation::equal;
    if (s == ">=") return Relation::at_least;
    if (s == "<=") return Relation::at_most;
    throw ValidationError(where + ": relation must be \"=\", \">=\" or \"<=\"");
}

inline int quarter_turns_field(const json& v, const std::string& where) {
    auto s = string_field(v, where);
    if (s == "0") return 0;
    if (s == "pi/2") return 1;
    if (s == "pi") return 2;
    if (s == "3pi/2") return 3;
    throw ValidationError(where + ": phase must be one of \"0\", \"pi/2\", \"pi\", \"3pi/2\"");
}

inline void parse_options(ProblemFile& pf, const json& o) {
    require_fields(o, "options", {"atom_cap", "tol", "spin_j", "normalized"});
    if (o.contains("atom_cap")) {
        if (!o["atom_cap"].is_number_unsigned()) throw ValidationError("options.atom_cap: expected a positive integer");
        pf.atom_cap = o["atom_cap"].get<std::size_t>();
    }
    if (o.contains("tol")) {
        if (!o["tol"].is_number() || o["tol"].get<double>() < 0) throw ValidationError("options.tol: expected a nonnegative number");
        pf.tol = o["tol"].get<double>();
    }
    if (o.contains("spin_j")) pf.spin_j = rational_field(o["spin_j"], "options.spin_j");
    if (o.contains("normalized")) {
        if (!o["normalized"].is_boolean()) throw ValidationError("options.normalized: expected a boolean");
        pf.normalized = o["normalized"].get<bool>();
    }
}

inline void parse_finite(ProblemFile& pf, const json& j) {
    require_fields(j, "problem",
                   {"schema", "kind", "label", "anchor", "variables", "constraints", "distribution", "roles", "contexts",
                    "higher_order", "options"},
                   {"variables"});
    const auto& vars = j["variables"];
    if (!vars.is_array() || vars.empty()) throw ValidationError("variables: expected a non-empty array");
    for (std::size_t i = 0; i < vars.size(); ++i) {
        std::string where = "variables[" + std::to_string(i) + "]";
        require_fields(vars[i], where, {"name", "support"}, {"name", "support"});
        auto name = string_field(vars[i]["name"], where + ".name");
        const auto& sup = vars[i]["support"];
        if (!sup.is_array()) throw ValidationError(where + ".support: expected an array");
        std::vector<Rational> values;
        for (std::size_t k = 0; k < sup.size(); ++k) values.push_back(rational_field(sup[k], where + ".support[" + std::to_string(k) + "]"));
        try {
            pf.problem.variables.emplace_back(name, values);
        } catch (const ValidationError& e) {
            throw ValidationError(where + ": " + e.what());
        }
    }
    if (j.contains("higher_order")) {
        if (!j["higher_order"].is_boolean()) throw ValidationError("higher_order: expected a boolean");
        pf.problem.higher_order = j["higher_order"].get<bool>();
    }
    if (j.contains("constraints")) {
        const auto& cs = j["constraints"];
        if (!cs.is_array()) throw ValidationError("constraints: expected an array");
        for (std::size_t i = 0; i < cs.size(); ++i) {
            std::string where = "constraints[" + std::to_string(i) + "]";
            require_fields(cs[i], where, {"moment", "target", "relation"}, {"moment", "target"});
            const auto& mom = cs[i]["moment"];
            if (!mom.is_object() || mom.empty()) throw ValidationError(where + ".moment: expected a non-empty object");
            Monomial m;
            for (const auto& [name, e] : mom.items()) {
                if (!e.is_number_integer() || e.get<long>() <= 0)
                    throw ValidationError(where + ".moment." + name + ": exponent must be a positive integer");
                m[name] = e.get<unsigned>();
            }
            Relation rel = cs[i].contains("relation") ? relation_field(cs[i]["relation"], where + ".relation") : Relation::equal;
            Surd target = surd_field(cs[i]["target"], where + ".target");
            if (target.is_rational()) {
                pf.problem.constraints.push_back({m, target.as_rational(), rel});
            } else {
                if (rel != Relation::equal) throw ValidationError(where + ": irrational targets must use \"=\"");
                pf.exact = false;
            }
            if (rel == Relation::equal) pf.targets.emplace_back(m, target);
        }
    }
    try {
        validate(pf.problem);
        for (const auto& [m, t] : pf.targets) resolve_monomial(pf.problem.variables, m);
    } catch (const ValidationError& e) {
        throw ValidationError(std::string("constraints: ") + e.what());
    }
    if (j.contains("distribution")) {
        const auto& d = j["distribution"];
        if (!d.is_array()) throw ValidationError("distribution: expected an array");
        std::vector<std::pair<std::vector<Rational>, Rational>> entries;
        for (std::size_t i = 0; i < d.size(); ++i) {
            std::string where = "distribution[" + std::to_string(i) + "]";
            require_fields(d[i], where, {"values", "p"}, {"values", "p"});
            if (!d[i]["values"].is_array()) throw ValidationError(where + ".values: expected an array");
            std::vector<Rational> values;
            for (std::size_t k = 0; k < d[i]["values"].size(); ++k)
                values.push_back(rational_field(d[i]["values"][k], where + ".values[" + std::to_string(k) + "]"));
            entries.emplace_back(std::move(values), rational_field(d[i]["p"], where + ".p"));
        }
        try {
            pf.distribution = JointDistribution::from_values(pf.problem.variables, entries);
        } catch (const ValidationError& e) {
            throw ValidationError(std::string("distribution: ") + e.what());
        }
    }
    std::set<std::string> names;
    for (const auto& v : pf.problem.variables) names.insert(v.name);
    if (j.contains("roles")) {
        if (!j["roles"].is_object()) throw ValidationError("roles: expected an object");
        for (const auto& [role, v] : j["roles"].items()) {
            auto name = string_field(v, "roles." + role);
            if (!names.count(name)) throw ValidationError("roles." + role + ": unknown variable '" + name + "'");
            pf.roles[role] = name;
        }
    }
    if (j.contains("contexts")) {
        if (!j["contexts"].is_object()) throw ValidationError("contexts: expected an object");
        for (const auto& [ctx, list] : j["contexts"].items()) {
            if (!list.is_array()) throw ValidationError("contexts." + ctx + ": expected an array of variable names");
            for (const auto& v : list) {
                auto name = string_field(v, "contexts." + ctx);
                if (!names.count(name)) throw ValidationError("contexts." + ctx + ": unknown variable '" + name + "'");
                pf.contexts[ctx].push_back(name);
            }
        }
    }
    pf.problem.label = pf.label;
}

inline void parse_ghz(ProblemFile& pf, const json& j) {
    require_fields(j, "problem", {"schema", "kind", "label", "anchor", "quadruples", "options"}, {"quadruples"});
    const auto& qs = j["quadruples"];
    if (qs.is_string() && qs.get<std::string>() == "standard") {
        pf.ghz = GhzConfig::standard();
    } else {
        if (!qs.is_array()) throw ValidationError("quadruples: expected \"standard\" or an array");
        for (std::size_t i = 0; i < qs.size(); ++i) {
            std::string where = "quadruples[" + std::to_string(i) + "]";
            require_fields(qs[i], where, {"phases", "target"}, {"phases"});
            const auto& ph = qs[i]["phases"];
            if (!ph.is_array() || ph.size() != 4) throw ValidationError(where + ".phases: expected four phases");
            GhzQuadruple q;
            for (std::size_t k = 0; k < 4; ++k) q.quarter_turns[k] = quarter_turns_field(ph[k], where + ".phases[" + std::to_string(k) + "]");
            if (qs[i].contains("target")) q.target_override = rational_field(qs[i]["target"], where + ".target");
            pf.ghz.quadruples.push_back(q);
        }
    }
    try {
        pf.problem = build_ghz_problem(pf.ghz);
    } catch (const ValidationError& e) {
        throw ValidationError(std::string("quadruples: ") + e.what());
    }
    for (const auto& c : pf.problem.constraints) pf.targets.emplace_back(c.exponents, c.target);
    pf.problem.label = pf.label;
}

inline void parse_gaussian(ProblemFile& pf, const json& j) {
    require_fields(j, "problem", {"schema", "kind", "label", "anchor", "names", "means", "variances", "correlations", "options"},
                   {"names", "correlations"});
    auto& g = pf.gaussian;
    const auto& names = j["names"];
    if (!names.is_array() || names.empty()) throw ValidationError("names: expected a non-empty array");
    for (std::size_t i = 0; i < names.size(); ++i) g.names.push_back(string_field(names[i], "names[" + std::to_string(i) + "]"));
    const std::size_t n = g.names.size();
    auto numbers = [&](const char* field, double fallback) {
        std::vector<double> out(n, fallback);
        if (!j.contains(field)) return out;
        const auto& a = j[field];
        if (!a.is_array() || a.size() != n) throw ValidationError(std::string(field) + ": expected " + std::to_string(n) + " entries");
        for (std::size_t i = 0; i < n; ++i)
            out[i] = to_double(rational_field(a[i], std::string(field) + "[" + std::to_string(i) + "]"));
        return out;
    };
    g.means = numbers("means", 0.0);
    g.variances = numbers("variances", 1.0);
    const auto& c = j["correlations"];
    if (!c.is_array() || c.size() != n) throw ValidationError("correlations: expected an " + std::to_string(n) + "x" + std::to_string(n) + " array");
    g.correlations = PartialCorrelationMatrix(n);
    pf.exact_correlations.assign(n, std::vector<std::optional<Rational>>(n));
    for (std::size_t i = 0; i < n; ++i) {
        if (!c[i].is_array() || c[i].size() != n) throw ValidationError("correlations[" + std::to_string(i) + "]: expected " + std::to_string(n) + " entries");
        for (std::size_t k = 0; k < n; ++k) {
            std::string where = "correlations[" + std::to_string(i) + "][" + std::to_string(k) + "]";
            if (c[i][k].is_null()) {
                if (i == k) throw ValidationError(where + ": diagonal entries must be 1");
                if (!c[k][i].is_null()) throw ValidationError(where + ": mask is not symmetric");
                continue;
            }
            Rational r = rational_field(c[i][k], where);
            if (i == k) {
                if (r != 1) throw ValidationError(where + ": diagonal entries must be 1");
                pf.exact_correlations[i][k] = r;
                continue;
            }
            if (c[k][i].is_null() || rational_field(c[k][i], where) != r) throw ValidationError(where + ": matrix is not symmetric");
            if (abs(r) > 1) throw ValidationError(where + ": correlation outside [-1, 1]");
            pf.exact_correlations[i][k] = r;
            if (i < k) g.correlations.set(i, k, to_double(r));
        }
    }
    try {
        g.validate();
    } catch (const ValidationError& e) {
        throw ValidationError(std::string("gaussian: ") + e.what());
    }
}

} // namespace detail

inline ProblemFile parse_problem(const json& j) {
    ProblemFile pf;
    pf.raw = j;
    if (!j.is_object()) throw ValidationError("problem: expected a JSON object");
    if (!j.contains("schema") || j["schema"] != problem_schema)
        throw ValidationError(std::string("schema: expected \"") + problem_schema + "\"");
    if (!j.contains("kind")) throw ValidationError("kind: missing field");
    pf.kind = detail::string_field(j["kind"], "kind");
    if (j.contains("label")) pf.label = detail::string_field(j["label"], "label");
    if (j.contains("anchor")) pf.anchor = detail::string_field(j["anchor"], "anchor");
    if (pf.kind == "finite-moment") detail::parse_finite(pf, j);
    else if (pf.kind == "ghz") detail::parse_ghz(pf, j);
    else if (pf.kind == "gaussian") detail::parse_gaussian(pf, j);
    else throw ValidationError("kind: expected \"finite-moment\", \"ghz\" or \"gaussian\", got \"" + pf.kind + "\"");
    if (j.contains("options")) detail::parse_options(pf, j["options"]);
    return pf;
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError(path + ": cannot open file");
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return json::parse(buf.str());
    } catch (const json::parse_error& e) {
        throw ValidationError(path + ": " + e.what());
    }
}

inline ProblemFile load_problem(const std::string& path) {
    json j = read_json_file(path);
    try {
        return parse_problem(j);
    } catch (const ValidationError& e) {
        throw ValidationError(path + ": " + e.what());
    }
}

// Serialization.

inline json to_json(const Rational& q) { return to_string(q); }

inline json to_json(const Surd& s) {
    if (s.is_rational()) return to_string(s.as_rational());
    auto box = s.enclosure();
    json poly = json::array();
    for (const auto& c : s.minimal_polynomial()) poly.push_back(to_string(c));
    return json{{"exact", s.str()}, {"poly", poly}, {"interval", {to_string(box.lo), to_string(box.hi)}}};
}

inline json monomial_json(const Monomial& m) {
    json out = json::object();
    for (const auto& [name, e] : m) out[name] = e;
    return out;
}

inline std::string monomial_string(const Monomial& m) {
    std::string s = "E(";
    bool first = true;
    for (const auto& [name, e] : m) {
        if (!first) s += " ";
        first = false;
        s += name;
        if (e != 1) s += "^" + std::to_string(e);
    }
    return s + ")";
}

inline json distribution_json(const JointDistribution& d) {
    json names = json::array();
    for (const auto& v : d.variables()) names.push_back(v.name);
    json atoms = json::array();
    for (const auto& [atom, p] : d.masses()) {
        json values = json::array();
        for (const auto& v : d.values(atom)) values.push_back(to_string(v));
        atoms.push_back({{"values", values}, {"p", to_string(p)}});
    }
    return {{"variables", names}, {"atoms", atoms}};
}

inline json certificate_json(const MomentProblem& problem, std::span<const Rational> cert, bool verified) {
    json rows = json::array();
    for (std::size_t i = 0; i < problem.constraints.size(); ++i) {
        const auto& c = problem.constraints[i];
        rows.push_back({{"moment", monomial_string(c.exponents)},
                        {"relation", to_string(c.relation)},
                        {"target", to_string(c.target)},
                        {"y", to_string(cert[i])}});
    }
    return {{"multipliers", rows}, {"normalization", to_string(cert.back())}, {"verified", verified}};
}

inline json result_json(const MomentProblem& problem, const FeasibilityResult& r) {
    json out{{"verdict", to_string(r.verdict)}, {"method", r.method}};
    if (r.witness) out["witness"] = distribution_json(*r.witness);
    if (r.certificate) out["certificate"] = certificate_json(problem, *r.certificate, verify_certificate(problem, *r.certificate));
    return out;
}

inline json inequality_json(const InequalityReport& r) {
    json inputs = json::object(), comps = json::object();
    for (const auto& [k, v] : r.inputs) inputs[k] = to_json(v);
    for (const auto& [k, v] : r.components) comps[k] = to_json(v);
    json out{{"id", r.id},
             {"verdict", r.satisfied ? "satisfied" : "violated"},
             {"slack", to_json(r.slack)},
             {"inputs", inputs},
             {"components", comps}};
    if (!r.notes.empty()) out["notes"] = r.notes;
    return out;
}

inline json model_json(const HiddenVariableModel& m) {
    json points = json::array();
    for (std::size_t i = 0; i < m.points().size(); ++i) {
        const auto& p = m.points()[i];
        json cond = json::object();
        for (std::size_t k = 0; k < m.variables().size(); ++k) {
            json dist = json::object();
            auto marg = m.conditional_marginal(i, k);
            for (std::size_t s = 0; s < marg.size(); ++s)
                if (marg[s] != 0) dist[to_string(m.variables()[k].support[s])] = to_string(marg[s]);
            cond[m.variables()[k].name] = dist;
        }
        points.push_back({{"label", p.label}, {"p", to_string(p.probability)}, {"conditionals", cond}});
    }
    return {{"points", points}, {"deterministic", m.deterministic()}, {"context_tables", m.context_tables().size()}};
}

inline json matrix_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(row);
    }
    return rows;
}

} // namespace hvt
