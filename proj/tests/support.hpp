#pragma once

// Seeded generators for randomized exact tests.

#include "hvt/feasibility.hpp"

#include <random>

namespace hvt::prop {

class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }
    std::mt19937_64& engine() { return rng_; }

    /// Distinct sorted support drawn from {-2, -1, -1/2, 0, 1/2, 1, 2}.
    FiniteRandomVariable variable(const std::string& name, int max_values = 3) {
        static const std::vector<Rational> pool{-2, -1, Rational(-1, 2), 0, Rational(1, 2), 1, 2};
        int k = integer(1, max_values);
        std::vector<Rational> picked = pool;
        std::shuffle(picked.begin(), picked.end(), rng_);
        picked.resize(static_cast<std::size_t>(k));
        std::sort(picked.begin(), picked.end());
        return {name, picked};
    }

    std::vector<FiniteRandomVariable> variables(int max_vars = 3, int max_values = 3) {
        std::vector<FiniteRandomVariable> out;
        int n = integer(1, max_vars);
        for (int i = 0; i < n; ++i) out.push_back(variable(std::string(1, static_cast<char>('X' + i % 3)) + (i >= 3 ? std::to_string(i) : ""), max_values));
        return out;
    }

    /// Random rational masses on a random subset of atoms (at most `max_atoms`).
    JointDistribution distribution(const std::vector<FiniteRandomVariable>& vars, std::size_t max_atoms = 64) {
        AtomLattice lattice(vars);
        std::size_t n = *lattice.count();
        std::size_t k = static_cast<std::size_t>(integer(1, static_cast<int>(std::min(n, max_atoms))));
        std::vector<std::size_t> idx(n);
        for (std::size_t i = 0; i < n; ++i) idx[i] = i;
        std::shuffle(idx.begin(), idx.end(), rng_);
        std::vector<long> weights;
        long total = 0;
        for (std::size_t i = 0; i < k; ++i) {
            weights.push_back(integer(1, 9));
            total += weights.back();
        }
        std::map<Atom, Rational> mass;
        for (std::size_t i = 0; i < k; ++i) mass[lattice.decode(idx[i])] = Rational(weights[i], total);
        return JointDistribution(vars, mass);
    }

    /// Random monomial over the variables with exponents 1..2.
    Monomial monomial(const std::vector<FiniteRandomVariable>& vars) {
        Monomial m;
        while (m.empty())
            for (const auto& v : vars)
                if (coin(0.5)) m[v.name] = static_cast<unsigned>(integer(1, 2));
        return m;
    }

    /// Small moment problem; targets come from a random distribution and are
    /// perturbed about half the time so both verdicts occur.
    MomentProblem problem(int max_vars = 3, int max_values = 3, int max_constraints = 4) {
        MomentProblem p;
        p.variables = variables(max_vars, max_values);
        auto dist = distribution(p.variables);
        int k = integer(0, max_constraints);
        std::set<Monomial> used;
        for (int i = 0; i < k; ++i) {
            auto m = monomial(p.variables);
            if (!used.insert(m).second) continue;
            Rational t = expectation(dist, m);
            if (coin(0.5)) t += Rational(integer(-4, 4), integer(1, 4));
            Relation rel = Relation::equal;
            if (coin(0.15)) rel = coin() ? Relation::at_least : Relation::at_most;
            p.constraints.push_back({m, t, rel});
        }
        return p;
    }

private:
    std::mt19937_64 rng_;
};

/// E(monomial) by enumerating every lattice atom, independent of the sparse map.
inline Rational lattice_expectation(const JointDistribution& d, const Monomial& m) {
    Rational total = 0;
    d.lattice().for_each([&](const Atom& a) {
        Rational p = d.probability(a);
        if (p == 0) return;
        Rational v = 1;
        for (const auto& [name, e] : m) v *= pow(d.value(a, d.index_of(name)), e);
        total += p * v;
    });
    return total;
}

} // namespace hvt::prop
