#pragma once

#include "hvt/rational.hpp"

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace hvt {

/// Outcome of an exact phase-one solve of {A x = b, x >= 0}.
struct PhaseOneResult {
    bool feasible = false;
    std::vector<Rational> primal;  // x, when feasible
    std::vector<Rational> farkas;  // y with y.A_j >= 0 for all j and y.b < 0, when infeasible
    std::size_t pivots = 0;
};

/// Exact revised simplex, phase one only, with Bland's rule.
///
/// `column(j, out)` writes the `rows` entries of column j into `out`.
/// Rows with negative right-hand side are negated internally; artificial
/// variables are never allowed to re-enter once they leave the basis. On
/// infeasibility the Farkas vector is read off the optimal phase-one duals.
template <class ColumnFn>
PhaseOneResult exact_phase_one(std::size_t rows, std::size_t cols, ColumnFn&& column, std::span<const Rational> rhs) {
    if (rhs.size() != rows) throw std::invalid_argument("rhs size does not match row count");
    const std::size_t m = rows;

    std::vector<int> flip(m);
    std::vector<Rational> x_basic(m);
    for (std::size_t i = 0; i < m; ++i) {
        flip[i] = rhs[i] < 0 ? -1 : 1;
        x_basic[i] = flip[i] < 0 ? Rational(-rhs[i]) : rhs[i];
    }

    // cache columns when affordable; otherwise regenerate on every pricing pass
    constexpr std::size_t cache_limit = std::size_t(1) << 22;
    const bool cached = cols * m <= cache_limit;
    std::vector<Rational> cache;
    if (cached) {
        cache.resize(cols * m);
        std::vector<Rational> tmp(m);
        for (std::size_t j = 0; j < cols; ++j) {
            column(j, tmp);
            for (std::size_t i = 0; i < m; ++i) cache[j * m + i] = flip[i] < 0 ? Rational(-tmp[i]) : tmp[i];
        }
    }
    std::vector<Rational> scratch(m);
    auto load = [&](std::size_t j) -> std::span<const Rational> {
        if (cached) return {cache.data() + j * m, m};
        column(j, scratch);
        for (std::size_t i = 0; i < m; ++i)
            if (flip[i] < 0) scratch[i] = -scratch[i];
        return scratch;
    };

    // basis[i] >= cols marks the artificial of row basis[i] - cols
    std::vector<std::size_t> basis(m);
    std::vector<char> in_basis(cols, 0);
    std::vector<std::vector<Rational>> inverse(m, std::vector<Rational>(m));
    for (std::size_t i = 0; i < m; ++i) {
        basis[i] = cols + i;
        inverse[i][i] = 1;
    }

    PhaseOneResult result;
    std::vector<Rational> dual(m), alpha(m);
    Rational t;
    for (;;) {
        // dual = c_B^T B^{-1}, with cost 1 on artificials
        for (std::size_t k = 0; k < m; ++k) dual[k] = 0;
        for (std::size_t i = 0; i < m; ++i)
            if (basis[i] >= cols)
                for (std::size_t k = 0; k < m; ++k) dual[k] += inverse[i][k];

        std::size_t entering = cols;
        for (std::size_t j = 0; j < cols && entering == cols; ++j) {
            if (in_basis[j]) continue;
            auto a = load(j);
            Rational dot = 0;
            for (std::size_t k = 0; k < m; ++k)
                if (dual[k] != 0 && a[k] != 0) dot += dual[k] * a[k];
            if (dot > 0) entering = j;  // reduced cost -dot < 0
        }

        if (entering == cols) {
            Rational objective = 0;
            for (std::size_t i = 0; i < m; ++i)
                if (basis[i] >= cols) objective += x_basic[i];
            if (objective == 0) {
                result.feasible = true;
                result.primal.assign(cols, Rational(0));
                for (std::size_t i = 0; i < m; ++i)
                    if (basis[i] < cols) result.primal[basis[i]] = x_basic[i];
            } else {
                result.farkas.resize(m);
                for (std::size_t k = 0; k < m; ++k) result.farkas[k] = flip[k] < 0 ? dual[k] : Rational(-dual[k]);
            }
            return result;
        }

        auto a = load(entering);
        for (std::size_t i = 0; i < m; ++i) {
            alpha[i] = 0;
            for (std::size_t k = 0; k < m; ++k)
                if (inverse[i][k] != 0 && a[k] != 0) alpha[i] += inverse[i][k] * a[k];
        }

        std::size_t leave = m;
        Rational best;
        for (std::size_t i = 0; i < m; ++i) {
            if (alpha[i] <= 0) continue;
            t = x_basic[i] / alpha[i];
            if (leave == m || t < best || (t == best && basis[i] < basis[leave])) {
                leave = i;
                best = t;
            }
        }
        if (leave == m) throw std::logic_error("phase one is unbounded; this cannot happen");

        Rational pivot = alpha[leave];
        for (std::size_t k = 0; k < m; ++k) inverse[leave][k] /= pivot;
        x_basic[leave] /= pivot;
        for (std::size_t i = 0; i < m; ++i) {
            if (i == leave || alpha[i] == 0) continue;
            Rational f = alpha[i];
            for (std::size_t k = 0; k < m; ++k)
                if (inverse[leave][k] != 0) inverse[i][k] -= f * inverse[leave][k];
            x_basic[i] -= f * x_basic[leave];
        }
        if (basis[leave] < cols) in_basis[basis[leave]] = 0;
        basis[leave] = entering;
        in_basis[entering] = 1;
        ++result.pivots;
    }
}

} // namespace hvt
