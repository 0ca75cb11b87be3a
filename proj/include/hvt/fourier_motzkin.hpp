#pragma once

#include "hvt/rational.hpp"

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <vector>

namespace hvt {

/// Result of testing whether b lies in the cone generated by columns a_j.
struct ConeMembership {
    bool member = false;
    std::vector<Rational> weights;     // lambda >= 0 with sum lambda_j a_j = b, when member
    std::vector<Rational> separator;   // y with a_j.y >= 0 and b.y <= -1, otherwise
};

/// Decides b in cone(a_1..a_n) by Fourier-Motzkin elimination on the
/// alternative system { a_j.y >= 0, -b.y >= 1 }.
///
/// Every derived row keeps its nonnegative multipliers over the original
/// rows, so a contradiction 0 >= h > 0 yields the cone weights directly. If
/// elimination finishes cleanly, back-substitution produces the separating
/// y. Redundant rows are pruned with Chernikov's history bound.
inline ConeMembership cone_membership(const std::vector<std::vector<Rational>>& columns, const std::vector<Rational>& b) {
    const std::size_t dim = b.size();
    const std::size_t n = columns.size();

    struct Row {
        std::vector<Rational> g;
        Rational h;
        std::map<std::size_t, Rational> multipliers;  // original row -> weight; row n is the b-row
        std::set<std::size_t> history;
    };

    auto normalize = [](Row& r) {
        Rational scale = 0;
        for (const auto& c : r.g)
            if (c != 0) {
                scale = hvt::abs(c);
                break;
            }
        if (scale == 0) scale = r.h != 0 ? hvt::abs(r.h) : Rational(1);
        if (scale == 1) return;
        for (auto& c : r.g) c /= scale;
        r.h /= scale;
        for (auto& [k, w] : r.multipliers) w /= scale;
    };

    std::vector<Row> rows;
    rows.reserve(n + 1);
    for (std::size_t j = 0; j < n; ++j) {
        Row r{columns[j], Rational(0), {{j, Rational(1)}}, {j}};
        normalize(r);
        rows.push_back(std::move(r));
    }
    {
        Row r;
        r.g.resize(dim);
        for (std::size_t i = 0; i < dim; ++i) r.g[i] = -b[i];
        r.h = 1;
        r.multipliers = {{n, Rational(1)}};
        r.history = {n};
        normalize(r);
        rows.push_back(std::move(r));
    }

    auto contradiction = [&](const Row& r) {
        if (r.h <= 0) return false;
        return std::all_of(r.g.begin(), r.g.end(), [](const Rational& c) { return c == 0; });
    };
    auto member_from = [&](const Row& r) {
        ConeMembership out;
        out.member = true;
        out.weights.assign(n, Rational(0));
        Rational mu_b = r.multipliers.at(n);
        for (const auto& [k, w] : r.multipliers)
            if (k < n) out.weights[k] = w / mu_b;
        return out;
    };
    for (const auto& r : rows)
        if (contradiction(r)) return member_from(r);

    std::vector<std::vector<Row>> stages;
    std::vector<std::size_t> order;
    std::vector<char> eliminated(dim, 0);

    for (std::size_t step = 0; step < dim; ++step) {
        // pick the variable with the fewest generated pairs
        std::size_t var = dim;
        std::size_t best_cost = 0;
        for (std::size_t v = 0; v < dim; ++v) {
            if (eliminated[v]) continue;
            std::size_t pos = 0, neg = 0;
            for (const auto& r : rows) {
                if (r.g[v] > 0) ++pos;
                else if (r.g[v] < 0) ++neg;
            }
            std::size_t cost = pos * neg;
            if (var == dim || cost < best_cost) {
                var = v;
                best_cost = cost;
            }
        }
        eliminated[var] = 1;
        order.push_back(var);
        stages.push_back(rows);

        std::vector<const Row*> pos, neg;
        std::vector<Row> next;
        for (const auto& r : rows) {
            if (r.g[var] > 0) pos.push_back(&r);
            else if (r.g[var] < 0) neg.push_back(&r);
            else next.push_back(r);
        }
        const std::size_t history_bound = step + 2;
        // duplicates keep the smallest history so the Chernikov bound stays sound
        std::map<std::pair<std::vector<Rational>, Rational>, std::size_t> seen;
        for (std::size_t i = 0; i < next.size(); ++i) seen.emplace(std::make_pair(next[i].g, next[i].h), i);
        for (const Row* p : pos) {
            for (const Row* q : neg) {
                std::set<std::size_t> hist = p->history;
                hist.insert(q->history.begin(), q->history.end());
                if (hist.size() > history_bound) continue;
                Rational wp = -q->g[var], wq = p->g[var];
                Row r;
                r.g.resize(dim);
                for (std::size_t i = 0; i < dim; ++i) r.g[i] = wp * p->g[i] + wq * q->g[i];
                r.g[var] = 0;
                r.h = wp * p->h + wq * q->h;
                r.multipliers = p->multipliers;
                for (auto& [k, w] : r.multipliers) w *= wp;
                for (const auto& [k, w] : q->multipliers) r.multipliers[k] += wq * w;
                r.history = std::move(hist);
                normalize(r);
                if (contradiction(r)) return member_from(r);
                bool trivial = std::all_of(r.g.begin(), r.g.end(), [](const Rational& c) { return c == 0; });
                if (trivial) continue;  // 0 >= h with h <= 0
                auto [it, inserted] = seen.emplace(std::make_pair(r.g, r.h), next.size());
                if (!inserted) {
                    if (r.history.size() < next[it->second].history.size()) next[it->second] = std::move(r);
                    continue;
                }
                next.push_back(std::move(r));
            }
        }
        // rows with zero coefficients and h <= 0 carry no information
        std::erase_if(next, [](const Row& r) {
            return r.h <= 0 && std::all_of(r.g.begin(), r.g.end(), [](const Rational& c) { return c == 0; });
        });
        rows = std::move(next);
    }

    // back-substitute in reverse elimination order
    ConeMembership out;
    std::vector<Rational> y(dim, Rational(0));
    std::vector<char> known(dim, 0);
    for (std::size_t s = order.size(); s-- > 0;) {
        std::size_t var = order[s];
        std::optional<Rational> lower, upper;
        for (const auto& r : stages[s]) {
            if (r.g[var] == 0) continue;
            Rational rest = r.h;
            for (std::size_t i = 0; i < dim; ++i)
                if (i != var && known[i]) rest -= r.g[i] * y[i];
            Rational bound = rest / r.g[var];
            if (r.g[var] > 0) {
                if (!lower || bound > *lower) lower = bound;
            } else {
                if (!upper || bound < *upper) upper = bound;
            }
        }
        y[var] = lower ? *lower : upper ? *upper : Rational(0);
        known[var] = 1;
    }
    out.separator = std::move(y);
    return out;
}

} // namespace hvt
