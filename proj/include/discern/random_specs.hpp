#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "discern/beliefs.hpp"
#include "discern/dag.hpp"
#include "discern/market.hpp"
#include "discern/state_space.hpp"

namespace discern::random {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

inline std::size_t uniform_int(Rng& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

/// Full-support distribution with every mass at least `floor / n`.
inline Eigen::VectorXd random_mu(Rng& rng, std::size_t n, double floor = 0.2) {
    Eigen::VectorXd mu(static_cast<Eigen::Index>(n));
    for (auto& x : mu) x = floor + uniform(rng, 0.0, 1.0);
    return mu / mu.sum();
}

/// Values in [lo, lo + width) with pairwise gaps above `min_gap`.
inline Eigen::VectorXd random_injective(Rng& rng, std::size_t n, double lo, double width, double min_gap = 1e-4) {
    Eigen::VectorXd s(static_cast<Eigen::Index>(n));
    while (true) {
        for (auto& x : s) x = lo + uniform(rng, 0.0, width);
        bool ok = true;
        for (Eigen::Index a = 0; a < s.size() && ok; ++a)
            for (Eigen::Index b = a + 1; b < s.size(); ++b)
                if (std::abs(s(a) - s(b)) <= min_gap) {
                    ok = false;
                    break;
                }
        if (ok) return s;
    }
}

inline std::vector<std::size_t> random_subset(Rng& rng, std::size_t num_vars) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < num_vars; ++i)
        if (uniform_int(rng, 0, 1)) out.push_back(i);
    return out;
}

inline std::string subset_name(const std::vector<std::size_t>& vars) {
    std::string s = "{";
    for (std::size_t i = 0; i < vars.size(); ++i) s += (i ? "," : "") + std::to_string(vars[i] + 1);
    return s + "}";
}

/// `count` distinct coarse types; the rational one is included when `with_rational` is set.
inline std::vector<CognitiveType> random_coarse_types(Rng& rng, std::size_t num_vars, std::size_t count,
                                                      bool with_rational) {
    std::set<std::vector<std::size_t>> chosen;
    if (with_rational) {
        std::vector<std::size_t> all(num_vars);
        std::iota(all.begin(), all.end(), std::size_t{0});
        chosen.insert(all);
    }
    const std::size_t limit = std::min<std::size_t>(count, std::size_t{1} << num_vars);
    while (chosen.size() < limit) chosen.insert(random_subset(rng, num_vars));
    std::vector<CognitiveType> out;
    for (const auto& m : chosen) out.push_back(CognitiveType::coarse(subset_name(m), m));
    std::shuffle(out.begin(), out.end(), rng);
    return out;
}

struct SweepOptions {
    std::size_t min_vars = 2;
    std::size_t max_vars = 3;
    std::size_t min_types = 2;
    std::size_t max_types = 4;
    bool force_rational = false;
};

/**
 * Exploitative market on binary variables with S drawn so that
 * S_max - S_min < 2 delta < S_min.
 */
inline MarketSpec random_exploitative_spec(Rng& rng, const SweepOptions& o = {}) {
    const std::size_t nv = uniform_int(rng, o.min_vars, o.max_vars);
    StateSpace space(binary_variables(nv));
    const double delta = uniform(rng, 0.5, 2.0);
    const double c = uniform(rng, 0.5, 2.0);
    const double lo = 2.0 * delta * uniform(rng, 1.02, 1.5);
    const Eigen::VectorXd s = random_injective(rng, space.size(), lo, 2.0 * delta * uniform(rng, 0.2, 0.98));
    const bool rational = o.force_rational || uniform_int(rng, 0, 1) == 1;
    auto types = random_coarse_types(rng, nv, uniform_int(rng, o.min_types, o.max_types), rational);
    return MarketSpec(space, random_mu(rng, space.size()), s, c + delta, c, Variant::exploitative, std::move(types));
}

/**
 * Beneficial market on binary variables with S drawn so that
 * -2/3 delta < S_min < S_max < -delta.
 */
inline MarketSpec random_beneficial_spec(Rng& rng, const SweepOptions& o = {}) {
    const std::size_t nv = uniform_int(rng, std::max<std::size_t>(1, o.min_vars), o.max_vars);
    StateSpace space(binary_variables(nv));
    const double d = -uniform(rng, 0.5, 3.0);
    const double c = uniform(rng, -d + 0.1, -d + 2.0);
    const double lo = -2.0 / 3.0 * d, hi = -d;
    const double margin = 1e-3 * (hi - lo);
    const Eigen::VectorXd s = random_injective(rng, space.size(), lo + margin, hi - lo - 2.0 * margin);
    const bool rational = o.force_rational || uniform_int(rng, 0, 1) == 1;
    auto types = random_coarse_types(rng, nv, uniform_int(rng, o.min_types, o.max_types), rational);
    return MarketSpec(space, random_mu(rng, space.size()), s, c + d, c, Variant::beneficial, std::move(types));
}

/**
 * Random perfect DAG over a random subset of the state variables plus phi and
 * q. Nodes are placed in a random order that keeps state variables ahead of
 * phi and q; forward edges are drawn independently and the draw is repeated
 * until every parent set is a clique.
 */
inline CausalDag random_perfect_dag(Rng& rng, std::size_t num_vars, double edge_prob = 0.5) {
    const std::vector<std::string> names{"t1", "t2", "t3", "t4", "t5", "t6", "t7", "t8"};
    while (true) {
        std::vector<std::size_t> vars = random_subset(rng, num_vars);
        std::shuffle(vars.begin(), vars.end(), rng);
        CausalDag g;
        std::vector<std::size_t> order;
        for (auto v : vars) order.push_back(g.add_state(v, v < names.size() ? names[v] : "t" + std::to_string(v + 1)));
        const auto phi = g.add_price(), q = g.add_addon();
        if (uniform_int(rng, 0, 1)) {
            order.push_back(phi);
            order.push_back(q);
        } else {
            order.push_back(q);
            order.push_back(phi);
        }
        std::bernoulli_distribution edge(edge_prob);
        for (std::size_t a = 0; a < order.size(); ++a)
            for (std::size_t b = a + 1; b < order.size(); ++b) {
                const bool forbidden = (order[a] == phi || order[a] == q);
                if (!forbidden && edge(rng)) g.add_edge(order[a], order[b]);
            }
        if (is_perfect(g)) return g;
    }
}

} // namespace discern::random
