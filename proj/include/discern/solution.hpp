#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "discern/errors.hpp"
#include "discern/market.hpp"

namespace discern {

struct Welfare {
    Eigen::VectorXd social_surplus;               ///< per state
    Eigen::VectorXd trading_consumer_net_payoff;  ///< per state, for consumers who trade
    double exante_consumer_loss = 0.0;
    double total_social_surplus = 0.0;            ///< mu-weighted
};

struct Diagnostics {
    std::string method;
    int iterations = 0;
    double residual = 0.0;            ///< sup-norm of T(q) - q at the returned point
    bool cross_checked = false;       ///< policy iteration was run against value iteration
    double cross_check_gap = 0.0;
};

struct FullRevelation {
    bool ok = true;
    double min_gap = 0.0;
    std::vector<std::pair<std::size_t, std::size_t>> collisions;
};

/// Interior equilibrium: per-state add-on, price and entry threshold, plus who trades.
struct EquilibriumSolution {
    Variant variant = Variant::exploitative;
    Eigen::VectorXd q_bar;
    Eigen::VectorXd h;
    Eigen::VectorXd pi_star;
    std::vector<std::string> type_names;
    Eigen::MatrixXd estimates;                          ///< types x states
    std::vector<std::vector<std::size_t>> trading_types; ///< argmin (exploitative) / argmax (beneficial)
    std::vector<bool> interior;
    Welfare welfare;
    FullRevelation revelation;
    Diagnostics diagnostics;

    bool all_interior() const { return std::all_of(interior.begin(), interior.end(), [](bool b) { return b; }); }
};

inline std::vector<bool> interior_flags(const MarketSpec& spec, const Eigen::VectorXd& q_bar) {
    std::vector<bool> out(spec.num_states());
    for (std::size_t k = 0; k < out.size(); ++k) {
        const double s = spec.S(k), q = q_bar(static_cast<Eigen::Index>(k));
        out[k] = q > 0.5 * s + tolerance::interior && q < s - tolerance::interior;
    }
    return out;
}

/// Pairwise price gaps; any gap at or below 1e-9 is a collision.
inline FullRevelation full_revelation_check(const EquilibriumSolution& sol) {
    if (!sol.all_interior()) throw DomainError("full_revelation_check: solution is not interior");
    FullRevelation r;
    r.min_gap = std::numeric_limits<double>::infinity();
    for (Eigen::Index a = 0; a < sol.h.size(); ++a)
        for (Eigen::Index b = a + 1; b < sol.h.size(); ++b) {
            const double gap = std::abs(sol.h(a) - sol.h(b));
            r.min_gap = std::min(r.min_gap, gap);
            if (gap <= 1e-9) r.collisions.emplace_back(static_cast<std::size_t>(a), static_cast<std::size_t>(b));
        }
    r.ok = r.collisions.empty();
    return r;
}

/**
 * Welfare aggregates of an interior solution.
 *
 * Exploitative: surplus (1 - pi*) delta; trading consumers net delta - S + q_bar.
 * Beneficial: a trade with firm type pi creates delta + 2 pi S, so surplus is
 * (1 - pi*) delta + (1 - pi*^2) S; trading consumers net v* + q_bar - h.
 * Ex-ante loss is sum mu (1 - pi*) max(0, -net) in both variants.
 */
inline Welfare welfare(const EquilibriumSolution& sol, const MarketSpec& spec) {
    if (!sol.all_interior()) throw NoInteriorEquilibrium("welfare: solution is not interior");
    const auto n = static_cast<Eigen::Index>(spec.num_states());
    const double d = spec.delta();
    Welfare w;
    w.social_surplus.resize(n);
    w.trading_consumer_net_payoff.resize(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const double p = sol.pi_star(k), s = spec.S().coeff(k), volume = 1.0 - p;
        if (spec.variant() == Variant::exploitative) {
            w.social_surplus(k) = volume * d;
            w.trading_consumer_net_payoff(k) = d - s + sol.q_bar(k);
        } else {
            w.social_surplus(k) = volume * d + (1.0 - p * p) * s;
            w.trading_consumer_net_payoff(k) = spec.v_star() + sol.q_bar(k) - sol.h(k);
        }
        w.exante_consumer_loss += spec.mu()(k) * volume * std::max(0.0, -w.trading_consumer_net_payoff(k));
    }
    w.total_social_surplus = spec.mu().dot(w.social_surplus);
    return w;
}

/// Fill h, pi*, interior flags, welfare and revelation from q_bar.
inline void complete_solution(EquilibriumSolution& sol, const MarketSpec& spec) {
    const auto n = static_cast<Eigen::Index>(spec.num_states());
    sol.variant = spec.variant();
    sol.h.resize(n);
    sol.pi_star.resize(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const auto ks = static_cast<std::size_t>(k);
        sol.h(k) = price_from_addon(spec, ks, sol.q_bar(k));
        sol.pi_star(k) = pi_star(spec, ks, sol.h(k));
    }
    sol.interior = interior_flags(spec, sol.q_bar);
    if (sol.all_interior()) {
        sol.welfare = welfare(sol, spec);
        sol.revelation = full_revelation_check(sol);
    }
}

/**
 * Rational-expectations benchmark in closed form.
 *
 * Exploitative: pi* = 1 - 2 delta / S, q_bar = S - delta, h = v* + delta - S,
 * which needs 2 delta < S_min. Beneficial: q_bar = (S - delta) / 3.
 */
inline EquilibriumSolution ree_solution(const MarketSpec& spec) {
    const auto n = static_cast<Eigen::Index>(spec.num_states());
    EquilibriumSolution sol;
    sol.q_bar.resize(n);
    if (spec.variant() == Variant::exploitative) {
        if (!(2.0 * spec.delta() < spec.s_min()))
            throw NoInteriorEquilibrium("no interior REE: requires 2*delta < S_min (2*delta = " +
                                        std::to_string(2.0 * spec.delta()) + ", S_min = " +
                                        std::to_string(spec.s_min()) + ")");
        sol.q_bar = spec.S().array() - spec.delta();
    } else {
        sol.q_bar = (spec.S().array() - spec.delta()) / 3.0;
    }
    sol.diagnostics.method = "ree-closed-form";
    complete_solution(sol, spec);
    if (!sol.all_interior()) {
        std::vector<std::size_t> bad;
        for (std::size_t k = 0; k < sol.interior.size(); ++k)
            if (!sol.interior[k]) bad.push_back(k);
        throw NoInteriorEquilibrium("no interior REE: requires -delta/2 < S < -2*delta in every state", bad);
    }
    return sol;
}

} // namespace discern
