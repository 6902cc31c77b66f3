#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "discern/beliefs.hpp"
#include "discern/dag.hpp"
#include "discern/errors.hpp"
#include "discern/market.hpp"
#include "discern/solution.hpp"
#include "discern/solver.hpp"

namespace discern {

inline constexpr double check_tol = 1e-9;

/**
 * Semantic rationality: the type's beta is the identity. A DAG with a signal
 * node is judged on its signal-free part; imperfect DAGs count as non-rational.
 */
inline bool is_rational(const CognitiveType& t, const StateSpace& space, const Eigen::VectorXd& mu) {
    if (t.is_coarse()) return coarse_to_beta(space, mu, t.coarse_model().variables).is_identity(tolerance::identity);
    const CausalDag g = t.dag().without_signal();
    if (!is_perfect(g)) return false;
    try {
        return dag_to_beta(g, space, mu).is_identity(tolerance::identity);
    } catch (const UnsupportedDag&) {
        return false;
    }
}

inline bool has_rational_type(const MarketSpec& spec) {
    return std::any_of(spec.types().begin(), spec.types().end(),
                       [&](const CognitiveType& t) { return is_rational(t, spec.space(), spec.mu()); });
}

/// Appends `t`, renaming it when its name is already taken.
inline MarketSpec with_added_type(const MarketSpec& spec, CognitiveType t) {
    auto types = spec.types();
    const std::string base = t.name;
    for (int i = 2; spec.find_type(t.name); ++i) t.name = base + "#" + std::to_string(i);
    types.push_back(std::move(t));
    return spec.with_types(std::move(types));
}

// ---- adding a type (exploitative) ---------------------------------------

struct AddTypeReport {
    EquilibriumSolution before;
    EquilibriumSolution after;
    Eigen::VectorXd d_q_bar;
    Eigen::VectorXd d_h;
    Eigen::VectorXd d_surplus;
    Eigen::VectorXd d_net_payoff;
    bool rational_present = false;
    double d_exante_loss = 0.0;

    bool addon_weakly_falls = false;
    bool price_weakly_rises = false;
    bool surplus_weakly_rises = false;   ///< exploitative only
    bool net_payoff_weakly_falls = false;
    std::optional<bool> exante_loss_weakly_rises; ///< only asserted with a rational type present

    bool holds() const {
        return addon_weakly_falls && price_weakly_rises && (before.variant != Variant::exploitative || surplus_weakly_rises) &&
               net_payoff_weakly_falls && exante_loss_weakly_rises.value_or(true);
    }
};

/// Solve with and without `new_type` and report per-state changes (after minus before).
inline AddTypeReport add_type_experiment(const MarketSpec& spec, const CognitiveType& new_type,
                                         const SolverOptions& opt = {}) {
    AddTypeReport r;
    const MarketSpec extended = with_added_type(spec, new_type);
    r.before = solve(spec, opt);
    r.after = solve(extended, opt);
    r.d_q_bar = r.after.q_bar - r.before.q_bar;
    r.d_h = r.after.h - r.before.h;
    r.d_surplus = r.after.welfare.social_surplus - r.before.welfare.social_surplus;
    r.d_net_payoff = r.after.welfare.trading_consumer_net_payoff - r.before.welfare.trading_consumer_net_payoff;
    r.d_exante_loss = r.after.welfare.exante_consumer_loss - r.before.welfare.exante_consumer_loss;
    r.rational_present = has_rational_type(spec);
    r.addon_weakly_falls = r.d_q_bar.maxCoeff() <= check_tol;
    r.price_weakly_rises = r.d_h.minCoeff() >= -check_tol;
    r.surplus_weakly_rises = r.d_surplus.minCoeff() >= -check_tol;
    r.net_payoff_weakly_falls = r.d_net_payoff.maxCoeff() <= check_tol;
    if (r.rational_present) r.exante_loss_weakly_rises = r.d_exante_loss >= -check_tol;
    return r;
}

// ---- ex-ante add-on -------------------------------------------------------

struct ExpectedAddonAudit {
    double exante_addon = 0.0; ///< sum mu q_bar
    double ree_level = 0.0;    ///< S_bar - delta
    double lower_bound = 0.0;  ///< S_bar / 2
    double expected_price = 0.0;
    double ree_expected_price = 0.0; ///< v* + delta - S_bar
    bool within_bounds = false;
    bool price_above_ree = false;
    bool singleton = false;
    std::optional<bool> singleton_identity; ///< |exante - ree_level| <= 1e-9, singleton type sets only

    bool holds() const { return within_bounds && price_above_ree && singleton_identity.value_or(true); }
};

inline ExpectedAddonAudit expected_addon_audit(const MarketSpec& spec, const SolverOptions& opt = {}) {
    if (spec.variant() != Variant::exploitative)
        throw Unsupported("expected_addon_audit: exploitative variant only");
    const auto sol = solve(spec, opt);
    ExpectedAddonAudit a;
    a.exante_addon = spec.mu().dot(sol.q_bar);
    a.ree_level = spec.s_bar() - spec.delta();
    a.lower_bound = 0.5 * spec.s_bar();
    a.expected_price = spec.mu().dot(sol.h);
    a.ree_expected_price = spec.v_star() + spec.delta() - spec.s_bar();
    a.within_bounds = a.exante_addon >= a.lower_bound - check_tol && a.exante_addon <= a.ree_level + check_tol;
    a.price_above_ree = a.expected_price >= a.ree_expected_price - check_tol;
    a.singleton = spec.types().size() == 1;
    if (a.singleton) a.singleton_identity = std::abs(a.exante_addon - a.ree_level) <= check_tol;
    return a;
}

// ---- price range with a rational type -------------------------------------

struct PriceRangeReport {
    bool applicable = false;    ///< a rational type is present
    std::string notice;
    double lower = 0.0;         ///< 2 v* - c - S_max
    double upper = 0.0;         ///< 2 v* - c - S_min
    std::vector<bool> within;   ///< per state
    std::size_t argmin_state = 0;
    double upper_gap = 0.0;     ///< |h(argmin S) - upper|
    bool upper_binds = false;
    bool rigid = false;         ///< price constant across states
    double price_spread = 0.0;

    bool holds() const {
        return !applicable ||
               (upper_binds && std::all_of(within.begin(), within.end(), [](bool b) { return b; }));
    }
};

inline PriceRangeReport price_range_check(const MarketSpec& spec, const SolverOptions& opt = {}) {
    if (spec.variant() != Variant::exploitative) throw Unsupported("price_range_check: exploitative variant only");
    const auto sol = solve(spec, opt);
    PriceRangeReport r;
    r.applicable = has_rational_type(spec);
    r.lower = 2.0 * spec.v_star() - spec.c() - spec.s_max();
    r.upper = 2.0 * spec.v_star() - spec.c() - spec.s_min();
    r.price_spread = sol.h.maxCoeff() - sol.h.minCoeff();
    r.rigid = r.price_spread <= check_tol;
    Eigen::Index arg = 0;
    spec.S().minCoeff(&arg);
    r.argmin_state = static_cast<std::size_t>(arg);
    r.upper_gap = std::abs(sol.h(arg) - r.upper);
    r.upper_binds = r.upper_gap <= check_tol;
    for (Eigen::Index k = 0; k < sol.h.size(); ++k)
        r.within.push_back(sol.h(k) >= r.lower - check_tol && sol.h(k) <= r.upper + check_tol);
    if (!r.applicable)
        r.notice = r.rigid ? "no rational type: bounds skipped; price is rigid across states"
                           : "no rational type: bounds skipped";
    return r;
}

// ---- beneficial variant ---------------------------------------------------

struct BeneficialReeReport {
    bool rational_present = false;
    Eigen::VectorXd q_bar;
    Eigen::VectorXd ree_q_bar;  ///< (S - delta) / 3
    Eigen::VectorXd h;
    Eigen::VectorXd ree_h;
    bool addon_below = false;
    bool price_above = false;

    bool holds() const { return addon_below && price_above; }
};

inline BeneficialReeReport beneficial_ree_compare(const MarketSpec& spec, const SolverOptions& opt = {}) {
    if (spec.variant() != Variant::beneficial) throw Unsupported("beneficial_ree_compare: beneficial variant only");
    const auto sol = solve(spec, opt);
    BeneficialReeReport r;
    r.rational_present = has_rational_type(spec);
    r.q_bar = sol.q_bar;
    r.h = sol.h;
    r.ree_q_bar = (spec.S().array() - spec.delta()) / 3.0;
    r.ree_h = (spec.S().array() + spec.c()).matrix() - 2.0 * r.ree_q_bar;
    r.addon_below = (r.q_bar - r.ree_q_bar).maxCoeff() <= check_tol;
    r.price_above = (r.h - r.ree_h).minCoeff() >= -check_tol;
    return r;
}

struct BeneficialWelfareReport {
    bool rational_present = false;
    EquilibriumSolution before;
    EquilibriumSolution after;
    Eigen::VectorXd d_pi_star;
    double total_surplus_before = 0.0;
    double total_surplus_after = 0.0;
    bool cutoffs_weakly_fall = false;       ///< per-state pi* comparison
    std::size_t cutoff_violations = 0;
    bool total_surplus_weakly_falls = false;

    /// The welfare claim proper: total social surplus does not rise.
    bool holds() const { return total_surplus_weakly_falls; }
};

inline BeneficialWelfareReport beneficial_welfare_compare(const MarketSpec& spec, const CognitiveType& new_type,
                                                          const SolverOptions& opt = {}) {
    if (spec.variant() != Variant::beneficial) throw Unsupported("beneficial_welfare_compare: beneficial variant only");
    BeneficialWelfareReport r;
    r.rational_present = has_rational_type(spec);
    r.before = solve(spec, opt);
    r.after = solve(with_added_type(spec, new_type), opt);
    r.d_pi_star = r.after.pi_star - r.before.pi_star;
    for (Eigen::Index k = 0; k < r.d_pi_star.size(); ++k)
        if (r.d_pi_star(k) > check_tol) ++r.cutoff_violations;
    r.cutoffs_weakly_fall = r.cutoff_violations == 0;
    r.total_surplus_before = r.before.welfare.total_social_surplus;
    r.total_surplus_after = r.after.welfare.total_social_surplus;
    r.total_surplus_weakly_falls = r.total_surplus_after <= r.total_surplus_before + check_tol;
    return r;
}

// ---- signals and price dependence -----------------------------------------

struct SignalPremiseEntry {
    std::string name;
    bool rational = false;
    std::vector<std::size_t> price_parents; ///< R(phi)
    bool blocked = false;                   ///< R(phi) blocks every w-q path
};

struct SignalPremiseReport {
    std::vector<SignalPremiseEntry> entries;
    bool any_non_rational = false;
    bool premise_holds = false; ///< no non-rational type is blocked
    std::string conclusion;
};

/**
 * For every non-rational DAG, checks whether the price's parents block all
 * undirected paths between its signal node and q. Rational types are exempt.
 * Throws DomainError when a non-rational type lacks a signal node.
 */
inline SignalPremiseReport prop8_premise_check(const StateSpace& space, const Eigen::VectorXd& mu,
                                               const std::vector<CognitiveType>& types) {
    SignalPremiseReport r;
    bool all_clear = true;
    for (const auto& t : types) {
        SignalPremiseEntry e;
        e.name = t.name;
        e.rational = is_rational(t, space, mu);
        if (!e.rational) {
            if (t.is_coarse()) throw DomainError("prop8_premise_check: type '" + t.name + "' has no signal node");
            const auto& g = t.dag();
            require_valid(g, space.num_variables());
            const auto w = g.signal_node();
            if (!w) throw DomainError("prop8_premise_check: type '" + t.name + "' has no signal node");
            e.price_parents = g.parents(g.price_node());
            e.blocked = blocks(g, e.price_parents, *w, g.addon_node());
            r.any_non_rational = true;
            all_clear = all_clear && !e.blocked;
        }
        r.entries.push_back(std::move(e));
    }
    r.premise_holds = r.any_non_rational && all_clear;
    if (!r.any_non_rational)
        r.conclusion = "all types are rational: prices cannot depend on private signals";
    else if (r.premise_holds)
        r.conclusion = "premise holds: unless the equilibrium coincides with REE, some state has prices that vary "
                       "with the signal (generic mu, not certified numerically)";
    else
        r.conclusion = "premise fails: some non-rational type reads the signal only through the price's parents";
    return r;
}

} // namespace discern
