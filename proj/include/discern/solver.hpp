#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "discern/beliefs.hpp"
#include "discern/errors.hpp"
#include "discern/market.hpp"
#include "discern/solution.hpp"
#include "discern/transition.hpp"

namespace discern {

struct SolverOptions {
    double tol = tolerance::convergence;
    int max_iter = 1000;
    bool cross_check = true; ///< run policy iteration alongside value iteration (exploitative)
};

/// Sign of the belief term: +1 (min, exploitative) or -1 (max, beneficial).
inline double belief_sign(Variant v) { return v == Variant::exploitative ? 1.0 : -1.0; }

/// Every type's estimate in every state, types x states.
inline Eigen::MatrixXd type_estimates(const std::vector<TransitionMatrix>& betas, const Eigen::VectorXd& q_bar) {
    Eigen::MatrixXd est(static_cast<Eigen::Index>(betas.size()), q_bar.size());
    for (std::size_t t = 0; t < betas.size(); ++t) {
        if (static_cast<Eigen::Index>(betas[t].size()) != q_bar.size())
            throw DomainError("transition matrix size does not match the number of states");
        est.row(static_cast<Eigen::Index>(t)) = (betas[t].matrix() * q_bar).transpose();
    }
    return est;
}

/**
 * T(q)(theta) = 1/2 [S(theta) - delta + min_t (beta_t q)(theta)] for the
 * exploitative variant, and 1/2 [S - delta - max_t (beta_t q)] for the
 * beneficial one.
 */
inline Eigen::VectorXd bellman_operator(const Eigen::VectorXd& q_bar, const MarketSpec& spec,
                                        const std::vector<TransitionMatrix>& betas) {
    if (betas.empty()) throw DomainError("bellman_operator: empty type set");
    if (q_bar.size() != static_cast<Eigen::Index>(spec.num_states()))
        throw DomainError("bellman_operator: q_bar has wrong length");
    const Eigen::MatrixXd est = type_estimates(betas, q_bar);
    Eigen::VectorXd extremal = spec.variant() == Variant::exploitative ? Eigen::VectorXd(est.colwise().minCoeff().transpose())
                                                                       : Eigen::VectorXd(est.colwise().maxCoeff().transpose());
    return 0.5 * (spec.S().array() - spec.delta() + belief_sign(spec.variant()) * extremal.array()).matrix();
}

struct IterationResult {
    Eigen::VectorXd q_bar;
    int iterations = 0;
    double residual = 0.0; ///< last step in sup-norm
};

/// Fixed-point iteration from q0 = S / 2 (or `start`) until the sup-norm step drops below tol.
inline IterationResult value_iteration(const MarketSpec& spec, const std::vector<TransitionMatrix>& betas, double tol,
                                       int max_iter, const std::optional<Eigen::VectorXd>& start = std::nullopt) {
    if (!(tol > 0.0)) throw DomainError("value_iteration: tol must be positive");
    IterationResult r;
    r.q_bar = start ? *start : Eigen::VectorXd(0.5 * spec.S());
    if (r.q_bar.size() != static_cast<Eigen::Index>(spec.num_states()))
        throw DomainError("value_iteration: start vector has wrong length");
    r.residual = std::numeric_limits<double>::infinity();
    while (r.iterations < max_iter) {
        Eigen::VectorXd next = bellman_operator(r.q_bar, spec, betas);
        r.residual = (next - r.q_bar).cwiseAbs().maxCoeff();
        r.q_bar = std::move(next);
        ++r.iterations;
        if (r.residual < tol) return r;
    }
    throw ConvergenceFailure("value iteration did not converge in " + std::to_string(max_iter) +
                                 " iterations (last step " + std::to_string(r.residual) + ")",
                             r.iterations, r.residual);
}

/// Exact value of a stationary assignment state -> type: solves (I -+ 1/2 B) q = 1/2 (S - delta).
inline Eigen::VectorXd policy_value(const std::vector<std::size_t>& policy, const MarketSpec& spec,
                                    const std::vector<TransitionMatrix>& betas) {
    const auto n = static_cast<Eigen::Index>(spec.num_states());
    if (static_cast<Eigen::Index>(policy.size()) != n) throw DomainError("policy_value: policy has wrong length");
    Eigen::MatrixXd b(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const auto t = policy[static_cast<std::size_t>(k)];
        if (t >= betas.size()) throw DomainError("policy_value: type index out of range");
        b.row(k) = betas[t].matrix().row(k);
    }
    const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n) - 0.5 * belief_sign(spec.variant()) * b;
    const Eigen::VectorXd rhs = 0.5 * (spec.S().array() - spec.delta()).matrix();
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (!lu.isInvertible()) throw Error("policy_value: singular system");
    return lu.solve(rhs);
}

struct PolicyResult {
    Eigen::VectorXd q_bar;
    std::vector<std::size_t> policy;
    int iterations = 0;
};

/// Smallest index among types within `tol` of the best estimate.
inline std::size_t greedy_type(const Eigen::MatrixXd& est, Eigen::Index state, bool minimize, double tol) {
    double best = est(0, state);
    for (Eigen::Index t = 1; t < est.rows(); ++t) best = minimize ? std::min(best, est(t, state)) : std::max(best, est(t, state));
    for (Eigen::Index t = 0; t < est.rows(); ++t)
        if (std::abs(est(t, state) - best) <= tol) return static_cast<std::size_t>(t);
    return 0;
}

/**
 * Howard policy iteration for the exploitative variant. Starts from type 0
 * everywhere; improvement keeps the current type unless another one is
 * strictly better, with ties going to the lowest type index.
 */
inline PolicyResult policy_iteration(const MarketSpec& spec, const std::vector<TransitionMatrix>& betas,
                                     int max_iter = 1000) {
    if (spec.variant() != Variant::exploitative)
        throw Unsupported("policy_iteration: only the exploitative variant is supported");
    if (betas.empty()) throw DomainError("policy_iteration: empty type set");
    constexpr double improve_tol = 1e-12;
    PolicyResult r;
    r.policy.assign(spec.num_states(), 0);
    for (r.iterations = 1; r.iterations <= max_iter; ++r.iterations) {
        r.q_bar = policy_value(r.policy, spec, betas);
        const Eigen::MatrixXd est = type_estimates(betas, r.q_bar);
        bool changed = false;
        for (Eigen::Index k = 0; k < est.cols(); ++k) {
            auto& cur = r.policy[static_cast<std::size_t>(k)];
            const double best = est.col(k).minCoeff();
            if (est(static_cast<Eigen::Index>(cur), k) <= best + improve_tol) continue;
            cur = greedy_type(est, k, true, improve_tol);
            changed = true;
        }
        if (!changed) return r;
    }
    throw ConvergenceFailure("policy iteration did not terminate", max_iter, 0.0);
}

/**
 * Enumerates every stationary assignment of types to states and returns the
 * pointwise minimum of their exact values (the optimal value of the induced
 * discounted min-cost problem). Exploitative only.
 */
inline Eigen::VectorXd brute_force_oracle(const MarketSpec& spec, const std::vector<TransitionMatrix>& betas,
                                          double budget = 1e6) {
    if (spec.variant() != Variant::exploitative)
        throw Unsupported("brute_force_oracle: only the exploitative variant is supported");
    if (betas.empty()) throw DomainError("brute_force_oracle: empty type set");
    const std::size_t n = spec.num_states(), m = betas.size();
    if (std::pow(static_cast<double>(m), static_cast<double>(n)) > budget)
        throw DomainError("brute_force_oracle: " + std::to_string(m) + "^" + std::to_string(n) +
                          " policies exceed the enumeration budget");
    std::vector<std::size_t> policy(n, 0);
    Eigen::VectorXd best = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), std::numeric_limits<double>::infinity());
    while (true) {
        best = best.cwiseMin(policy_value(policy, spec, betas));
        std::size_t i = 0;
        while (i < n && ++policy[i] == m) policy[i++] = 0;
        if (i == n) break;
    }
    return best;
}

/// Types whose estimate is within `tie` of the extremal one, per state.
inline std::vector<std::vector<std::size_t>> trading_sets(const Eigen::MatrixXd& est, Variant v,
                                                          double tie = tolerance::tie) {
    std::vector<std::vector<std::size_t>> out(static_cast<std::size_t>(est.cols()));
    for (Eigen::Index k = 0; k < est.cols(); ++k) {
        const double best = v == Variant::exploitative ? est.col(k).minCoeff() : est.col(k).maxCoeff();
        for (Eigen::Index t = 0; t < est.rows(); ++t)
            if (std::abs(est(t, k) - best) <= tie) out[static_cast<std::size_t>(k)].push_back(static_cast<std::size_t>(t));
    }
    return out;
}

/**
 * Full pipeline: beliefs, fixed point, prices, thresholds, trading sets,
 * welfare and the revelation check. Throws NoInteriorEquilibrium when some
 * state violates 1/2 S < q_bar < S.
 */
inline EquilibriumSolution solve(const MarketSpec& spec, const SolverOptions& opt = {}) {
    const auto betas = types_to_betas(spec.types(), spec.space(), spec.mu());
    auto vi = value_iteration(spec, betas, opt.tol, opt.max_iter);

    EquilibriumSolution sol;
    sol.q_bar = vi.q_bar;
    sol.diagnostics.method = "value-iteration";
    sol.diagnostics.iterations = vi.iterations;
    sol.diagnostics.residual = (bellman_operator(vi.q_bar, spec, betas) - vi.q_bar).cwiseAbs().maxCoeff();
    if (opt.cross_check && spec.variant() == Variant::exploitative) {
        const auto pi = policy_iteration(spec, betas);
        sol.diagnostics.cross_checked = true;
        sol.diagnostics.cross_check_gap = (pi.q_bar - vi.q_bar).cwiseAbs().maxCoeff();
    }
    for (const auto& t : spec.types()) sol.type_names.push_back(t.name);
    sol.estimates = type_estimates(betas, sol.q_bar);
    sol.trading_types = trading_sets(sol.estimates, spec.variant());
    complete_solution(sol, spec);
    if (!sol.all_interior()) {
        std::vector<std::size_t> bad;
        std::string which;
        for (std::size_t k = 0; k < sol.interior.size(); ++k)
            if (!sol.interior[k]) {
                bad.push_back(k);
                which += (which.empty() ? "" : ", ") + spec.space().label(k);
            }
        throw NoInteriorEquilibrium("no interior equilibrium: 1/2 S < q_bar < S fails in state(s) " + which, bad);
    }
    return sol;
}

} // namespace discern
