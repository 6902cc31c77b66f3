#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "discern/beliefs.hpp"
#include "discern/dag.hpp"
#include "discern/errors.hpp"
#include "discern/market.hpp"
#include "discern/state_space.hpp"

namespace discern::scenarios {

namespace detail {

inline StateSpace three_state_space() {
    return StateSpace(binary_variables(2), {{0, 0}, {0, 1}, {1, 0}});
}

inline Eigen::VectorXd uniform(std::size_t n) {
    return Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), 1.0 / static_cast<double>(n));
}

} // namespace detail

/// Two binary variables, mu uniform on {(0,0),(0,1),(1,0)}, S = (3, 4, 4.01), v* = 2, c = 1, all four coarse types.
inline MarketSpec example_3_1() {
    Eigen::VectorXd s(3);
    s << 3.0, 4.0, 4.01;
    return MarketSpec(detail::three_state_space(), detail::uniform(3), s, 2.0, 1.0, Variant::exploitative,
                      {CognitiveType::coarse("fully_coarse", {}), CognitiveType::coarse("only_t1", {0}),
                       CognitiveType::coarse("only_t2", {1}), CognitiveType::coarse("rational", {0, 1})});
}

/// Same market as example_3_1 with a rational DAG and the two chain DAGs.
inline MarketSpec example_5_2() {
    const std::vector<std::string> names{"t1", "t2"};
    return example_3_1().with_types({CognitiveType::from_dag("rational", encode_coarse({0, 1}, names)),
                                     CognitiveType::from_dag("G1", chain_dag({0, 1}, names)),
                                     CognitiveType::from_dag("G2", chain_dag({1, 0}, names))});
}

/// One binary variable, mu uniform, S = (0.9, 1), delta = -1.2 (v* = 0, c = 1.2); fully coarse and rational types.
inline MarketSpec example_4_beneficial() {
    Eigen::VectorXd s(2);
    s << 0.9, 1.0;
    return MarketSpec(StateSpace(binary_variables(1)), detail::uniform(2), s, 0.0, 1.2, Variant::beneficial,
                      {CognitiveType::coarse("fully_coarse", {}), CognitiveType::coarse("rational", {0})});
}

/// example_4_beneficial with the fully coarse type only.
inline MarketSpec example_4_beneficial_coarse() {
    return example_4_beneficial().with_types({CognitiveType::coarse("fully_coarse", {})});
}

/**
 * Three binary variables with t3 = t1 XOR t2, t1 and t2 independent
 * (P(t1 = 1) = 0.3, P(t2 = 1) = 0.4), S = 0.01 t1 + t2 + 0.02 t3 + 3 and a
 * single DAG phi <- t1 -> t3 -> t2 -> q. Illustrative only.
 */
inline MarketSpec comovement_5_3_1() {
    const std::vector<std::size_t> path{0, 2, 1};
    const std::vector<std::string> names{"t1", "t2", "t3"};
    std::vector<StateTuple> support;
    for (std::size_t a = 0; a < 2; ++a)
        for (std::size_t b = 0; b < 2; ++b) support.push_back({a, b, a ^ b});
    StateSpace space(binary_variables(3), support);
    Eigen::VectorXd mu(4), s(4);
    for (std::size_t k = 0; k < space.size(); ++k) {
        const auto t = space.state(k);
        const double p1 = t[0] ? 0.3 : 0.7, p2 = t[1] ? 0.4 : 0.6;
        mu(static_cast<Eigen::Index>(k)) = p1 * p2;
        s(static_cast<Eigen::Index>(k)) = 0.01 * double(t[0]) + 1.0 * double(t[1]) + 0.02 * double(t[2]) + 3.0;
    }
    return MarketSpec(space, mu, s, 2.0, 1.0, Variant::exploitative,
                      {CognitiveType::from_dag("G", chain_dag(path, names))});
}

/**
 * Near-efficient market whose ex-ante add-on approaches S_bar / 2.
 *
 * Binary t1..tn supported on the origin and the states e_i (t_i = 0, all
 * other variables 1). S(origin) = 2 delta (1 + 0.01), S(e_i) = 4 delta
 * (1 - 0.01 i / n); the origin's mass alpha is solved so that sum mu S equals
 * s_bar exactly. Types: rational plus {i} for every i. The support is
 * declared explicitly rather than padding the 2^n product with tiny masses.
 */
inline MarketSpec lower_bound_scenario(std::size_t n, double delta, double s_bar) {
    if (n < 2) throw DomainError("lower_bound_scenario: n must be at least 2");
    if (!(delta > 0.0)) throw DomainError("lower_bound_scenario: delta must be positive");
    constexpr double bump = 1e-2;
    const double s0 = 2.0 * delta * (1.0 + bump);
    std::vector<double> se(n);
    double se_mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        se[i] = 4.0 * delta * (1.0 - bump * double(i + 1) / double(n));
        se_mean += se[i] / double(n);
    }
    const double alpha = (se_mean - s_bar) / (se_mean - s0);
    if (!(alpha > 0.0 && alpha < 1.0))
        throw DomainError("lower_bound_scenario: s_bar must lie strictly between " + std::to_string(s0) + " and " +
                          std::to_string(se_mean) + " (alpha = " + std::to_string(alpha) + ")");

    std::vector<StateTuple> support{StateTuple(n, 0)};
    for (std::size_t i = 0; i < n; ++i) {
        StateTuple e(n, 1);
        e[i] = 0;
        support.push_back(e);
    }
    StateSpace space(binary_variables(n), support);
    Eigen::VectorXd mu(static_cast<Eigen::Index>(space.size())), s(static_cast<Eigen::Index>(space.size()));
    for (std::size_t k = 0; k < space.size(); ++k) {
        const auto t = space.state(k);
        std::size_t zeros = 0, zero_at = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (t[i] == 0) {
                ++zeros;
                zero_at = i;
            }
        const auto kk = static_cast<Eigen::Index>(k);
        if (zeros == n) {
            mu(kk) = alpha;
            s(kk) = s0;
        } else {
            mu(kk) = (1.0 - alpha) / double(n);
            s(kk) = se[zero_at];
        }
    }
    std::vector<CognitiveType> types;
    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    types.push_back(CognitiveType::coarse("rational", all));
    for (std::size_t i = 0; i < n; ++i) types.push_back(CognitiveType::coarse("only_t" + std::to_string(i + 1), {i}));
    return MarketSpec(space, mu, s, 1.0 + delta, 1.0, Variant::exploitative, std::move(types));
}

/**
 * Short chain t1 -> t2 -> q with a signal w whose parents are t1 and t2.
 * The price's single parent is t_{price_parent + 1}.
 */
inline CausalDag extended_short_chain(std::size_t price_parent = 0) {
    if (price_parent > 1) throw DomainError("extended_short_chain: price parent must be 0 or 1");
    CausalDag g;
    const auto t1 = g.add_state(0, "t1"), t2 = g.add_state(1, "t2");
    const auto phi = g.add_price(), q = g.add_addon(), w = g.add_signal();
    g.add_edge(price_parent == 0 ? t1 : t2, phi);
    g.add_edge(t1, t2);
    g.add_edge(t2, q);
    g.add_edge(t1, w);
    g.add_edge(t2, w);
    return g;
}

inline std::vector<std::string> names() {
    return {"example_3_1", "example_4_beneficial", "example_4_beneficial_coarse", "example_5_2", "comovement_5_3_1",
            "lower_bound_50"};
}

inline MarketSpec by_name(const std::string& name) {
    if (name == "example_3_1") return example_3_1();
    if (name == "example_4_beneficial") return example_4_beneficial();
    if (name == "example_4_beneficial_coarse") return example_4_beneficial_coarse();
    if (name == "example_5_2") return example_5_2();
    if (name == "comovement_5_3_1") return comovement_5_3_1();
    if (name == "lower_bound_50") return lower_bound_scenario(50, 1.0, 3.0);
    throw DomainError("unknown scenario '" + name + "'");
}

} // namespace discern::scenarios
