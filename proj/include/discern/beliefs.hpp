#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "discern/dag.hpp"
#include "discern/errors.hpp"
#include "discern/factorize.hpp"
#include "discern/state_space.hpp"
#include "discern/transition.hpp"

namespace discern {

/// Coarse subjective model: the consumer conditions on the listed state variables only.
struct CoarseModel {
    std::vector<std::size_t> variables;

    friend bool operator==(const CoarseModel&, const CoarseModel&) = default;
};

/// A consumer cognitive type: a coarse subset of variables or a causal DAG.
struct CognitiveType {
    std::string name;
    std::variant<CoarseModel, CausalDag> model;

    static CognitiveType coarse(std::string name, std::vector<std::size_t> vars) {
        std::sort(vars.begin(), vars.end());
        return {std::move(name), CoarseModel{std::move(vars)}};
    }
    static CognitiveType from_dag(std::string name, CausalDag dag) { return {std::move(name), std::move(dag)}; }

    bool is_coarse() const noexcept { return std::holds_alternative<CoarseModel>(model); }
    const CoarseModel& coarse_model() const { return std::get<CoarseModel>(model); }
    const CausalDag& dag() const { return std::get<CausalDag>(model); }

    friend bool operator==(const CognitiveType& a, const CognitiveType& b) {
        return a.name == b.name && a.model == b.model;
    }
};

/// beta(theta' | theta) = mu(theta') / mu(states agreeing with theta on M), zero off the M-cell.
inline TransitionMatrix coarse_to_beta(const StateSpace& space, const Eigen::VectorXd& mu,
                                       const std::vector<std::size_t>& vars) {
    const auto n = static_cast<Eigen::Index>(space.size());
    if (mu.size() != n) throw DomainError("coarse_to_beta: mu has wrong length");
    for (auto v : vars)
        if (v >= space.num_variables()) throw DomainError("coarse_to_beta: variable index out of range");
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double cell = 0.0;
        for (Eigen::Index j = 0; j < n; ++j)
            if (space.agree_on(static_cast<std::size_t>(i), static_cast<std::size_t>(j), vars)) cell += mu(j);
        for (Eigen::Index j = 0; j < n; ++j)
            if (space.agree_on(static_cast<std::size_t>(i), static_cast<std::size_t>(j), vars)) b(i, j) = mu(j) / cell;
    }
    return TransitionMatrix(std::move(b));
}

/**
 * Transition matrix of a perfect DAG, extracted with an indicator basis.
 *
 * The price takes the distinct value phi_label[k] in state k and the add-on
 * the distinct value q_label[k], so p(q | theta) is a point mass. After
 * factorizing, beta(k' | k) = p_G(q = q_label[k'] | phi = phi_label[k]).
 * Both label maps must be permutations of 0..|Theta|-1.
 */
inline TransitionMatrix dag_to_beta_labeled(const CausalDag& dag, const StateSpace& space, const Eigen::VectorXd& mu,
                                            const std::vector<std::size_t>& phi_label,
                                            const std::vector<std::size_t>& q_label) {
    const std::size_t n = space.size();
    if (static_cast<std::size_t>(mu.size()) != n) throw DomainError("dag_to_beta: mu has wrong length");
    require_valid(dag, space.num_variables());
    if (dag.signal_node()) throw UnsupportedDag("dag_to_beta: signal nodes are not supported");
    if (!is_perfect(dag)) throw UnsupportedDag("dag_to_beta: DAG is not perfect (some parent set is not a clique)");
    auto is_perm = [n](std::vector<std::size_t> p) {
        if (p.size() != n) return false;
        std::sort(p.begin(), p.end());
        for (std::size_t i = 0; i < n; ++i)
            if (p[i] != i) return false;
        return true;
    };
    if (!is_perm(phi_label) || !is_perm(q_label)) throw DomainError("dag_to_beta: labels must be permutations");

    const std::size_t phi = dag.price_node(), q = dag.addon_node();
    std::vector<std::size_t> dims(dag.size());
    for (std::size_t i = 0; i < dag.size(); ++i)
        dims[i] = dag.node(i).kind == NodeKind::state_var ? space.variable(dag.node(i).variable).domain.size() : n;
    Table joint(dims);
    std::vector<std::size_t> a(dag.size(), 0);
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < dag.size(); ++i)
            if (dag.node(i).kind == NodeKind::state_var) a[i] = space.value(k, dag.node(i).variable);
        a[phi] = phi_label[k];
        a[q] = q_label[k];
        joint.at(a) += mu(static_cast<Eigen::Index>(k));
    }
    const Table pg = factorize(dag, joint);
    const std::vector<std::size_t> axes{phi, q};
    const Table m = pg.marginal(axes);

    Eigen::MatrixXd b(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t k = 0; k < n; ++k) {
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) row += m.at(std::vector<std::size_t>{phi_label[k], q_label[j]});
        if (row <= 0.0) throw UnsupportedDag("dag_to_beta: price of state " + space.label(k) + " has zero distorted mass");
        for (std::size_t j = 0; j < n; ++j)
            b(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) =
                m.at(std::vector<std::size_t>{phi_label[k], q_label[j]}) / row;
    }
    return TransitionMatrix(std::move(b));
}

inline TransitionMatrix dag_to_beta(const CausalDag& dag, const StateSpace& space, const Eigen::VectorXd& mu) {
    std::vector<std::size_t> id(space.size());
    std::iota(id.begin(), id.end(), std::size_t{0});
    return dag_to_beta_labeled(dag, space, mu, id, id);
}

inline TransitionMatrix type_to_beta(const CognitiveType& t, const StateSpace& space, const Eigen::VectorXd& mu) {
    if (t.is_coarse()) return coarse_to_beta(space, mu, t.coarse_model().variables);
    return dag_to_beta(t.dag(), space, mu);
}

inline std::vector<TransitionMatrix> types_to_betas(const std::vector<CognitiveType>& types, const StateSpace& space,
                                                    const Eigen::VectorXd& mu) {
    std::vector<TransitionMatrix> out;
    out.reserve(types.size());
    for (const auto& t : types) out.push_back(type_to_beta(t, space, mu));
    return out;
}

} // namespace discern
