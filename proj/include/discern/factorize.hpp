#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "discern/dag.hpp"
#include "discern/errors.hpp"
#include "discern/state_space.hpp"

namespace discern {

/// Dense non-negative table over a product of finite dimensions (last dimension fastest).
class Table {
public:
    Table() = default;
    explicit Table(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
        strides_.assign(dims_.size(), 1);
        std::size_t n = 1;
        for (std::size_t d = dims_.size(); d-- > 0;) {
            if (dims_[d] == 0) throw DomainError("Table: zero-sized dimension");
            strides_[d] = n;
            n *= dims_[d];
        }
        p_.assign(n, 0.0);
    }

    const std::vector<std::size_t>& dims() const noexcept { return dims_; }
    std::size_t rank() const noexcept { return dims_.size(); }
    std::size_t size() const noexcept { return p_.size(); }

    double& operator[](std::size_t flat) { return p_[flat]; }
    double operator[](std::size_t flat) const { return p_[flat]; }

    std::size_t flat_index(std::span<const std::size_t> a) const {
        std::size_t f = 0;
        for (std::size_t d = 0; d < dims_.size(); ++d) f += a[d] * strides_[d];
        return f;
    }
    void unflatten(std::size_t flat, std::span<std::size_t> out) const {
        for (std::size_t d = 0; d < dims_.size(); ++d) {
            out[d] = flat / strides_[d];
            flat %= strides_[d];
        }
    }
    double at(std::span<const std::size_t> a) const { return p_[flat_index(a)]; }
    double& at(std::span<const std::size_t> a) { return p_[flat_index(a)]; }

    double sum() const { return std::accumulate(p_.begin(), p_.end(), 0.0); }

    /// Marginal over the listed axes, in the listed order.
    Table marginal(std::span<const std::size_t> keep) const {
        std::vector<std::size_t> kd;
        for (auto k : keep) kd.push_back(dims_.at(k));
        Table m(kd);
        std::vector<std::size_t> a(dims_.size()), b(keep.size());
        for (std::size_t f = 0; f < p_.size(); ++f) {
            if (p_[f] == 0.0) continue;
            unflatten(f, a);
            for (std::size_t i = 0; i < keep.size(); ++i) b[i] = a[keep[i]];
            m.at(b) += p_[f];
        }
        return m;
    }

private:
    std::vector<std::size_t> dims_;
    std::vector<std::size_t> strides_;
    std::vector<double> p_;
};

/**
 * Bayesian-network distortion of a joint: p_G(x) = prod_i p(x_i | x_R(i)).
 *
 * Axis i of `joint` is node i of `dag`. A factor whose conditioning event has
 * zero probability sets the whole product to 0, so the result is a
 * sub-distribution in general (a distribution for perfect DAGs).
 */
inline Table factorize(const CausalDag& dag, const Table& joint) {
    if (joint.rank() != dag.size())
        throw DomainError("factorize: joint has " + std::to_string(joint.rank()) + " axes, DAG has " +
                          std::to_string(dag.size()) + " nodes");
    if (std::abs(joint.sum() - 1.0) > 1e-9) throw DomainError("factorize: joint is not normalized");
    for (std::size_t f = 0; f < joint.size(); ++f)
        if (joint[f] < 0.0) throw DomainError("factorize: negative probability in joint");
    if (!dag.topological_order()) throw DomainError("factorize: graph contains a cycle");

    struct Factor {
        std::vector<std::size_t> family; // parents..., node
        std::vector<std::size_t> parents;
        Table fam, par;
    };
    std::vector<Factor> factors;
    for (std::size_t i = 0; i < dag.size(); ++i) {
        Factor f;
        f.parents = dag.parents(i);
        f.family = f.parents;
        f.family.push_back(i);
        f.fam = joint.marginal(f.family);
        f.par = joint.marginal(f.parents);
        factors.push_back(std::move(f));
    }

    Table out(joint.dims());
    std::vector<std::size_t> a(joint.rank()), fa, pa;
    for (std::size_t flat = 0; flat < out.size(); ++flat) {
        out.unflatten(flat, a);
        double prod = 1.0;
        for (const auto& f : factors) {
            pa.resize(f.parents.size());
            for (std::size_t k = 0; k < f.parents.size(); ++k) pa[k] = a[f.parents[k]];
            const double den = f.par.at(pa);
            if (den <= 0.0) {
                prod = 0.0;
                break;
            }
            fa.assign(pa.begin(), pa.end());
            fa.push_back(a[f.family.back()]);
            prod *= f.fam.at(fa) / den;
            if (prod == 0.0) break;
        }
        out[flat] = prod;
    }
    return out;
}

/**
 * Joint over the DAG's nodes induced by a fully revealing price: the price
 * node takes value k exactly in state k, the add-on follows `addon_law`
 * (|Theta| x K, rows are p(q | theta)), and the optional signal follows
 * `signal_law` (|Theta| x W). State-variable nodes carry the state's value.
 */
inline Table fully_revealing_joint(const CausalDag& dag, const StateSpace& space, const Eigen::VectorXd& mu,
                                   const Eigen::MatrixXd& addon_law,
                                   const Eigen::MatrixXd* signal_law = nullptr) {
    const std::size_t n = space.size();
    if (static_cast<std::size_t>(mu.size()) != n || static_cast<std::size_t>(addon_law.rows()) != n)
        throw DomainError("fully_revealing_joint: dimension mismatch with state space");
    const auto w = dag.signal_node();
    if (w && (!signal_law || static_cast<std::size_t>(signal_law->rows()) != n))
        throw DomainError("fully_revealing_joint: DAG has a signal node but no matching signal law");

    std::vector<std::size_t> dims(dag.size());
    for (std::size_t i = 0; i < dag.size(); ++i) {
        const auto& nd = dag.node(i);
        switch (nd.kind) {
        case NodeKind::price: dims[i] = n; break;
        case NodeKind::addon: dims[i] = static_cast<std::size_t>(addon_law.cols()); break;
        case NodeKind::signal: dims[i] = static_cast<std::size_t>(signal_law->cols()); break;
        case NodeKind::state_var:
            if (nd.variable >= space.num_variables())
                throw DomainError("fully_revealing_joint: DAG refers to unknown state variable");
            dims[i] = space.variable(nd.variable).domain.size();
            break;
        }
    }
    Table joint(dims);
    const std::size_t phi = dag.price_node(), q = dag.addon_node();
    const std::size_t n_w = w ? static_cast<std::size_t>(signal_law->cols()) : 1;
    std::vector<std::size_t> a(dag.size(), 0);
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < dag.size(); ++i)
            if (dag.node(i).kind == NodeKind::state_var) a[i] = space.value(k, dag.node(i).variable);
        a[phi] = k;
        for (std::size_t s = 0; s < n_w; ++s) {
            const double ps = w ? (*signal_law)(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(s)) : 1.0;
            if (w) a[*w] = s;
            for (Eigen::Index x = 0; x < addon_law.cols(); ++x) {
                a[q] = static_cast<std::size_t>(x);
                joint.at(a) += mu(static_cast<Eigen::Index>(k)) * ps * addon_law(static_cast<Eigen::Index>(k), x);
            }
        }
    }
    return joint;
}

/// Conditional table p_G(q | phi, w); rows where (phi, w) has zero distorted mass are undefined.
class SignalBelief {
public:
    SignalBelief(std::size_t prices, std::size_t signals, std::size_t addons)
        : prices_(prices), signals_(signals), addons_(addons), p_(prices * signals * addons, 0.0),
          defined_(prices * signals, 0) {}

    std::size_t num_prices() const noexcept { return prices_; }
    std::size_t num_signals() const noexcept { return signals_; }
    std::size_t num_addons() const noexcept { return addons_; }

    bool defined(std::size_t phi, std::size_t w) const { return defined_[phi * signals_ + w] != 0; }
    double operator()(std::size_t phi, std::size_t w, std::size_t q) const {
        return p_[(phi * signals_ + w) * addons_ + q];
    }

    double& cell(std::size_t phi, std::size_t w, std::size_t q) { return p_[(phi * signals_ + w) * addons_ + q]; }
    void set_defined(std::size_t phi, std::size_t w) { defined_[phi * signals_ + w] = 1; }

private:
    std::size_t prices_, signals_, addons_;
    std::vector<double> p_;
    std::vector<char> defined_;
};

/// Factorize, then condition the distorted joint on (phi, w).
inline SignalBelief belief_with_signal(const CausalDag& dag, const Table& joint) {
    const auto w = dag.signal_node();
    if (!w) throw DomainError("belief_with_signal: DAG has no signal node");
    const std::size_t phi = dag.price_node(), q = dag.addon_node();
    const Table pg = factorize(dag, joint);
    const std::vector<std::size_t> axes{phi, *w, q};
    const Table m = pg.marginal(axes);
    const auto& d = m.dims();
    SignalBelief out(d[0], d[1], d[2]);
    for (std::size_t a = 0; a < d[0]; ++a)
        for (std::size_t b = 0; b < d[1]; ++b) {
            double tot = 0.0;
            for (std::size_t c = 0; c < d[2]; ++c) tot += m.at(std::vector<std::size_t>{a, b, c});
            if (tot <= 1e-300) continue;
            out.set_defined(a, b);
            for (std::size_t c = 0; c < d[2]; ++c) out.cell(a, b, c) = m.at(std::vector<std::size_t>{a, b, c}) / tot;
        }
    return out;
}

} // namespace discern
