#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "discern/errors.hpp"

namespace discern {

enum class NodeKind { price, addon, state_var, signal };

inline const char* to_string(NodeKind k) {
    switch (k) {
    case NodeKind::price: return "price";
    case NodeKind::addon: return "addon";
    case NodeKind::state_var: return "state_var";
    case NodeKind::signal: return "signal";
    }
    return "?";
}

struct DagNode {
    NodeKind kind;
    std::size_t variable = 0; ///< state-variable index, meaningful for state_var only
    std::string name;
};

using Edge = std::pair<std::size_t, std::size_t>; ///< (parent, child)

/**
 * Subjective causal model over the price phi, the add-on q, a subset of the
 * state variables and at most one private signal w.
 *
 * Nodes are kept in insertion order; edges are stored as a sorted set of
 * (parent, child) pairs. Structural rules are checked by validate_dag(), not
 * on insertion, so that invalid graphs can still be built and reported on.
 */
class CausalDag {
public:
    std::size_t add_node(NodeKind kind, std::string name, std::size_t variable = 0) {
        nodes_.push_back({kind, variable, std::move(name)});
        return nodes_.size() - 1;
    }
    std::size_t add_price(std::string name = "phi") { return add_node(NodeKind::price, std::move(name)); }
    std::size_t add_addon(std::string name = "q") { return add_node(NodeKind::addon, std::move(name)); }
    std::size_t add_state(std::size_t variable, std::string name) {
        return add_node(NodeKind::state_var, std::move(name), variable);
    }
    std::size_t add_signal(std::string name = "w") { return add_node(NodeKind::signal, std::move(name)); }

    void add_edge(std::size_t parent, std::size_t child) {
        if (parent >= nodes_.size() || child >= nodes_.size())
            throw DomainError("edge endpoint out of range");
        edges_.insert({parent, child});
    }

    std::size_t size() const noexcept { return nodes_.size(); }
    const DagNode& node(std::size_t i) const { return nodes_.at(i); }
    const std::vector<DagNode>& nodes() const noexcept { return nodes_; }
    const std::set<Edge>& edges() const noexcept { return edges_; }
    bool has_edge(std::size_t a, std::size_t b) const { return edges_.count({a, b}) > 0; }
    bool adjacent(std::size_t a, std::size_t b) const { return has_edge(a, b) || has_edge(b, a); }

    /// R(i): parents in increasing node order.
    std::vector<std::size_t> parents(std::size_t i) const {
        std::vector<std::size_t> out;
        for (const auto& [p, c] : edges_)
            if (c == i) out.push_back(p);
        std::sort(out.begin(), out.end());
        return out;
    }

    std::vector<std::size_t> children(std::size_t i) const {
        std::vector<std::size_t> out;
        for (const auto& [p, c] : edges_)
            if (p == i) out.push_back(c);
        return out;
    }

    std::optional<std::size_t> find_kind(NodeKind k) const {
        for (std::size_t i = 0; i < nodes_.size(); ++i)
            if (nodes_[i].kind == k) return i;
        return std::nullopt;
    }
    std::optional<std::size_t> find_name(std::string_view name) const {
        for (std::size_t i = 0; i < nodes_.size(); ++i)
            if (nodes_[i].name == name) return i;
        return std::nullopt;
    }
    std::optional<std::size_t> state_node(std::size_t variable) const {
        for (std::size_t i = 0; i < nodes_.size(); ++i)
            if (nodes_[i].kind == NodeKind::state_var && nodes_[i].variable == variable) return i;
        return std::nullopt;
    }

    std::size_t price_node() const { return require(NodeKind::price); }
    std::size_t addon_node() const { return require(NodeKind::addon); }
    std::optional<std::size_t> signal_node() const { return find_kind(NodeKind::signal); }

    /// Kahn order; empty optional when the graph has a cycle.
    std::optional<std::vector<std::size_t>> topological_order() const {
        std::vector<std::size_t> indeg(nodes_.size(), 0);
        for (const auto& e : edges_) ++indeg[e.second];
        std::queue<std::size_t> ready;
        for (std::size_t i = 0; i < nodes_.size(); ++i)
            if (indeg[i] == 0) ready.push(i);
        std::vector<std::size_t> order;
        while (!ready.empty()) {
            auto i = ready.front();
            ready.pop();
            order.push_back(i);
            for (auto c : children(i))
                if (--indeg[c] == 0) ready.push(c);
        }
        if (order.size() != nodes_.size()) return std::nullopt;
        return order;
    }

    /// Copy with the signal node (and its edges) removed. Node indices after it shift down.
    CausalDag without_signal() const {
        auto w = signal_node();
        if (!w) return *this;
        CausalDag out;
        std::vector<std::size_t> remap(nodes_.size());
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            if (i == *w) continue;
            remap[i] = out.add_node(nodes_[i].kind, nodes_[i].name, nodes_[i].variable);
        }
        for (const auto& [p, c] : edges_)
            if (p != *w && c != *w) out.add_edge(remap[p], remap[c]);
        return out;
    }

    friend bool operator==(const CausalDag& a, const CausalDag& b) {
        if (a.nodes_.size() != b.nodes_.size() || a.edges_ != b.edges_) return false;
        for (std::size_t i = 0; i < a.nodes_.size(); ++i)
            if (a.nodes_[i].kind != b.nodes_[i].kind || a.nodes_[i].name != b.nodes_[i].name ||
                (a.nodes_[i].kind == NodeKind::state_var && a.nodes_[i].variable != b.nodes_[i].variable))
                return false;
        return true;
    }

private:
    std::size_t require(NodeKind k) const {
        auto i = find_kind(k);
        if (!i) throw DomainError(std::string("DAG has no ") + to_string(k) + " node");
        return *i;
    }

    std::vector<DagNode> nodes_;
    std::set<Edge> edges_;
};

struct DagViolation {
    std::string message;
    std::optional<std::size_t> node;
    std::optional<Edge> edge;
};

/**
 * Structural checks: acyclic, exactly one price and one add-on node, at most
 * one signal node, no link from phi or q into a state variable or the signal,
 * the signal is a sink whose parents are state variables, and state-variable
 * nodes are distinct and (when `num_variables` is given) in range.
 */
inline std::vector<DagViolation> validate_dag(const CausalDag& dag,
                                              std::optional<std::size_t> num_variables = std::nullopt) {
    std::vector<DagViolation> out;
    std::size_t n_price = 0, n_addon = 0, n_signal = 0;
    std::set<std::size_t> seen_vars;
    for (std::size_t i = 0; i < dag.size(); ++i) {
        const auto& nd = dag.node(i);
        switch (nd.kind) {
        case NodeKind::price: ++n_price; break;
        case NodeKind::addon: ++n_addon; break;
        case NodeKind::signal: ++n_signal; break;
        case NodeKind::state_var:
            if (!seen_vars.insert(nd.variable).second)
                out.push_back({"state variable represented by more than one node", i, {}});
            if (num_variables && nd.variable >= *num_variables)
                out.push_back({"state variable index out of range", i, {}});
            break;
        }
    }
    if (n_price != 1) out.push_back({"expected exactly one price node, found " + std::to_string(n_price), {}, {}});
    if (n_addon != 1) out.push_back({"expected exactly one add-on node, found " + std::to_string(n_addon), {}, {}});
    if (n_signal > 1) out.push_back({"at most one signal node is allowed", {}, {}});

    for (const auto& e : dag.edges()) {
        const auto pk = dag.node(e.first).kind;
        const auto ck = dag.node(e.second).kind;
        if (e.first == e.second) {
            out.push_back({"self loop", e.first, e});
            continue;
        }
        const bool endogenous_parent = pk == NodeKind::price || pk == NodeKind::addon;
        if (endogenous_parent && ck == NodeKind::state_var)
            out.push_back({"price/add-on node cannot cause a state variable", e.second, e});
        if (endogenous_parent && ck == NodeKind::signal)
            out.push_back({"price/add-on node cannot cause the signal", e.second, e});
        if (pk == NodeKind::signal) out.push_back({"signal node must not have children", e.first, e});
        if (ck == NodeKind::signal && pk != NodeKind::state_var)
            out.push_back({"signal parents must be state variables", e.first, e});
    }
    if (!dag.topological_order()) out.push_back({"graph contains a directed cycle", {}, {}});
    return out;
}

inline void require_valid(const CausalDag& dag, std::optional<std::size_t> num_variables = std::nullopt) {
    auto v = validate_dag(dag, num_variables);
    if (!v.empty()) {
        std::string msg = "invalid DAG: " + v.front().message;
        if (v.front().edge)
            msg += " (" + dag.node(v.front().edge->first).name + " -> " + dag.node(v.front().edge->second).name + ")";
        else if (v.front().node)
            msg += " (node " + dag.node(*v.front().node).name + ")";
        throw DomainError(msg);
    }
}

/// Parents of every node form a clique.
inline bool is_perfect(const CausalDag& dag) {
    for (std::size_t k = 0; k < dag.size(); ++k) {
        auto r = dag.parents(k);
        for (std::size_t a = 0; a < r.size(); ++a)
            for (std::size_t b = a + 1; b < r.size(); ++b)
                if (!dag.adjacent(r[a], r[b])) return false;
    }
    return true;
}

/**
 * True iff every path between i and j in the undirected skeleton passes
 * through a node of `cut`. Throws DomainError when i or j is in `cut`.
 */
inline bool blocks(const CausalDag& dag, const std::vector<std::size_t>& cut, std::size_t i, std::size_t j) {
    if (i >= dag.size() || j >= dag.size()) throw DomainError("blocks: node out of range");
    std::vector<char> removed(dag.size(), 0);
    for (auto m : cut) {
        if (m >= dag.size()) throw DomainError("blocks: node out of range");
        removed[m] = 1;
    }
    if (removed[i] || removed[j]) throw DomainError("blocks: endpoints must not belong to the blocking set");
    if (i == j) return false;

    std::vector<std::vector<std::size_t>> adj(dag.size());
    for (const auto& [p, c] : dag.edges()) {
        adj[p].push_back(c);
        adj[c].push_back(p);
    }
    std::vector<char> seen(dag.size(), 0);
    std::queue<std::size_t> frontier;
    frontier.push(i);
    seen[i] = 1;
    while (!frontier.empty()) {
        auto u = frontier.front();
        frontier.pop();
        if (u == j) return false;
        for (auto v : adj[u])
            if (!seen[v] && !removed[v]) {
                seen[v] = 1;
                frontier.push(v);
            }
    }
    return true;
}

/// DAG form of a coarse type: clique on M (ordered by index) with R(phi) = R(q) = M.
inline CausalDag encode_coarse(const std::vector<std::size_t>& vars, const std::vector<std::string>& names = {}) {
    CausalDag g;
    std::vector<std::size_t> ids;
    for (auto v : vars)
        ids.push_back(g.add_state(v, v < names.size() ? names[v] : "t" + std::to_string(v + 1)));
    auto phi = g.add_price();
    auto q = g.add_addon();
    for (std::size_t a = 0; a < ids.size(); ++a) {
        for (std::size_t b = a + 1; b < ids.size(); ++b) g.add_edge(ids[a], ids[b]);
        g.add_edge(ids[a], phi);
        g.add_edge(ids[a], q);
    }
    return g;
}

/// phi <- first -> ... -> last -> q over the listed state variables.
inline CausalDag chain_dag(const std::vector<std::size_t>& path, const std::vector<std::string>& names = {}) {
    if (path.empty()) throw DomainError("chain_dag: empty path");
    CausalDag g;
    std::vector<std::size_t> ids;
    for (auto v : path) ids.push_back(g.add_state(v, v < names.size() ? names[v] : "t" + std::to_string(v + 1)));
    auto phi = g.add_price();
    auto q = g.add_addon();
    g.add_edge(ids.front(), phi);
    for (std::size_t a = 0; a + 1 < ids.size(); ++a) g.add_edge(ids[a], ids[a + 1]);
    g.add_edge(ids.back(), q);
    return g;
}

} // namespace discern
