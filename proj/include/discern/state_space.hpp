#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "discern/errors.hpp"

namespace discern {

/// One exogenous state variable with a finite, ordered domain of labels.
struct Variable {
    std::string name;
    std::vector<std::string> domain;
};

/// A state is a tuple of domain indices, one per variable.
using StateTuple = std::vector<std::size_t>;

/**
 * Finite state space Theta built from named variables.
 *
 * By default Theta is the full cartesian product of the variable domains. A
 * support list may restrict Theta to a subset of the product (markets whose
 * state distribution puts no mass on some combinations). Either way the
 * states are indexed densely in lexicographic order over the domains, first
 * variable most significant, and every vector or matrix over states uses
 * that index.
 */
class StateSpace {
public:
    StateSpace() = default;

    explicit StateSpace(std::vector<Variable> variables)
        : variables_(std::move(variables)) {
        check_variables();
        StateTuple t(variables_.size(), 0);
        enumerate(0, t);
        finish();
    }

    StateSpace(std::vector<Variable> variables, std::vector<StateTuple> support)
        : variables_(std::move(variables)) {
        check_variables();
        for (std::size_t k = 0; k < support.size(); ++k) {
            const auto& t = support[k];
            if (t.size() != variables_.size())
                throw SpecError("states[" + std::to_string(k) + "]",
                                "tuple has " + std::to_string(t.size()) + " entries, expected " +
                                    std::to_string(variables_.size()));
            for (std::size_t i = 0; i < t.size(); ++i)
                if (t[i] >= variables_[i].domain.size())
                    throw SpecError("states[" + std::to_string(k) + "]",
                                    "value index out of range for variable '" + variables_[i].name + "'");
        }
        std::sort(support.begin(), support.end());
        if (std::adjacent_find(support.begin(), support.end()) != support.end())
            throw SpecError("states", "duplicate state in support");
        states_ = std::move(support);
        finish();
    }

    std::size_t size() const noexcept { return states_.size(); }
    std::size_t num_variables() const noexcept { return variables_.size(); }
    const std::vector<Variable>& variables() const noexcept { return variables_; }
    const Variable& variable(std::size_t i) const { return variables_.at(i); }

    std::span<const std::size_t> state(std::size_t k) const { return states_.at(k); }
    std::size_t value(std::size_t k, std::size_t var) const { return states_.at(k).at(var); }

    std::optional<std::size_t> index_of(const StateTuple& t) const {
        auto it = index_.find(t);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    std::optional<std::size_t> find_variable(std::string_view name) const {
        for (std::size_t i = 0; i < variables_.size(); ++i)
            if (variables_[i].name == name) return i;
        return std::nullopt;
    }

    /// True when the support is the whole cartesian product.
    bool is_full_product() const noexcept { return states_.size() == product_size(); }

    std::size_t product_size() const noexcept {
        std::size_t n = 1;
        for (const auto& v : variables_) n *= v.domain.size();
        return n;
    }

    /// "(0,1)"-style label built from domain labels.
    std::string label(std::size_t k) const {
        std::string out = "(";
        const auto& t = states_.at(k);
        for (std::size_t i = 0; i < t.size(); ++i) {
            if (i) out += ',';
            out += variables_[i].domain[t[i]];
        }
        return out + ")";
    }

    /// Same projection onto the listed variables.
    bool agree_on(std::size_t a, std::size_t b, std::span<const std::size_t> vars) const {
        for (auto v : vars)
            if (states_[a][v] != states_[b][v]) return false;
        return true;
    }

    friend bool operator==(const StateSpace& a, const StateSpace& b) {
        if (a.states_ != b.states_ || a.variables_.size() != b.variables_.size()) return false;
        for (std::size_t i = 0; i < a.variables_.size(); ++i)
            if (a.variables_[i].name != b.variables_[i].name ||
                a.variables_[i].domain != b.variables_[i].domain)
                return false;
        return true;
    }

private:
    void check_variables() const {
        if (variables_.empty()) throw SpecError("variables", "at least one variable is required");
        for (std::size_t i = 0; i < variables_.size(); ++i) {
            const auto& v = variables_[i];
            const std::string field = "variables[" + std::to_string(i) + "]";
            if (v.name.empty()) throw SpecError(field, "empty variable name");
            if (v.domain.empty()) throw SpecError(field, "domain of '" + v.name + "' is empty");
            for (std::size_t j = 0; j < i; ++j)
                if (variables_[j].name == v.name)
                    throw SpecError(field, "duplicate variable name '" + v.name + "'");
            auto d = v.domain;
            std::sort(d.begin(), d.end());
            if (std::adjacent_find(d.begin(), d.end()) != d.end())
                throw SpecError(field, "duplicate label in domain of '" + v.name + "'");
        }
    }

    void enumerate(std::size_t i, StateTuple& t) {
        if (i == variables_.size()) {
            states_.push_back(t);
            return;
        }
        for (std::size_t x = 0; x < variables_[i].domain.size(); ++x) {
            t[i] = x;
            enumerate(i + 1, t);
        }
    }

    void finish() {
        if (states_.size() < 2) throw SpecError("states", "state space needs at least two states");
        index_.clear();
        for (std::size_t k = 0; k < states_.size(); ++k) index_.emplace(states_[k], k);
    }

    std::vector<Variable> variables_;
    std::vector<StateTuple> states_;
    std::map<StateTuple, std::size_t> index_;
};

/// Convenience: n binary variables named t1..tn with labels "0","1".
inline std::vector<Variable> binary_variables(std::size_t n) {
    std::vector<Variable> vars;
    for (std::size_t i = 0; i < n; ++i) vars.push_back({"t" + std::to_string(i + 1), {"0", "1"}});
    return vars;
}

} // namespace discern
