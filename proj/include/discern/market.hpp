#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "discern/beliefs.hpp"
#include "discern/errors.hpp"
#include "discern/state_space.hpp"

namespace discern {

/// Exploitative: the add-on is a transfer to the firm. Beneficial: both sides enjoy it.
enum class Variant { exploitative, beneficial };

inline const char* to_string(Variant v) { return v == Variant::exploitative ? "exploitative" : "beneficial"; }

namespace tolerance {
inline constexpr double mu_floor = 1e-12;     ///< minimum probability of a state
inline constexpr double mu_sum = 1e-9;        ///< |sum(mu) - 1|
inline constexpr double s_gap = 1e-9;         ///< minimum gap between distinct S values
inline constexpr double convergence = 1e-12;  ///< default sup-norm step for value iteration
inline constexpr double interior = 1e-9;      ///< margin for 1/2 S < q_bar < S
inline constexpr double tie = 1e-9;           ///< estimates within this are tied
inline constexpr double identity = 1e-12;     ///< beta == I for rational-type detection
} // namespace tolerance

/**
 * Market primitives: states, their distribution mu, potential add-on S,
 * consumer valuation v*, production cost c, the add-on variant and the set of
 * cognitive types. Validated on construction and immutable afterwards.
 */
class MarketSpec {
public:
    MarketSpec(StateSpace space, Eigen::VectorXd mu, Eigen::VectorXd s, double v_star, double c, Variant variant,
               std::vector<CognitiveType> types)
        : space_(std::move(space)), mu_(std::move(mu)), s_(std::move(s)), v_star_(v_star), c_(c),
          variant_(variant), types_(std::move(types)) {
        validate();
    }

    const StateSpace& space() const noexcept { return space_; }
    std::size_t num_states() const noexcept { return space_.size(); }
    const Eigen::VectorXd& mu() const noexcept { return mu_; }
    const Eigen::VectorXd& S() const noexcept { return s_; }
    double S(std::size_t k) const { return s_(static_cast<Eigen::Index>(k)); }
    double v_star() const noexcept { return v_star_; }
    double c() const noexcept { return c_; }
    double delta() const noexcept { return v_star_ - c_; }
    Variant variant() const noexcept { return variant_; }
    const std::vector<CognitiveType>& types() const noexcept { return types_; }

    double s_min() const { return s_.minCoeff(); }
    double s_max() const { return s_.maxCoeff(); }
    double s_bar() const { return mu_.dot(s_); }

    MarketSpec with_types(std::vector<CognitiveType> types) const {
        return MarketSpec(space_, mu_, s_, v_star_, c_, variant_, std::move(types));
    }

    std::optional<std::size_t> find_type(std::string_view name) const {
        for (std::size_t i = 0; i < types_.size(); ++i)
            if (types_[i].name == name) return i;
        return std::nullopt;
    }

    friend bool operator==(const MarketSpec& a, const MarketSpec& b) {
        return a.space_ == b.space_ && a.mu_ == b.mu_ && a.s_ == b.s_ && a.v_star_ == b.v_star_ && a.c_ == b.c_ &&
               a.variant_ == b.variant_ && a.types_ == b.types_;
    }

private:
    void validate() const {
        const auto n = static_cast<Eigen::Index>(space_.size());
        if (mu_.size() != n) throw SpecError("mu", "expected " + std::to_string(n) + " probabilities");
        if (s_.size() != n) throw SpecError("S", "expected " + std::to_string(n) + " values");
        for (Eigen::Index k = 0; k < n; ++k) {
            if (!std::isfinite(mu_(k)) || mu_(k) < tolerance::mu_floor)
                throw SpecError("mu", "state " + space_.label(static_cast<std::size_t>(k)) +
                                          " needs positive probability (full support)");
            if (!std::isfinite(s_(k)) || s_(k) <= 0.0)
                throw SpecError("S", "state " + space_.label(static_cast<std::size_t>(k)) + " needs S > 0");
        }
        if (std::abs(mu_.sum() - 1.0) > tolerance::mu_sum)
            throw SpecError("mu", "probabilities sum to " + std::to_string(mu_.sum()) + ", expected 1");
        for (Eigen::Index a = 0; a < n; ++a)
            for (Eigen::Index b = a + 1; b < n; ++b)
                if (std::abs(s_(a) - s_(b)) <= tolerance::s_gap)
                    throw SpecError("S", "S must be one-to-one; states " + space_.label(static_cast<std::size_t>(a)) +
                                             " and " + space_.label(static_cast<std::size_t>(b)) + " collide");
        if (!std::isfinite(v_star_) || !std::isfinite(c_)) throw SpecError("v_star", "v_star and c must be finite");
        if (variant_ == Variant::exploitative && !(delta() > 0.0))
            throw SpecError("v_star", "exploitative variant needs delta = v_star - c > 0");
        if (variant_ == Variant::beneficial && !(delta() < 0.0))
            throw SpecError("v_star", "beneficial variant needs delta = v_star - c < 0");
        if (types_.empty()) throw SpecError("types", "at least one cognitive type is required");
        for (std::size_t t = 0; t < types_.size(); ++t) {
            const std::string field = "types[" + std::to_string(t) + "]";
            for (std::size_t u = 0; u < t; ++u)
                if (types_[u].name == types_[t].name) throw SpecError(field, "duplicate type name '" + types_[t].name + "'");
            if (types_[t].is_coarse()) {
                for (auto v : types_[t].coarse_model().variables)
                    if (v >= space_.num_variables()) throw SpecError(field, "variable index out of range");
            } else {
                auto viol = validate_dag(types_[t].dag(), space_.num_variables());
                if (!viol.empty()) throw SpecError(field, "invalid DAG: " + viol.front().message);
            }
        }
    }

    StateSpace space_;
    Eigen::VectorXd mu_;
    Eigen::VectorXd s_;
    double v_star_;
    double c_;
    Variant variant_;
    std::vector<CognitiveType> types_;
};

// ---- supply side ---------------------------------------------------------

/// Entry threshold solving price - c + pi S(state) = 0. Not clamped to [0, 1].
inline double pi_star(const MarketSpec& spec, std::size_t state, double price) {
    return (spec.c() - price) / spec.S(state);
}

/// Mean add-on among active firms, (1 + pi*) / 2 * S.
inline double mean_addon(const MarketSpec& spec, std::size_t state, double threshold) {
    if (!(threshold >= 0.0 && threshold <= 1.0)) throw DomainError("mean_addon: threshold outside [0, 1]");
    return 0.5 * (1.0 + threshold) * spec.S(state);
}

struct AddonInterval {
    double lo;
    double hi;
};

/// Support of the add-on among active firms: U[pi* S, S].
inline AddonInterval addon_interval(const MarketSpec& spec, std::size_t state, double threshold) {
    if (!(threshold >= 0.0 && threshold <= 1.0)) throw DomainError("addon_interval: threshold outside [0, 1]");
    return {threshold * spec.S(state), spec.S(state)};
}

/// h = S + c - 2 q_bar.
inline double price_from_addon(const MarketSpec& spec, std::size_t state, double q_bar) {
    return spec.S(state) + spec.c() - 2.0 * q_bar;
}

// ---- primitive conditions ------------------------------------------------

struct ConditionReport {
    bool condition9 = false;    ///< S_max - S_min < 2 delta < S_min
    bool condition16 = false;   ///< -2/3 delta < S_min < S_max < -delta
    bool ree_condition = false; ///< interior REE exists for this variant
    std::string guarantee;      ///< which existence result applies, if any
};

inline ConditionReport check_conditions(const MarketSpec& spec) {
    const double d = spec.delta(), lo = spec.s_min(), hi = spec.s_max();
    ConditionReport r;
    r.condition9 = (hi - lo < 2.0 * d) && (2.0 * d < lo);
    r.condition16 = (-2.0 / 3.0 * d < lo) && (lo < hi) && (hi < -d);
    if (spec.variant() == Variant::exploitative) {
        r.ree_condition = 2.0 * d < lo;
        r.guarantee = r.condition9 ? "interior equilibrium exists and is unique for every type set"
                      : r.ree_condition ? "interior REE exists; other type sets are not guaranteed"
                                        : "no existence guarantee";
    } else {
        // 1/2 S < (S - delta)/3 < S  <=>  -delta/2 < S < -2 delta
        r.ree_condition = (-0.5 * d < lo) && (hi < -2.0 * d);
        r.guarantee = r.condition16 ? "interior equilibrium exists and is unique for every type set"
                      : r.ree_condition ? "interior REE exists; other type sets are not guaranteed"
                                        : "no existence guarantee";
    }
    return r;
}

} // namespace discern
