#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>

#include <Eigen/Dense>

#include "discern/errors.hpp"

namespace discern {

/// Row-stochastic belief matrix: row theta holds the weights beta(theta' | theta) on virtual states.
class TransitionMatrix {
public:
    static constexpr double row_sum_tolerance = 1e-10;
    static constexpr double negative_tolerance = 1e-12;

    TransitionMatrix() = default;

    explicit TransitionMatrix(Eigen::MatrixXd m) : m_(std::move(m)) {
        if (m_.rows() != m_.cols() || m_.rows() == 0) throw DomainError("transition matrix must be square and non-empty");
        for (Eigen::Index i = 0; i < m_.rows(); ++i) {
            for (Eigen::Index j = 0; j < m_.cols(); ++j) {
                double& x = m_(i, j);
                if (!std::isfinite(x)) throw DomainError("transition matrix has a non-finite entry");
                if (x < -negative_tolerance) throw DomainError("transition matrix has a negative entry");
                if (x < 0.0) x = 0.0;
            }
            if (std::abs(m_.row(i).sum() - 1.0) > row_sum_tolerance)
                throw DomainError("transition matrix row " + std::to_string(i) + " does not sum to 1");
        }
    }

    std::size_t size() const noexcept { return static_cast<std::size_t>(m_.rows()); }
    const Eigen::MatrixXd& matrix() const noexcept { return m_; }
    double operator()(std::size_t from, std::size_t to) const {
        return m_(static_cast<Eigen::Index>(from), static_cast<Eigen::Index>(to));
    }

    bool is_identity(double tol = 1e-12) const {
        return (m_ - Eigen::MatrixXd::Identity(m_.rows(), m_.cols())).cwiseAbs().maxCoeff() <= tol;
    }

    /// sup-norm of mu^T beta - mu^T.
    double invariance_error(const Eigen::VectorXd& mu) const {
        return (m_.transpose() * mu - mu).cwiseAbs().maxCoeff();
    }

    friend bool operator==(const TransitionMatrix& a, const TransitionMatrix& b) { return a.m_ == b.m_; }

private:
    Eigen::MatrixXd m_;
};

/// Subjective add-on estimate in `state`: sum over theta' of beta(theta' | state) q_bar(theta').
inline double addon_estimate(const TransitionMatrix& beta, std::size_t state, const Eigen::VectorXd& q_bar) {
    if (static_cast<std::size_t>(q_bar.size()) != beta.size() || state >= beta.size())
        throw DomainError("addon_estimate: dimension mismatch");
    return beta.matrix().row(static_cast<Eigen::Index>(state)).dot(q_bar);
}

} // namespace discern
