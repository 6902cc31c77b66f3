#pragma once

// Reference computations written independently of the library, used as test oracles.

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace oracle {

using Vec = std::vector<double>;
using Mat = std::vector<std::vector<double>>;

/// Gaussian elimination with partial pivoting.
inline Vec gauss_solve(Mat a, Vec b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        std::swap(a[col], a[piv]);
        std::swap(b[col], b[piv]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    Vec x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t c = i + 1; c < n; ++c) s -= a[i][c] * x[c];
        x[i] = s / a[i][i];
    }
    return x;
}

/// sign = +1: q = 1/2 (S - d + min_t B_t q); sign = -1: q = 1/2 (S - d - max_t B_t q).
inline Vec bellman(const Vec& q, const Vec& s, double d, const std::vector<Mat>& betas, double sign) {
    Vec out(q.size());
    for (std::size_t k = 0; k < q.size(); ++k) {
        double best = sign > 0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
        for (const auto& b : betas) {
            double e = 0.0;
            for (std::size_t j = 0; j < q.size(); ++j) e += b[k][j] * q[j];
            best = sign > 0 ? std::min(best, e) : std::max(best, e);
        }
        out[k] = 0.5 * (s[k] - d + sign * best);
    }
    return out;
}

/**
 * Exploitative fixed point by exhaustive policy search: for every assignment
 * of a type to each state solve the linear system, keep the one that is a
 * fixed point of the min operator.
 */
inline Vec exhaustive_fixed_point(const Vec& s, double d, const std::vector<Mat>& betas) {
    const std::size_t n = s.size(), m = betas.size();
    std::vector<std::size_t> pol(n, 0);
    Vec best;
    double best_res = std::numeric_limits<double>::infinity();
    while (true) {
        Mat a(n, Vec(n, 0.0));
        Vec rhs(n);
        for (std::size_t k = 0; k < n; ++k) {
            for (std::size_t j = 0; j < n; ++j) a[k][j] = (k == j ? 1.0 : 0.0) - 0.5 * betas[pol[k]][k][j];
            rhs[k] = 0.5 * (s[k] - d);
        }
        const Vec q = gauss_solve(a, rhs);
        const Vec tq = bellman(q, s, d, betas, 1.0);
        double res = 0.0;
        for (std::size_t k = 0; k < n; ++k) res = std::max(res, std::abs(tq[k] - q[k]));
        if (res < best_res) {
            best_res = res;
            best = q;
        }
        std::size_t i = 0;
        while (i < n && ++pol[i] == m) pol[i++] = 0;
        if (i == n) break;
    }
    return best;
}

/// Coarse transition by direct enumeration over states given as value tuples.
inline Mat coarse_beta(const std::vector<std::vector<std::size_t>>& states, const Vec& mu,
                       const std::vector<std::size_t>& vars) {
    const std::size_t n = states.size();
    Mat b(n, Vec(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        double z = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            bool same = true;
            for (auto v : vars) same = same && states[i][v] == states[j][v];
            if (same) {
                b[i][j] = mu[j];
                z += mu[j];
            }
        }
        for (auto& x : b[i]) x /= z;
    }
    return b;
}

/**
 * Two-variable chain phi <- a -> b -> q:
 * beta(t' | t) = mu(t'_b | t_a) mu(t'_a | t'_b).
 */
inline Mat chain2_beta(const std::vector<std::vector<std::size_t>>& states, const Vec& mu, std::size_t a,
                       std::size_t b) {
    const std::size_t n = states.size();
    auto marg = [&](std::size_t var, std::size_t val) {
        double s = 0.0;
        for (std::size_t k = 0; k < n; ++k)
            if (states[k][var] == val) s += mu[k];
        return s;
    };
    auto joint = [&](std::size_t va, std::size_t xa, std::size_t vb, std::size_t xb) {
        double s = 0.0;
        for (std::size_t k = 0; k < n; ++k)
            if (states[k][va] == xa && states[k][vb] == xb) s += mu[k];
        return s;
    };
    Mat out(n, Vec(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double p_b_given_a = joint(a, states[i][a], b, states[j][b]) / marg(a, states[i][a]);
            const double p_a_given_b = joint(a, states[j][a], b, states[j][b]) / marg(b, states[j][b]);
            out[i][j] = p_b_given_a * p_a_given_b;
        }
    return out;
}

// ---- closed forms ----------------------------------------------------------

/// Three-state example with types {}, {1}, {2}, {1,2} and uniform mu: (q00, q01, q10).
inline Vec three_state_example(double s00, double s01, double s10, double d) {
    const double q00 = s00 - d;
    return {q00, (2.0 * (s01 - d) + q00) / 3.0, (2.0 * (s10 - d) + q00) / 3.0};
}

/// Beneficial two-state example, fully coarse type only: S = (k, 1).
inline Vec beneficial_coarse(double k, double d) { return {(5 * k - 4 * d - 1) / 12, (5 - 4 * d - k) / 12}; }

/// Same market with a rational type added.
inline Vec beneficial_with_rational(double k, double d) { return {(6 * k - 5 * d - 1) / 15, (1 - d) / 3}; }

} // namespace oracle
