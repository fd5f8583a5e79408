#pragma once

// Test-only reference computations. Nothing here calls into the code paths it is used to
// check: mean functions are written out per family, Sigma_n is materialized, minima are
// found by brute-force grids.

#include <cmath>
#include <functional>
#include <limits>
#include <random>

#include "mls/model.hpp"

namespace oracle {

using mls::Matrix;
using mls::Vector;

/// Direct per-row formula for g(x; theta).
inline double mean_function(mls::ModelKind kind, const Eigen::RowVectorXd& x, const Vector& theta) {
    switch (kind) {
        case mls::ModelKind::LinearAdditive: return x.dot(theta.transpose());
        case mls::ModelKind::LogLinear: return std::log(x.dot(theta.transpose()));
        case mls::ModelKind::PolynomialSurface2D: {
            const double a = x[0], b = x[1];
            return theta[0] + theta[1] * a + theta[2] * b + theta[3] * a * a + theta[4] * b * b + theta[5] * a * b;
        }
        case mls::ModelKind::Logistic: {
            double lin = 0.0;
            for (Eigen::Index k = 1; k < theta.size(); ++k) lin += theta[k] * x[k - 1];
            return 1.0 / (1.0 + theta[0] * std::exp(-lin));
        }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

inline Vector mean_vector(mls::ModelKind kind, const Matrix& x, const Vector& theta) {
    Vector g(x.rows());
    for (Eigen::Index i = 0; i < x.rows(); ++i) g[i] = mean_function(kind, x.row(i), theta);
    return g;
}

/// Central differences with step 1e-6 (1 + |x_k|).
inline Vector finite_difference(const std::function<double(const Vector&)>& f, const Vector& x) {
    Vector grad(x.size());
    for (Eigen::Index k = 0; k < x.size(); ++k) {
        const double h = 1e-6 * (1.0 + std::abs(x[k]));
        Vector xp = x, xm = x;
        xp[k] += h;
        xm[k] -= h;
        grad[k] = (f(xp) - f(xm)) / (2.0 * h);
    }
    return grad;
}

/// (y - g)' Sigma_n (y - g) with Sigma_n = I - 11'/n formed explicitly.
inline double dense_modified_ls(const Vector& y, const Vector& g) {
    const auto n = y.size();
    const Matrix sigma = Matrix::Identity(n, n) - Matrix::Constant(n, n, 1.0 / static_cast<double>(n));
    const Vector r = y - g;
    return r.dot(sigma * r);
}

/// SCAD written from its derivative: integrates q_lambda from 0 to t by composite Simpson.
inline double scad_by_quadrature(double lambda, double a, double t, int intervals = 20000) {
    const auto q = [&](double u) {
        if (u <= lambda) return lambda;
        return std::max(a * lambda - u, 0.0) / (a - 1.0);
    };
    const double h = t / intervals;
    double s = q(0.0) + q(t);
    for (int i = 1; i < intervals; ++i) s += (i % 2 ? 4.0 : 2.0) * q(i * h);
    return s * h / 3.0;
}

inline double scad_value(double lambda, double a, double t) {
    if (t <= lambda) return lambda * t;
    if (t <= a * lambda) return (2 * a * lambda * t - t * t - lambda * lambda) / (2 * (a - 1));
    return lambda * lambda * (a + 1) / 2;
}

/// argmin over a uniform grid of step `step` on [lo, hi]; returns {argmin, min}.
inline std::pair<double, double> grid_min(const std::function<double(double)>& f, double lo, double hi, double step) {
    double best_x = lo;
    double best = f(lo);
    const auto steps = static_cast<long long>(std::ceil((hi - lo) / step));
    for (long long i = 1; i <= steps; ++i) {
        const double x = std::min(hi, lo + static_cast<double>(i) * step);
        const double v = f(x);
        if (v < best) {
            best = v;
            best_x = x;
        }
    }
    return {best_x, best};
}

/// Brute-force minimum of f over an m x m grid on [lo, hi]^2, refined by a finer local
/// grid around the best cell (two levels).
inline std::pair<Vector, double> grid_min_2d(const std::function<double(const Vector&)>& f, double lo, double hi,
                                              int m = 400) {
    Vector best(2);
    double best_val = std::numeric_limits<double>::infinity();
    const double step = (hi - lo) / (m - 1);
    Vector x(2);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            x << lo + i * step, lo + j * step;
            const double v = f(x);
            if (v < best_val) {
                best_val = v;
                best = x;
            }
        }
    }
    // Local refinement: the grid minimum is an upper bound on the true minimum, and the
    // refinement only tightens it.
    double span = step;
    for (int level = 0; level < 3; ++level) {
        const Vector center = best;
        const double fine = 2.0 * span / (m / 4 - 1);
        for (int i = 0; i < m / 4; ++i) {
            for (int j = 0; j < m / 4; ++j) {
                x << center[0] - span + i * fine, center[1] - span + j * fine;
                const double v = f(x);
                if (v < best_val) {
                    best_val = v;
                    best = x;
                }
            }
        }
        span = 2.0 * fine;
    }
    return {best, best_val};
}

/// Sample skewness and excess kurtosis.
inline std::pair<double, double> moments(const std::vector<double>& xs) {
    const double n = static_cast<double>(xs.size());
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= n;
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double x : xs) {
        const double d = x - mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    return {m3 / std::pow(m2, 1.5), m4 / (m2 * m2) - 3.0};
}

}  // namespace oracle
