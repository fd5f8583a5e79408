#include "mls/kernels.hpp"

namespace mls::kernels {

int resolve_threads(int requested) {
    return requested > 0 ? requested : omp_get_max_threads();
}

namespace {

inline double entry(const CovarianceSpec& cov, const Matrix& locs, Eigen::Index i, Eigen::Index j) {
    if (i == j) return cov.covariance(0.0, true);
    const double h = (locs.row(i) - locs.row(j)).norm();
    return cov.covariance(h, false);
}

}  // namespace

Matrix covariance_matrix_serial(const CovarianceSpec& cov, const Matrix& locations) {
    const auto n = locations.rows();
    Matrix c(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
            const double v = entry(cov, locations, i, j);
            c(i, j) = v;
            c(j, i) = v;
        }
    }
    return c;
}

Matrix covariance_matrix(const CovarianceSpec& cov, const Matrix& locations, int threads) {
    const auto n = locations.rows();
    Matrix c(n, n);
    const int nt = resolve_threads(threads);
#pragma omp parallel for schedule(dynamic, 16) num_threads(nt)
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
            const double v = entry(cov, locations, i, j);
            c(i, j) = v;
            c(j, i) = v;
        }
    }
    return c;
}

}  // namespace mls::kernels
