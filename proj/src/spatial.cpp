#include "mls/spatial.hpp"

#include <cmath>
#include <random>
#include <string>

#include "mls/error.hpp"
#include "mls/kernels.hpp"

namespace mls {

double SamplingDesign::scale(std::size_t n) const {
    return std::pow(static_cast<double>(n), 1.0 / static_cast<double>(dimension));
}

Matrix sample_locations(const SamplingDesign& design, std::size_t n, std::uint64_t seed) {
    if (n == 0) throw ConfigError("sample_locations needs n >= 1");
    if (design.dimension < 1) throw ConfigError("sampling dimension must be positive");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double eta = design.scale(n);
    Matrix s(static_cast<Eigen::Index>(n), design.dimension);
    for (Eigen::Index i = 0; i < s.rows(); ++i) {
        for (Eigen::Index k = 0; k < s.cols(); ++k) s(i, k) = eta * unif(rng);
    }
    return s;
}

std::string_view to_string(CovarianceFamily family) {
    return family == CovarianceFamily::Exponential ? "exponential" : "gaussian";
}

CovarianceFamily parse_covariance_family(std::string_view name) {
    if (name == "exponential" || name == "exp") return CovarianceFamily::Exponential;
    if (name == "gaussian" || name == "gauss") return CovarianceFamily::Gaussian;
    throw ConfigError("unknown covariance family '" + std::string(name) + "'");
}

void CovarianceSpec::validate() const {
    if (!(range > 0.0)) throw ConfigError("covariance range must be positive");
    if (!(nugget >= 0.0 && nugget <= 1.0)) throw ConfigError("nugget proportion must lie in [0, 1]");
    if (!(sd >= 0.0)) throw ConfigError("field sd must be nonnegative");
    if (!std::isfinite(mean)) throw ConfigError("field mean must be finite");
}

double CovarianceSpec::correlation(double distance) const {
    const double t = distance / range;
    const double c = family == CovarianceFamily::Exponential ? std::exp(-t) : std::exp(-t * t);
    return (1.0 - nugget) * c;
}

double CovarianceSpec::covariance(double distance, bool same_point) const {
    const double var = sd * sd;
    if (same_point) return var;
    // Distinct sites at distance zero still share the continuous part only.
    return var * correlation(distance);
}

FieldSampler::FieldSampler(const CovarianceSpec& cov, const Matrix& locations) : cov_(cov) {
    cov.validate();
    const auto n = locations.rows();
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < i; ++j) {
            if ((locations.row(i) - locations.row(j)).squaredNorm() == 0.0) ++duplicates_;
        }
    }
    if (cov.sd == 0.0) {
        factor_ = Matrix::Zero(n, n);
        return;
    }
    const Matrix c = kernels::covariance_matrix(cov, locations);
    Eigen::LLT<Matrix> llt(c);
    if (llt.info() == Eigen::Success) {
        factor_ = llt.matrixL();
        return;
    }
    const double var = cov.sd * cov.sd;
    for (double jitter = 1e-10; jitter <= 1e-6 * 1.0000001; jitter *= 10.0) {
        Matrix cj = c;
        cj.diagonal().array() += jitter * var;
        llt.compute(cj);
        if (llt.info() == Eigen::Success) {
            factor_ = llt.matrixL();
            jitter_ = jitter;
            return;
        }
    }
    throw CovarianceNotPD("covariance matrix is not positive definite after jitter 1e-6");
}

Vector FieldSampler::draw(std::uint64_t seed) const {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector w(factor_.rows());
    for (Eigen::Index i = 0; i < w.size(); ++i) w[i] = normal(rng);
    Vector out = factor_.triangularView<Eigen::Lower>() * w;
    out.array() += cov_.mean;
    return out;
}

Vector simulate_field(const CovarianceSpec& cov, const Matrix& locations, std::uint64_t seed) {
    return FieldSampler(cov, locations).draw(seed);
}

Matrix simulate_covariates(std::size_t n, std::size_t p, double correlation, std::uint64_t seed,
                           CovariateStructure structure) {
    if (n == 0 || p == 0) throw ConfigError("simulate_covariates needs n, p >= 1");
    if (!(correlation >= 0.0 && correlation < 1.0)) throw ConfigError("covariate correlation must lie in [0, 1)");
    const auto pp = static_cast<Eigen::Index>(p);
    Matrix sigma(pp, pp);
    for (Eigen::Index j = 0; j < pp; ++j) {
        for (Eigen::Index k = 0; k < pp; ++k) {
            if (j == k) {
                sigma(j, k) = 1.0;
            } else if (structure == CovariateStructure::Equicorrelated) {
                sigma(j, k) = correlation;
            } else {
                sigma(j, k) = std::pow(correlation, static_cast<double>(std::abs(j - k)));
            }
        }
    }
    const Matrix chol = Eigen::LLT<Matrix>(sigma).matrixL();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix w(static_cast<Eigen::Index>(n), pp);
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
        for (Eigen::Index k = 0; k < pp; ++k) w(i, k) = normal(rng);
    }
    return w * chol.transpose();
}

}  // namespace mls
