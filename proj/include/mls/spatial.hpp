#pragma once

#include <cstdint>
#include <string_view>

#include "mls/model.hpp"

namespace mls {

/// Increasing-domain stochastic design: s_i = eta_n * u_i with u_i ~ phi on the unit square.
struct SamplingDesign {
    enum class Density { Uniform };

    int dimension = 2;
    Density density = Density::Uniform;

    /// eta_n = n^(1/d).
    double scale(std::size_t n) const;
};

/// n x d matrix of locations in [0, eta_n]^d. Deterministic given the seed.
Matrix sample_locations(const SamplingDesign& design, std::size_t n, std::uint64_t seed);

enum class CovarianceFamily { Exponential, Gaussian };

std::string_view to_string(CovarianceFamily family);
CovarianceFamily parse_covariance_family(std::string_view name);

/// Stationary isotropic covariance with a nugget expressed as a share of the total variance:
///   C(h) = sd^2 [ (1 - nugget) c(|h| / range) + nugget 1{h = 0} ]
/// with c(t) = exp(-t) (Exponential) or exp(-t^2) (Gaussian).
struct CovarianceSpec {
    CovarianceFamily family = CovarianceFamily::Exponential;
    double range = 1.0;
    double nugget = 0.2;
    double sd = 1.0;
    double mean = 0.0;

    void validate() const;
    double correlation(double distance) const;  // C(h) / sd^2 for h != 0
    double covariance(double distance, bool same_point) const;
};

/// Draws from a Gaussian random field at fixed locations; factorizes the covariance once.
class FieldSampler {
public:
    /// Throws CovarianceNotPD if the jitter ladder 1e-10 .. 1e-6 (relative to sd^2) fails.
    FieldSampler(const CovarianceSpec& cov, const Matrix& locations);

    Vector draw(std::uint64_t seed) const;

    std::size_t size() const noexcept { return static_cast<std::size_t>(factor_.rows()); }
    double jitter() const noexcept { return jitter_; }
    /// Pairs of coincident locations seen at construction.
    std::size_t duplicate_pairs() const noexcept { return duplicates_; }

private:
    CovarianceSpec cov_;
    Matrix factor_;  // lower Cholesky factor
    double jitter_ = 0.0;
    std::size_t duplicates_ = 0;
};

/// mean * 1 + L w, w ~ N(0, I). Deterministic given the seed.
Vector simulate_field(const CovarianceSpec& cov, const Matrix& locations, std::uint64_t seed);

enum class CovariateStructure { Equicorrelated, AR1 };

/// n i.i.d. rows from N_p(0, Sigma) with unit diagonal; Sigma_jk = rho (equicorrelated)
/// or rho^|j-k| (AR1).
Matrix simulate_covariates(std::size_t n, std::size_t p, double correlation, std::uint64_t seed,
                           CovariateStructure structure = CovariateStructure::Equicorrelated);

}  // namespace mls
