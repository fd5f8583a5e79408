#include <doctest.h>

#include <cmath>
#include <vector>

#include "mls/error.hpp"
#include "mls/kernels.hpp"
#include "mls/spatial.hpp"

using namespace mls;

namespace {

double correlation(const std::vector<double>& a, const std::vector<double>& b) {
    const double n = static_cast<double>(a.size());
    double ma = 0, mb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

Matrix two_points(double distance) {
    Matrix m(2, 2);
    m << 0.0, 0.0, distance, 0.0;
    return m;
}

}  // namespace

TEST_CASE("single location stays in the unit square") {
    const Matrix s = sample_locations(SamplingDesign{}, 1, 3);
    REQUIRE(s.rows() == 1);
    CHECK(s(0, 0) >= 0.0);
    CHECK(s(0, 0) <= 1.0);
    CHECK(s(0, 1) >= 0.0);
    CHECK(s(0, 1) <= 1.0);
}

TEST_CASE("n = 100 locations lie in [0, 10]^2") {
    const Matrix s = sample_locations(SamplingDesign{}, 100, 8);
    CHECK(s.minCoeff() >= 0.0);
    CHECK(s.maxCoeff() <= 10.0);
}

TEST_CASE("location means approach eta_n / 2") {
    const std::size_t n = 100000;
    const Matrix s = sample_locations(SamplingDesign{}, n, 21);
    const double eta = std::sqrt(static_cast<double>(n));
    const double se = eta / std::sqrt(12.0 * static_cast<double>(n));
    for (Eigen::Index c = 0; c < 2; ++c) CHECK(std::abs(s.col(c).mean() - eta / 2.0) <= 3.0 * se);
}

TEST_CASE("locations are reproducible from the seed") {
    CHECK(sample_locations(SamplingDesign{}, 50, 4) == sample_locations(SamplingDesign{}, 50, 4));
    CHECK(sample_locations(SamplingDesign{}, 50, 4) != sample_locations(SamplingDesign{}, 50, 5));
}

TEST_CASE("covariance formula: sill, nugget share and decay") {
    const CovarianceSpec e{CovarianceFamily::Exponential, 2.0, 0.2, 0.5, 0.0};
    CHECK(e.covariance(0.0, true) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(e.covariance(2.0, false) == doctest::Approx(0.25 * 0.8 * std::exp(-1.0)).epsilon(1e-14));
    const CovarianceSpec g{CovarianceFamily::Gaussian, 1.0, 0.2, 1.0, 0.0};
    CHECK(g.covariance(2.0, false) == doctest::Approx(0.8 * std::exp(-4.0)).epsilon(1e-14));
    // Coincident but distinct points do not get the nugget.
    CHECK(g.covariance(0.0, false) == doctest::Approx(0.8).epsilon(1e-15));
}

TEST_CASE("covariance spec validation") {
    CHECK_THROWS_AS((CovarianceSpec{CovarianceFamily::Exponential, 0.0, 0.2, 1.0, 0.0}.validate()), ConfigError);
    CHECK_THROWS_AS((CovarianceSpec{CovarianceFamily::Exponential, 1.0, 1.5, 1.0, 0.0}.validate()), ConfigError);
    CHECK_THROWS_AS((CovarianceSpec{CovarianceFamily::Exponential, 1.0, 0.2, -1.0, 0.0}.validate()), ConfigError);
    CHECK_THROWS_AS(parse_covariance_family("matern"), ConfigError);
}

TEST_CASE("a single-site field is a scalar N(mu, sigma^2) draw") {
    const CovarianceSpec c{CovarianceFamily::Exponential, 1.0, 0.2, 0.5, 0.3};
    const Matrix loc = Matrix::Zero(1, 2);
    const FieldSampler sampler(c, loc);
    std::vector<double> v;
    for (std::uint64_t s = 0; s < 10000; ++s) v.push_back(sampler.draw(s)[0]);
    double m = 0, q = 0;
    for (double x : v) m += x;
    m /= 10000.0;
    for (double x : v) q += (x - m) * (x - m);
    q /= 9999.0;
    CHECK(std::abs(m - 0.3) <= 3.0 * 0.5 / 100.0);
    // var of the sample variance is about 2 sigma^4 / n
    CHECK(std::abs(q - 0.25) <= 4.0 * 0.25 * std::sqrt(2.0 / 10000.0));
}

TEST_CASE("pure nugget gives uncorrelated sites") {
    const CovarianceSpec c{CovarianceFamily::Exponential, 1.0, 1.0, 1.0, 0.0};
    const FieldSampler sampler(c, two_points(0.1));
    std::vector<double> a, b;
    for (std::uint64_t s = 0; s < 10000; ++s) {
        const Vector f = sampler.draw(s);
        a.push_back(f[0]);
        b.push_back(f[1]);
    }
    CHECK(std::abs(correlation(a, b)) <= 3.0 / std::sqrt(10000.0));
}

TEST_CASE("exponential range 2 at distance 2 correlates at 0.8 / e") {
    const CovarianceSpec c{CovarianceFamily::Exponential, 2.0, 0.2, 1.0, 0.0};
    const FieldSampler sampler(c, two_points(2.0));
    std::vector<double> a, b;
    for (std::uint64_t s = 0; s < 10000; ++s) {
        const Vector f = sampler.draw(1000 + s);
        a.push_back(f[0]);
        b.push_back(f[1]);
    }
    const double rho = 0.8 * std::exp(-1.0);
    const double se = (1.0 - rho * rho) / std::sqrt(10000.0);
    CHECK(std::abs(correlation(a, b) - rho) <= 3.0 * se);
}

TEST_CASE("marginal variance at a fixed site is sigma^2") {
    const CovarianceSpec c{CovarianceFamily::Gaussian, 1.0, 0.2, 0.7, -1.0};
    const Matrix loc = sample_locations(SamplingDesign{}, 30, 2);
    const FieldSampler sampler(c, loc);
    std::vector<double> v;
    for (std::uint64_t s = 0; s < 10000; ++s) v.push_back(sampler.draw(s)[7]);
    double m = 0, q = 0;
    for (double x : v) m += x;
    m /= 10000.0;
    for (double x : v) q += (x - m) * (x - m);
    q /= 9999.0;
    const double s2 = 0.49;
    CHECK(std::abs(q - s2) <= 4.0 * s2 * std::sqrt(2.0 / 10000.0));
}

TEST_CASE("fields are bitwise reproducible and duplicates are tolerated") {
    const CovarianceSpec c{CovarianceFamily::Gaussian, 2.0, 0.2, 0.5, 0.1};
    const Matrix loc = sample_locations(SamplingDesign{}, 80, 6);
    CHECK(simulate_field(c, loc, 9) == simulate_field(c, loc, 9));

    Matrix dup(3, 2);
    dup << 0.0, 0.0, 0.0, 0.0, 1.0, 1.0;
    const FieldSampler sampler(c, dup);
    CHECK(sampler.duplicate_pairs() == 1);
    CHECK(sampler.draw(1).allFinite());
}

TEST_CASE("Gaussian kernel without nugget needs jitter but factorizes") {
    const CovarianceSpec c{CovarianceFamily::Gaussian, 2.0, 0.0, 1.0, 0.0};
    Matrix loc(60, 2);
    for (Eigen::Index i = 0; i < 60; ++i) loc.row(i) << 0.01 * static_cast<double>(i), 0.0;
    const FieldSampler sampler(c, loc);
    CHECK(sampler.jitter() > 0.0);
    CHECK(sampler.jitter() <= 1e-6);
}

TEST_CASE("equicorrelated covariates") {
    const std::size_t n = 10000;
    const Matrix x = simulate_covariates(n, 4, 0.5, 17);
    const double se = (1.0 - 0.25) / std::sqrt(static_cast<double>(n));
    for (Eigen::Index j = 0; j < 4; ++j) {
        for (Eigen::Index k = j + 1; k < 4; ++k) {
            std::vector<double> a(x.col(j).data(), x.col(j).data() + n), b(x.col(k).data(), x.col(k).data() + n);
            CHECK(std::abs(correlation(a, b) - 0.5) <= 3.0 * se);
        }
    }
    const Matrix z = simulate_covariates(n, 3, 0.0, 18);
    std::vector<double> a(z.col(0).data(), z.col(0).data() + n), b(z.col(2).data(), z.col(2).data() + n);
    CHECK(std::abs(correlation(a, b)) <= 3.0 / std::sqrt(static_cast<double>(n)));

    const Matrix one = simulate_covariates(n, 1, 0.5, 19);
    const double var = (one.array() - one.mean()).square().sum() / static_cast<double>(n - 1);
    CHECK(std::abs(var - 1.0) <= 4.0 * std::sqrt(2.0 / static_cast<double>(n)));
}

TEST_CASE("AR1 covariates decay with lag") {
    const std::size_t n = 10000;
    const Matrix x = simulate_covariates(n, 3, 0.5, 23, CovariateStructure::AR1);
    std::vector<double> a(x.col(0).data(), x.col(0).data() + n), c(x.col(2).data(), x.col(2).data() + n);
    CHECK(std::abs(correlation(a, c) - 0.25) <= 3.0 * (1.0 - 0.0625) / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("parallel covariance matrix equals the serial reference bitwise") {
    for (auto fam : {CovarianceFamily::Exponential, CovarianceFamily::Gaussian}) {
        const CovarianceSpec c{fam, 1.5, 0.2, 0.8, 0.0};
        const Matrix loc = sample_locations(SamplingDesign{}, 257, 12);
        const Matrix serial = kernels::covariance_matrix_serial(c, loc);
        for (int threads : {1, 2, 3, 8}) CHECK(kernels::covariance_matrix(c, loc, threads) == serial);
        CHECK(serial == serial.transpose());
    }
}

TEST_CASE("parallel index loop matches the serial loop and rethrows") {
    std::vector<double> serial(100), parallel(100);
    kernels::for_each_index_serial(100, [&](std::size_t i) { serial[i] = std::sqrt(static_cast<double>(i)); });
    kernels::for_each_index(100, 4, [&](std::size_t i) { parallel[i] = std::sqrt(static_cast<double>(i)); });
    CHECK(serial == parallel);
    CHECK_THROWS_AS(kernels::for_each_index(10, 3,
                                            [](std::size_t i) {
                                                if (i == 7) throw DataError("boom");
                                            }),
                    DataError);
}
