#pragma once

#include <random>

#include "mls/model.hpp"

namespace fixture {

using mls::Dataset;
using mls::Matrix;
using mls::ModelKind;
using mls::ModelSpec;
using mls::Vector;

/// Random dataset whose covariates make `random_theta` feasible for the given kind.
inline Dataset random_dataset(ModelKind kind, std::size_t n, std::size_t p, std::mt19937_64& rng,
                              mls::Scale scale = mls::Scale::Log) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> pos(0.5, 2.0);
    std::uniform_real_distribution<double> sym(-2.0, 2.0);
    const std::size_t k = ModelSpec(kind, p).required_covariates();
    Dataset d;
    d.scale = scale;
    d.locations.resize(static_cast<Eigen::Index>(n), 2);
    d.covariates.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
    d.response.resize(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < d.locations.rows(); ++i) {
        d.locations(i, 0) = pos(rng);
        d.locations(i, 1) = pos(rng);
        for (Eigen::Index j = 0; j < d.covariates.cols(); ++j) {
            d.covariates(i, j) = kind == ModelKind::LogLinear ? pos(rng)
                                 : kind == ModelKind::PolynomialSurface2D ? sym(rng)
                                                                          : normal(rng);
        }
        d.response[i] = scale == mls::Scale::Raw ? pos(rng) : normal(rng);
    }
    return d;
}

inline Vector random_theta(ModelKind kind, std::size_t p, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> pos(0.2, 2.0);
    std::uniform_real_distribution<double> sym(-1.0, 1.0);
    Vector t(static_cast<Eigen::Index>(p));
    for (Eigen::Index j = 0; j < t.size(); ++j) {
        if (kind == ModelKind::LogLinear || (kind == ModelKind::Logistic && j == 0)) {
            t[j] = pos(rng);
        } else {
            t[j] = sym(rng);
        }
    }
    return t;
}

inline std::size_t dimension_for(ModelKind kind, std::size_t requested) {
    return kind == ModelKind::PolynomialSurface2D ? 6 : requested;
}

constexpr ModelKind all_kinds[] = {ModelKind::LogLinear, ModelKind::Logistic, ModelKind::PolynomialSurface2D,
                                   ModelKind::LinearAdditive};

}  // namespace fixture
