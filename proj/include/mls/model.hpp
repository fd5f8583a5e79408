#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace mls {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Scale the response is stored on: raw z (multiplicative form) or y = log z.
enum class Scale { Raw, Log };

/// Sampled locations, covariates and responses. Row i of every member refers to s_i.
struct Dataset {
    Matrix locations;   // n x d
    Matrix covariates;  // n x k
    Vector response;    // n
    Scale scale = Scale::Log;

    std::size_t size() const { return static_cast<std::size_t>(response.size()); }

    /// Throws DataError when row counts disagree, n == 0, or a raw response is not strictly positive.
    void validate() const;

    /// Same locations and covariates, response replaced by log(response). Requires Raw scale.
    Dataset to_log() const;
};

enum class ModelKind { LogLinear, Logistic, PolynomialSurface2D, LinearAdditive };

std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view name);

/// Mean function g(x; theta) of one of the supported families.
///
/// Every family is a link applied to a linear index over a design matrix:
///   LinearAdditive       g = x'theta
///   LogLinear            g = log(x'theta)               (feasible iff x'theta > 0)
///   PolynomialSurface2D  g = theta . (1, x, y, x^2, y^2, xy)
///   Logistic             g = 1 / (1 + theta_1 exp(-theta_{2:p}' x))
/// For Logistic theta_1 sits outside the index.
class ModelSpec {
public:
    ModelSpec(ModelKind kind, std::size_t dimension);

    /// Dimension implied by a covariate count (PolynomialSurface2D always has p = 6).
    static ModelSpec for_covariates(ModelKind kind, std::size_t covariate_count);

    ModelKind kind() const noexcept { return kind_; }
    std::size_t dimension() const noexcept { return dimension_; }

    /// Number of covariate columns the model reads from a Dataset.
    std::size_t required_covariates() const noexcept;

    /// True when theta_j enters through the linear index (false only for Logistic theta_1).
    bool in_index(std::size_t j) const noexcept { return !(kind_ == ModelKind::Logistic && j == 0); }

    /// Column of the design matrix that multiplies theta_j. Requires in_index(j).
    std::size_t design_column(std::size_t j) const noexcept {
        return kind_ == ModelKind::Logistic ? j - 1 : j;
    }

private:
    ModelKind kind_;
    std::size_t dimension_;
};

/// Design matrix whose product with the index parameters forms the linear index.
Matrix design_matrix(const ModelSpec& model, const Dataset& data);

/// Six-term quadratic expansion (1, x, y, x^2, y^2, xy) of the first two covariate columns.
Matrix quadratic_terms(const Matrix& xy);

/// Evaluates g and its partial derivatives given a precomputed design.
///
/// The split between index() and link() lets the solver update the index in O(n)
/// when a single coordinate changes.
class ModelEvaluator {
public:
    ModelEvaluator(ModelSpec model, const Dataset& data);

    const ModelSpec& model() const noexcept { return model_; }
    const Matrix& design() const noexcept { return design_; }
    std::size_t rows() const noexcept { return static_cast<std::size_t>(design_.rows()); }

    Vector index(const Vector& theta) const;

    /// First row where (index, theta) is infeasible, if any.
    std::optional<std::size_t> infeasible_row(const Vector& index, const Vector& theta) const;

    /// g for every row. Throws InfeasibleParameter naming the first offending row.
    void values(const Vector& index, const Vector& theta, Vector& out) const;

    /// Column j of the Jacobian. Assumes feasibility was already established.
    void derivative_column(std::size_t j, const Vector& index, const Vector& theta, Vector& out) const;

    /// Same as values() but returns false instead of throwing.
    bool try_values(const Vector& index, const Vector& theta, Vector& out) const;

private:
    void check_theta(const Vector& theta) const;

    ModelSpec model_;
    Matrix design_;
};

/// g(x(s_i); theta) for every row.
Vector evaluate(const ModelSpec& model, const Dataset& data, const Vector& theta);

/// n x p Jacobian with entry (i, k) = dg(x(s_i); theta)/dtheta_k.
Matrix gradient(const ModelSpec& model, const Dataset& data, const Vector& theta);

}  // namespace mls
