#pragma once

#include <string_view>
#include <vector>

#include "mls/model.hpp"
#include "mls/penalty.hpp"

namespace mls {

/// PMLS: modified least squares on mean-centered residuals of y = log z.
/// POLS: ordinary least squares on y with an unpenalized intercept beta_0 prepended to theta.
/// Additive: least squares of g directly against the raw response z.
enum class Method { PMLS, POLS, Additive };

std::string_view to_string(Method method);
Method parse_method(std::string_view name);

struct ObjectiveSpec {
    Method method = Method::PMLS;
    ModelSpec model{ModelKind::LinearAdditive, 1};
    PenaltySpec penalty{};
    /// Per-theta flag; true excludes theta_j from the penalty sum. Empty means nothing exempt.
    std::vector<bool> penalty_exempt;

    /// Length of the parameter vector the objective takes: p, or p + 1 for POLS.
    std::size_t parameter_count() const { return model.dimension() + (method == Method::POLS ? 1 : 0); }

    /// Offset of theta_1 inside the parameter vector (1 for POLS, 0 otherwise).
    std::size_t theta_offset() const { return method == Method::POLS ? 1 : 0; }

    bool is_penalized(std::size_t theta_index) const {
        return penalty.family != PenaltyFamily::None &&
               (penalty_exempt.empty() || !penalty_exempt[theta_index]);
    }

    Scale required_scale() const { return method == Method::Additive ? Scale::Raw : Scale::Log; }

    void validate() const;
};

struct Residuals {
    Vector raw;       // y - g, y - beta_0 - g (POLS), or z - g (Additive)
    Vector centered;  // raw minus its mean; filled for PMLS only
};

/// x - mean(x). Equivalent to multiplying by I - 11'/n without forming the matrix.
Vector center(const Vector& x);

/// Throws ScaleMismatch if the data scale does not match the method.
void check_scale(const ObjectiveSpec& spec, const Dataset& data);

Residuals residuals(const ObjectiveSpec& spec, const Dataset& data, const Vector& params);

/// Sum of squares part: S_n for PMLS, plain residual sum of squares otherwise.
double smooth_value(const ObjectiveSpec& spec, const Dataset& data, const Vector& params);

/// n * sum_j p_lambda(|theta_j|) over penalized coefficients (POLS beta_0 never included).
double penalty_total(const ObjectiveSpec& spec, std::size_t n, const Vector& params);

/// smooth_value + penalty_total.
double objective_value(const ObjectiveSpec& spec, const Dataset& data, const Vector& params);

/// Gradient of the smooth part only; the penalty is handled by the solver's prox step.
Vector objective_gradient(const ObjectiveSpec& spec, const Dataset& data, const Vector& params);

}  // namespace mls
