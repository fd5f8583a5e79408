#pragma once

#include <string_view>

namespace mls {

enum class PenaltyFamily { None, Lasso, Scad };

std::string_view to_string(PenaltyFamily family);
PenaltyFamily parse_penalty_family(std::string_view name);

struct PenaltySpec {
    PenaltyFamily family = PenaltyFamily::None;
    double lambda = 0.0;
    double scad_a = 3.7;

    /// Throws ConfigError unless lambda >= 0 and scad_a > 2.
    void validate() const;

    PenaltySpec with_lambda(double value) const {
        PenaltySpec out = *this;
        out.lambda = value;
        return out;
    }
};

/// p_lambda(t) for t >= 0. Throws NegativeArgument for t < 0.
double penalty_value(const PenaltySpec& spec, double t);

/// q_lambda(t) = dp_lambda/dt for t > 0; kinks take the left-continuous value.
/// Throws NonpositiveArgument for t <= 0.
double penalty_derivative(const PenaltySpec& spec, double t);

/// q_lambda(0+), the slope that decides whether zero is a stationary point.
double penalty_slope_at_zero(const PenaltySpec& spec);

/// argmin_u  v (u - z)^2 / 2 + p_lambda(|u|), exact. Zero is returned as an exact 0.0.
/// Throws NonpositiveCurvature for v <= 0.
double threshold(const PenaltySpec& spec, double z, double v);

}  // namespace mls
