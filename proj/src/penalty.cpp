#include "mls/penalty.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "mls/error.hpp"

namespace mls {

std::string_view to_string(PenaltyFamily family) {
    switch (family) {
        case PenaltyFamily::None: return "none";
        case PenaltyFamily::Lasso: return "lasso";
        case PenaltyFamily::Scad: return "scad";
    }
    return "?";
}

PenaltyFamily parse_penalty_family(std::string_view name) {
    if (name == "none") return PenaltyFamily::None;
    if (name == "lasso") return PenaltyFamily::Lasso;
    if (name == "scad") return PenaltyFamily::Scad;
    throw ConfigError("unknown penalty '" + std::string(name) + "'");
}

void PenaltySpec::validate() const {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ConfigError("penalty lambda must be finite and >= 0");
    if (!(scad_a > 2.0)) throw ConfigError("SCAD shape parameter a must exceed 2");
}

double penalty_value(const PenaltySpec& spec, double t) {
    if (t < 0.0) throw NegativeArgument("penalty_value requires t >= 0, got " + std::to_string(t));
    const double lam = spec.lambda;
    switch (spec.family) {
        case PenaltyFamily::None: return 0.0;
        case PenaltyFamily::Lasso: return lam * t;
        case PenaltyFamily::Scad: {
            const double a = spec.scad_a;
            if (t <= lam) return lam * t;
            if (t <= a * lam) return (2.0 * a * lam * t - t * t - lam * lam) / (2.0 * (a - 1.0));
            return lam * lam * (a + 1.0) / 2.0;
        }
    }
    return 0.0;
}

double penalty_derivative(const PenaltySpec& spec, double t) {
    if (!(t > 0.0)) throw NonpositiveArgument("penalty_derivative requires t > 0, got " + std::to_string(t));
    const double lam = spec.lambda;
    switch (spec.family) {
        case PenaltyFamily::None: return 0.0;
        case PenaltyFamily::Lasso: return lam;
        case PenaltyFamily::Scad:
            if (t <= lam) return lam;
            return std::max(spec.scad_a * lam - t, 0.0) / (spec.scad_a - 1.0);
    }
    return 0.0;
}

double penalty_slope_at_zero(const PenaltySpec& spec) {
    return spec.family == PenaltyFamily::None ? 0.0 : spec.lambda;
}

double threshold(const PenaltySpec& spec, double z, double v) {
    if (!(v > 0.0)) throw NonpositiveCurvature("threshold requires curvature v > 0");
    const double lam = spec.lambda;
    switch (spec.family) {
        case PenaltyFamily::None: return z;
        case PenaltyFamily::Lasso: {
            const double cut = lam / v;
            if (std::abs(z) <= cut) return 0.0;
            return z > 0.0 ? z - cut : z + cut;
        }
        case PenaltyFamily::Scad: break;
    }
    if (lam == 0.0) return z;

    // Work with |z| and restore the sign. Each SCAD piece makes the scalar objective a
    // quadratic that is convex or concave, so its minimum over the piece is either the
    // clipped stationary point or an endpoint; compare all candidates.
    const double a = spec.scad_a;
    const double az = std::abs(z);
    const auto objective = [&](double u) { return 0.5 * v * (u - az) * (u - az) + penalty_value(spec, u); };

    std::array<double, 6> candidates{};
    std::size_t count = 0;
    candidates[count++] = 0.0;
    candidates[count++] = std::clamp(az - lam / v, 0.0, lam);
    const double inner_curv = v - 1.0 / (a - 1.0);
    if (inner_curv > 0.0) {
        const double u2 = (v * az - a * lam / (a - 1.0)) / inner_curv;
        candidates[count++] = std::clamp(u2, lam, a * lam);
    }
    candidates[count++] = lam;
    candidates[count++] = a * lam;
    candidates[count++] = std::max(az, a * lam);

    double best = 0.0;
    double best_val = objective(0.0);
    for (std::size_t i = 1; i < count; ++i) {
        const double val = objective(candidates[i]);
        if (val < best_val) {
            best_val = val;
            best = candidates[i];
        }
    }
    if (best == 0.0) return 0.0;
    return z > 0.0 ? best : -best;
}

}  // namespace mls
