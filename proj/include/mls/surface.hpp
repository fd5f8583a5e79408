#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "mls/dataset_io.hpp"
#include "mls/serialize.hpp"
#include "mls/solver.hpp"
#include "mls/spatial.hpp"

namespace mls {

/// Cross-section z = c2 y^2 + c1 y + c0 of a rotational slide. The defaults pass through
/// (2, 16) and (16, 2) and stay within [1.9, 16] on the default grid.
struct SurfaceCurve {
    double c2 = 0.07;
    double c1 = -2.26;
    double c0 = 20.24;
    double operator()(double y) const { return (c2 * y + c1) * y + c0; }
};

struct SurfaceGrid {
    double x_min = 0.0;
    double x_max = 10.0;
    std::size_t x_count = 22;
    double y_min = 2.0;
    double y_max = 16.0;
    std::size_t y_count = 31;
    std::size_t size() const { return x_count * y_count; }
};

/// Synthetic scan: z = sign * curve(y) * exp(eps(s)) on a regular (x, y) grid, eps a
/// Gaussian random field over the grid points.
struct SurfaceScene {
    SurfaceCurve curve;
    SurfaceGrid grid;
    CovarianceSpec error{CovarianceFamily::Gaussian, 1.0, 0.2, 0.02, 0.0};
    /// -1 reports depths (negative distances) as in a camera frame.
    int sign = 1;
    std::uint64_t seed = 1;

    void validate() const;
};

SurfaceScene scene_from_json(const Json& j);
Json to_json(const SurfaceScene& scene);

/// Grid points in x-major order. Throws SignChange if sign * curve is not bounded away
/// from zero on the grid.
PointCloud generate_scene(const SurfaceScene& scene, std::uint64_t seed);

/// Coefficient order of every comparison row.
inline constexpr std::array<const char*, 6> surface_terms{"intercept", "x", "y", "x2", "y2", "xy"};

struct SurfaceFit {
    Method method = Method::PMLS;
    std::array<double, 6> coefficients{};  // raw z scale, sign re-applied
    double lambda = 0.0;
    double bic = 0.0;
    bool converged = false;

    /// Indices (into surface_terms) with a nonzero coefficient.
    std::vector<std::size_t> active_set() const;
};

struct SurfaceOptions {
    PenaltyFamily penalty = PenaltyFamily::Scad;
    double scad_a = 3.7;
    std::size_t path_size = 30;
    SolverConfig solver = default_solver();
    std::vector<Method> methods{Method::Additive, Method::POLS, Method::PMLS};
    /// Sweep budget per POLS fit. The penalized POLS objective has no minimizer here: it is flat
    /// along (beta_0 + log c, theta / c) while the penalty keeps falling as c grows, so descent
    /// never settles. The reported theta * exp(beta_0) does not move along that ray.
    int pols_max_iterations = 200;

    static SolverConfig default_solver();
};

/// Fits every requested method to |z| and re-applies the common sign of z.
///   Additive  penalized LS of |z| on (1, x, y, x^2, y^2, xy)
///   POLS      log|z| = beta_0 + log(theta' x~) + e, reported as theta * exp(beta_0)
///   PMLS      modified LS of log|z| with the intercept fixed at 1 (the centered objective
///             cannot see the scale), reported as theta * exp(mean residual)
/// Throws DataError if some z is zero or z changes sign.
std::vector<SurfaceFit> compare_methods(const PointCloud& cloud, const SurfaceOptions& options = {});

/// method,intercept,x,y,x2,y2,xy
std::string comparison_csv(const std::vector<SurfaceFit>& fits);
/// Fixed-width table for terminals.
std::string comparison_text(const std::vector<SurfaceFit>& fits);

}  // namespace mls
