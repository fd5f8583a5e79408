#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "mls/objective.hpp"

namespace mls {

enum class Initialization { Zeros, Warm, Provided };

struct SolverConfig {
    int max_outer_iterations = 500;
    double coordinate_tolerance = 1e-7;
    double objective_tolerance = 1e-10;
    double backtrack_factor = 0.5;
    int max_halvings = 30;

    Initialization initialization = Initialization::Zeros;
    /// Starting point for Warm and Provided; full parameter vector (beta_0 first for POLS).
    Vector start;

    /// Extra starts drawn uniformly on [-0.5, 0.5]^p; the best objective wins.
    int random_restarts = 0;
    std::uint64_t restart_seed = 0x5eed;

    /// For SCAD, also start from the unpenalized solution (nonconvex penalties have local minima).
    bool unpenalized_start = true;

    /// Full-parameter mask of coordinates held at their starting value.
    std::vector<bool> frozen;

    /// Count the POLS intercept in the BIC degrees of freedom.
    bool df_includes_intercept = false;

    void validate() const;
};

struct FitResult {
    Vector theta_hat;                    // beta_0 first for POLS
    std::vector<std::size_t> active_set;  // theta indices (beta_0 excluded) with an exactly nonzero estimate
    double objective = 0.0;              // Q_n
    double smooth_part = 0.0;            // S_n (or RSS for POLS/Additive)
    int iterations = 0;
    bool converged = false;
    double lambda = 0.0;
    double bic = std::numeric_limits<double>::infinity();
    bool bic_degenerate = false;
    std::vector<double> history;         // objective after each sweep, starting with the initial value
};

struct PathPoint {
    double lambda;
    FitResult fit;
};

struct PathResult {
    std::vector<PathPoint> points;  // lambda strictly decreasing
    std::size_t selected = 0;
    double lambda_max = 0.0;

    const FitResult& selected_fit() const { return points.at(selected).fit; }
};

/// Minimizes Q_n by cyclic coordinate descent.
///
/// Each coordinate step linearizes g around the current point, which turns the smooth part
/// into a scalar quadratic with curvature v_j = 2 |(centered) dg/dtheta_j|^2. The penalized
/// scalar problem is solved exactly by threshold(); the proposal is accepted only if it keeps
/// the parameters feasible and does not raise Q_n, otherwise it is halved toward the
/// current value. The recorded objective sequence is therefore nonincreasing.
FitResult fit(const ObjectiveSpec& spec, const Dataset& data, const SolverConfig& config);

/// Smallest lambda whose penalized solution is all zero at the null model (penalized
/// coordinates zero, the rest fitted). Returns 0 when the null model is stationary.
double lambda_max(const ObjectiveSpec& spec, const Dataset& data, const SolverConfig& config);

/// Warm-started fits over a log-spaced grid from lambda_max down to 1e-3 lambda_max,
/// selecting the smallest BIC (ties go to the larger lambda).
PathResult lambda_path(const ObjectiveSpec& spec, const Dataset& data, const SolverConfig& config,
                       std::size_t grid_size);

/// log(sigma^2) + log(n) df / n with sigma^2 = mean(r^2) - mean(r)^2 on the uncentered
/// residuals and df the number of nonzero penalized coefficients.
/// Throws DegenerateVariance when sigma^2 <= 0.
double bic(const FitResult& fit, const Dataset& data, const ObjectiveSpec& spec,
           bool df_includes_intercept = false);

/// Number of nonzero penalized coefficients (plus the POLS intercept if requested).
std::size_t degrees_of_freedom(const FitResult& fit, const ObjectiveSpec& spec, bool df_includes_intercept);

}  // namespace mls
