#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mls/serialize.hpp"
#include "mls/solver.hpp"
#include "mls/spatial.hpp"

namespace mls {

/// Named error covariance, e.g. Exp1 = exponential with range 1.
struct CovarianceModel {
    std::string name;
    CovarianceFamily family = CovarianceFamily::Exponential;
    double range = 1.0;
};

/// Full factorial Monte Carlo design. Defaults reproduce the published study layout
/// (logistic mean, p = 20, five nonzero coefficients).
struct StudyConfig {
    ModelKind model = ModelKind::Logistic;
    std::vector<std::size_t> sample_sizes{50, 100, 200};
    std::vector<double> error_means{0.1, 0.5};
    std::vector<double> error_sds{0.5};
    std::vector<CovarianceModel> covariances{{"Exp1", CovarianceFamily::Exponential, 1.0},
                                             {"Exp2", CovarianceFamily::Exponential, 2.0},
                                             {"Gauss1", CovarianceFamily::Gaussian, 1.0},
                                             {"Gauss2", CovarianceFamily::Gaussian, 2.0}};
    double nugget = 0.2;
    std::vector<PenaltyFamily> penalties{PenaltyFamily::Lasso, PenaltyFamily::Scad};
    std::vector<Method> methods{Method::PMLS, Method::POLS};
    std::size_t repetitions = 100;
    std::uint64_t base_seed = 20240607;
    Vector true_theta = default_theta();
    double covariate_correlation = 0.5;
    CovariateStructure covariate_structure = CovariateStructure::Equicorrelated;
    std::size_t grid_size = 30;
    double scad_a = 3.7;
    /// theta indices left out of the penalty. The logistic theta_1 is a scale factor outside
    /// the index; penalizing it lets descent collapse onto the flat model g = 1.
    std::vector<std::size_t> penalty_exempt{0};
    /// Starting theta for every fit; empty means all zeros. The logistic default puts
    /// theta_1 = 1, since theta_1 <= 0 starts sit in or next to the pole of 1 / (1 + theta_1 e^-u).
    Vector start_theta = default_start();
    double failure_budget = 0.1;
    SolverConfig solver = default_solver();

    static Vector default_theta();
    static SolverConfig default_solver();
    static Vector default_start();

    /// Number of covariate columns the model needs.
    std::size_t covariate_count() const;
    void validate() const;
};

/// One cell of the factorial design.
struct StudyCell {
    double mu = 0.0;
    double sigma = 0.0;
    CovarianceModel cov;
    Method method = Method::PMLS;
    PenaltyFamily penalty = PenaltyFamily::Lasso;
    std::size_t n = 0;

    /// Identifies the simulated data only; method and penalty are left out so every
    /// estimator in a study sees the same replicates.
    std::string data_key() const;
};

struct Metrics {
    double mse = 0.0;
    double sd = 0.0;
    double tp = 0.0;
    double tn = 0.0;
    std::size_t replicates = 0;
    std::size_t failures = 0;
    bool failed = false;  // failures exceeded the budget
    std::vector<std::string> errors;  // one message per failed replicate
};

struct CellResult {
    StudyCell cell;
    Metrics metrics;
};

/// Cells ordered penalty, mu, sigma, covariance, method, n.
std::vector<StudyCell> study_cells(const StudyConfig& config);

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);
/// seed_j = mix(mix(base ^ fnv1a(key)) + j).
std::uint64_t replicate_seed(std::uint64_t base_seed, const std::string& key, std::size_t j);

/// Replicate j of a cell: locations on [0, sqrt(n)]^2, correlated Gaussian covariates and
/// y = g(x; theta_0) + eps with eps a Gaussian random field of mean mu and sd sigma.
Dataset simulate_replicate(const StudyConfig& config, const StudyCell& cell, std::size_t j);

/// Objective used for a cell.
ObjectiveSpec cell_objective(const StudyConfig& config, const StudyCell& cell);

/// theta part of the BIC-selected estimate for replicate j.
Vector estimate_replicate(const StudyConfig& config, const StudyCell& cell, std::size_t j);

/// MSE = sum (est - theta0)^2 / (R p); SD = sqrt(sum |est_j - mean|^2 / (R - 1));
/// TP/TN = average counts of exactly nonzero / zero estimates on the true support / its complement.
Metrics compute_metrics(const std::vector<Vector>& estimates, const Vector& truth);

Metrics run_cell(const StudyConfig& config, const StudyCell& cell, int jobs = 1);

/// All cells; replicates of all cells share one parallel pool.
std::vector<CellResult> run_study(const StudyConfig& config, int jobs = 1);

/// Table rows for one penalty: mu,sigma,cov_model,method,penalty,n,mse,sd,tp,tn.
std::string metrics_csv(const std::vector<CellResult>& results, PenaltyFamily penalty);

StudyConfig study_from_json(const Json& j);
Json to_json(const StudyConfig& config);

/// Settings for the empirical theorem checks.
struct TheoremConfig {
    ModelKind model = ModelKind::LinearAdditive;
    Vector true_theta = StudyConfig::default_theta();
    std::vector<std::size_t> sample_sizes{50, 100, 200, 400};
    std::size_t trend_repetitions = 100;
    std::size_t normal_n = 400;
    std::size_t normal_repetitions = 500;
    double error_mean = 0.3;
    double error_sd = 0.5;
    CovarianceModel cov{"Exp1", CovarianceFamily::Exponential, 1.0};
    double nugget = 0.2;
    std::vector<std::size_t> penalty_exempt;
    Vector start_theta;
    double covariate_correlation = 0.5;
    std::size_t grid_size = 30;
    std::uint64_t base_seed = 7;
    double skew_bound = 0.25;
    double kurtosis_bound = 0.5;
    double oracle_frequency = 0.9;
    SolverConfig solver = StudyConfig::default_solver();
};

struct TheoremCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct TheoremReport {
    std::vector<double> median_error;  // per sample size
    double skewness = 0.0;             // pooled over studentized coordinates
    double excess_kurtosis = 0.0;
    std::vector<double> coordinate_skewness;
    std::vector<double> coordinate_kurtosis;
    std::vector<double> coordinate_bias;  // |mean - theta0| / MC standard error
    double bias_statistic = 0.0;          // Hotelling T^2 for zero bias
    double bias_critical = 0.0;
    double oracle_frequency = 0.0;  // SCAD, largest n
    double scad_tn = 0.0;
    double lasso_tn = 0.0;
    std::vector<TheoremCheck> checks;

    bool passed() const;
};

/// Consistency trend, asymptotic normality of the unpenalized estimator with iid errors,
/// SCAD oracle frequency, joint bias under a nonzero error mean, and the LASSO/SCAD TN gap.
TheoremReport verify_theorems(const TheoremConfig& config, int jobs = 1);

Json to_json(const TheoremReport& report);

/// Sample skewness and excess kurtosis (population moments).
std::pair<double, double> shape_moments(const std::vector<double>& x);

}  // namespace mls
