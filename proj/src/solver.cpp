#include "mls/solver.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "mls/error.hpp"

namespace mls {

void SolverConfig::validate() const {
    if (max_outer_iterations <= 0) throw ConfigError("max_outer_iterations must be positive");
    if (!(coordinate_tolerance > 0.0)) throw ConfigError("coordinate_tolerance must be positive");
    if (!(objective_tolerance > 0.0)) throw ConfigError("objective_tolerance must be positive");
    if (!(backtrack_factor > 0.0 && backtrack_factor < 1.0)) throw ConfigError("backtrack_factor must lie in (0, 1)");
    if (max_halvings < 0) throw ConfigError("max_halvings must be nonnegative");
    if (random_restarts < 0) throw ConfigError("random_restarts must be nonnegative");
}

namespace {

/// Mutable coordinate-descent state over one (spec, data) pair.
class Engine {
public:
    Engine(const ObjectiveSpec& spec, const Dataset& data, const SolverConfig& config)
        : spec_(spec),
          data_(data),
          config_(config),
          ev_(spec.model, data),
          n_(data.size()),
          p_(spec.model.dimension()),
          off_(spec.theta_offset()) {
        frozen_.assign(spec.parameter_count(), false);
        if (!config.frozen.empty()) {
            if (config.frozen.size() != frozen_.size()) {
                throw ConfigError("frozen mask has length " + std::to_string(config.frozen.size()) + ", expected " +
                                  std::to_string(frozen_.size()));
            }
            frozen_ = config.frozen;
        }
    }

    std::size_t parameter_count() const { return p_ + off_; }
    bool frozen(std::size_t k) const { return frozen_[k]; }
    void set_frozen(std::size_t k, bool value) { frozen_[k] = value; }
    bool penalized(std::size_t k) const { return k >= off_ && spec_.is_penalized(k - off_); }

    /// Loads a full parameter vector. Returns false if it is infeasible.
    bool load(const Vector& params) {
        if (static_cast<std::size_t>(params.size()) != parameter_count()) {
            throw ConfigError("start vector has length " + std::to_string(params.size()) + ", expected " +
                              std::to_string(parameter_count()));
        }
        beta0_ = off_ ? params[0] : 0.0;
        theta_ = params.tail(static_cast<Eigen::Index>(p_));
        eta_ = ev_.index(theta_);
        if (!ev_.try_values(eta_, theta_, g_)) return false;
        refresh_residual();
        pen_ = penalty_total(spec_, n_, params);
        objective_ = smooth_ + pen_;
        return std::isfinite(objective_);
    }

    Vector params() const {
        Vector out(static_cast<Eigen::Index>(parameter_count()));
        if (off_) out[0] = beta0_;
        out.tail(static_cast<Eigen::Index>(p_)) = theta_;
        return out;
    }

    double objective() const { return objective_; }
    double smooth() const { return smooth_; }

    /// Smooth-part partial derivative and Gauss-Newton curvature for theta_j at the current point.
    void coordinate_model(std::size_t j, double& grad, double& curv) {
        ev_.derivative_column(j, eta_, theta_, col_);
        const double raw = col_.squaredNorm();
        if (spec_.method == Method::PMLS) col_.array() -= col_.mean();
        grad = -2.0 * col_.dot(r_);
        curv = 2.0 * col_.squaredNorm();
        // A column that centering reduced to rounding noise carries no direction.
        if (curv <= 1e-24 * raw) {
            grad = 0.0;
            curv = 0.0;
        }
    }

    /// One cyclic pass. Returns the largest absolute coordinate change.
    double sweep() {
        double max_change = 0.0;
        if (off_ && !frozen_[0]) max_change = std::max(max_change, intercept_step());
        for (std::size_t j = 0; j < p_; ++j) {
            if (frozen_[off_ + j]) continue;
            max_change = std::max(max_change, theta_step(j));
        }
        return max_change;
    }

private:
    double smooth_of(const Vector& r) const {
        if (spec_.method != Method::PMLS) return r.squaredNorm();
        const double mean = r.mean();
        return (r.array() - mean).square().sum();
    }

    void refresh_residual() {
        r_ = data_.response - g_;
        if (off_) r_.array() -= beta0_;
        smooth_ = smooth_of(r_);
    }

    double coordinate_penalty(std::size_t j, double value) const {
        if (!spec_.is_penalized(j)) return 0.0;
        return static_cast<double>(n_) * penalty_value(spec_.penalty, std::abs(value));
    }

    /// Penalty total with theta_j replaced by `value`, summed afresh to avoid cancellation.
    double penalty_with(std::size_t j, double value) const {
        double total = 0.0;
        for (std::size_t i = 0; i < p_; ++i) {
            total += coordinate_penalty(i, i == j ? value : theta_[static_cast<Eigen::Index>(i)]);
        }
        return total;
    }

    double intercept_step() {
        const double target = (data_.response - g_).mean();
        const double change = std::abs(target - beta0_);
        const double old = beta0_;
        beta0_ = target;
        refresh_residual();
        const double q = smooth_ + pen_;
        if (!(q <= objective_)) {
            beta0_ = old;
            refresh_residual();
            return 0.0;
        }
        objective_ = q;
        return change;
    }

    double theta_step(std::size_t j) {
        double grad = 0.0;
        double curv = 0.0;
        coordinate_model(j, grad, curv);
        if (!(curv > 0.0) || !std::isfinite(curv) || !std::isfinite(grad)) return 0.0;

        const double current = theta_[static_cast<Eigen::Index>(j)];
        const double center = current - grad / curv;
        // Q_n carries n * p_lambda, so the scalar prox sees curvature v / n.
        double proposal = spec_.is_penalized(j) ? threshold(spec_.penalty, center, curv / static_cast<double>(n_))
                                                : center;
        if (proposal == current) return 0.0;

        const bool via_index = spec_.model.in_index(j);
        const auto design_col = via_index ? static_cast<Eigen::Index>(spec_.model.design_column(j)) : 0;

        for (int attempt = 0; attempt <= config_.max_halvings; ++attempt) {
            const double delta = proposal - current;
            theta_[static_cast<Eigen::Index>(j)] = proposal;
            if (via_index) {
                eta_trial_ = eta_ + delta * ev_.design().col(design_col);
            } else {
                eta_trial_ = eta_;
            }
            if (ev_.try_values(eta_trial_, theta_, g_trial_)) {
                r_trial_ = data_.response - g_trial_;
                if (off_) r_trial_.array() -= beta0_;
                const double smooth = smooth_of(r_trial_);
                const double pen = penalty_with(j, proposal);
                const double q = smooth + pen;
                if (std::isfinite(q) && q <= objective_) {
                    eta_.swap(eta_trial_);
                    g_.swap(g_trial_);
                    r_.swap(r_trial_);
                    smooth_ = smooth;
                    pen_ = pen;
                    objective_ = q;
                    return std::abs(delta);
                }
            }
            proposal = current + config_.backtrack_factor * delta;
        }
        theta_[static_cast<Eigen::Index>(j)] = current;
        return 0.0;
    }

    const ObjectiveSpec& spec_;
    const Dataset& data_;
    const SolverConfig& config_;
    ModelEvaluator ev_;
    std::size_t n_;
    std::size_t p_;
    std::size_t off_;
    std::vector<bool> frozen_;

    double beta0_ = 0.0;
    Vector theta_, eta_, g_, r_, col_;
    Vector eta_trial_, g_trial_, r_trial_;
    double smooth_ = 0.0;
    double pen_ = 0.0;
    double objective_ = 0.0;
};

Vector primary_start(const ObjectiveSpec& spec, const SolverConfig& config) {
    if (config.initialization == Initialization::Zeros) {
        return Vector::Zero(static_cast<Eigen::Index>(spec.parameter_count()));
    }
    if (static_cast<std::size_t>(config.start.size()) != spec.parameter_count()) {
        throw NoFeasibleStart("warm/provided start has length " + std::to_string(config.start.size()) +
                              ", expected " + std::to_string(spec.parameter_count()));
    }
    return config.start;
}

FitResult descend(Engine& engine, const SolverConfig& config) {
    FitResult out;
    out.history.push_back(engine.objective());
    double previous = engine.objective();
    for (int it = 1; it <= config.max_outer_iterations; ++it) {
        const double change = engine.sweep();
        const double current = engine.objective();
        out.history.push_back(current);
        out.iterations = it;
        const double decrease = previous - current;
        const bool small_objective_step =
            previous == 0.0 || decrease <= config.objective_tolerance * std::abs(previous);
        if (change <= config.coordinate_tolerance && small_objective_step) {
            out.converged = true;
            break;
        }
        previous = current;
    }
    out.theta_hat = engine.params();
    out.objective = engine.objective();
    out.smooth_part = engine.smooth();
    return out;
}

void finalize(FitResult& fit, const ObjectiveSpec& spec, const Dataset& data, const SolverConfig& config) {
    fit.lambda = spec.penalty.lambda;
    fit.active_set.clear();
    const std::size_t off = spec.theta_offset();
    for (std::size_t j = 0; j < spec.model.dimension(); ++j) {
        if (fit.theta_hat[static_cast<Eigen::Index>(off + j)] != 0.0) fit.active_set.push_back(j);
    }
    try {
        fit.bic = bic(fit, data, spec, config.df_includes_intercept);
        fit.bic_degenerate = false;
    } catch (const DegenerateVariance&) {
        fit.bic = std::numeric_limits<double>::infinity();
        fit.bic_degenerate = true;
    }
}

/// Runs descent from each start and keeps the lowest objective.
FitResult fit_from_starts(const ObjectiveSpec& spec, const Dataset& data, const SolverConfig& config,
                          const std::vector<Vector>& starts) {
    Engine engine(spec, data, config);
    std::optional<FitResult> best;
    for (const auto& start : starts) {
        if (!engine.load(start)) continue;
        FitResult candidate = descend(engine, config);
        if (!best || candidate.objective < best->objective) best = std::move(candidate);
    }
    if (!best) throw NoFeasibleStart("no feasible starting point for the coordinate descent");
    finalize(*best, spec, data, config);
    return *best;
}

std::vector<Vector> restart_points(const ObjectiveSpec& spec, const Dataset& data, const SolverConfig& config,
                                   const Vector& primary) {
    std::vector<Vector> out;
    if (config.random_restarts == 0) return out;
    const ModelEvaluator ev(spec.model, data);
    std::mt19937_64 rng(config.restart_seed);
    std::uniform_real_distribution<double> unif(-0.5, 0.5);
    const std::size_t off = spec.theta_offset();
    const auto p = static_cast<Eigen::Index>(spec.model.dimension());
    for (int r = 0; r < config.random_restarts; ++r) {
        for (int tries = 0; tries < 100; ++tries) {
            Vector cand = primary;
            for (Eigen::Index j = 0; j < p; ++j) {
                const auto k = off + static_cast<std::size_t>(j);
                if (config.frozen.empty() || !config.frozen[k]) cand[static_cast<Eigen::Index>(k)] = unif(rng);
            }
            const Vector theta = cand.tail(p);
            if (!ev.infeasible_row(ev.index(theta), theta)) {
                out.push_back(std::move(cand));
                break;
            }
        }
    }
    return out;
}

/// The null model: penalized coordinates of the linear index at zero, everything else fitted
/// from `base`. A penalized coordinate outside the index (the logistic theta_1) keeps its base
/// value, since zeroing it would flatten g and make every other coordinate inert.
std::optional<Vector> null_model(const ObjectiveSpec& spec, const Dataset& data, const SolverConfig& config,
                                 const Vector& base) {
    SolverConfig cfg = config;
    cfg.frozen.assign(spec.parameter_count(), false);
    Vector start = base;
    const std::size_t off = spec.theta_offset();
    for (std::size_t j = 0; j < spec.model.dimension(); ++j) {
        const auto k = off + j;
        if (!config.frozen.empty() && config.frozen[k]) cfg.frozen[k] = true;
        if (spec.is_penalized(j)) {
            if (spec.model.in_index(j)) start[static_cast<Eigen::Index>(k)] = 0.0;
            cfg.frozen[k] = true;
        }
    }
    Engine engine(spec, data, cfg);
    if (!engine.load(start)) return std::nullopt;
    descend(engine, cfg);
    return engine.params();
}

/// max over penalized index coordinates of |dS/dtheta_j| / n at `point`, where they are zero.
double zeroing_lambda(const ObjectiveSpec& spec, const Dataset& data, const SolverConfig& config,
                      const Vector& point) {
    Engine engine(spec, data, config);
    const std::size_t off = spec.theta_offset();
    double best = 0.0;
    if (!engine.load(point)) return 0.0;
    for (std::size_t j = 0; j < spec.model.dimension(); ++j) {
        const auto k = off + j;
        if (!spec.is_penalized(j) || !spec.model.in_index(j) || engine.frozen(k)) continue;
        double grad = 0.0;
        double curv = 0.0;
        engine.coordinate_model(j, grad, curv);
        if (std::isfinite(grad)) best = std::max(best, std::abs(grad) / static_cast<double>(data.size()));
    }
    return best;
}

void check_inputs(const ObjectiveSpec& spec, const Dataset& data, const SolverConfig& config) {
    spec.validate();
    config.validate();
    data.validate();
    check_scale(spec, data);
}

}  // namespace

FitResult fit(const ObjectiveSpec& spec, const Dataset& data, const SolverConfig& config) {
    check_inputs(spec, data, config);
    std::vector<Vector> starts;
    const Vector primary = primary_start(spec, config);
    starts.push_back(primary);
    for (auto& s : restart_points(spec, data, config, primary)) starts.push_back(std::move(s));
    if (config.unpenalized_start && spec.penalty.family == PenaltyFamily::Scad) {
        ObjectiveSpec unpenalized = spec;
        unpenalized.penalty.family = PenaltyFamily::None;
        try {
            starts.push_back(fit_from_starts(unpenalized, data, config, starts).theta_hat);
        } catch (const NoFeasibleStart&) {
        }
    }
    FitResult result = fit_from_starts(spec, data, config, starts);
    if (!std::isfinite(result.objective)) throw NonFiniteObjective("final objective is not finite");
    return result;
}

double lambda_max(const ObjectiveSpec& spec, const Dataset& data, const SolverConfig& config) {
    check_inputs(spec, data, config);
    const auto null_point = null_model(spec, data, config, primary_start(spec, config));
    if (!null_point) return 0.0;
    // At the null model every penalized coordinate is already zero.
    return zeroing_lambda(spec, data, config, *null_point);
}

PathResult lambda_path(const ObjectiveSpec& spec, const Dataset& data, const SolverConfig& config,
                       std::size_t grid_size) {
    if (grid_size < 2) throw ConfigError("lambda path needs grid_size >= 2");
    check_inputs(spec, data, config);

    const Vector base = primary_start(spec, config);
    std::optional<Vector> null_point = null_model(spec, data, config, base);
    double lmax = null_point ? zeroing_lambda(spec, data, config, *null_point) : 0.0;

    // A stationary null model (the logistic model started at theta_1 = 0 has every centered
    // Jacobian column equal to zero) gives no scale. An unpenalized pilot fit then supplies
    // the coordinates the null model keeps, and if that is still stationary the pilot itself
    // is offered as an extra start at every grid point so the chain cannot stall.
    // Rounding noise in a vanishing gradient is not a scale either.
    const double negligible = 1e-10 * (1.0 + data.response.cwiseAbs().maxCoeff());
    std::optional<Vector> pilot;
    if (!(lmax > negligible)) {
        ObjectiveSpec unpenalized = spec;
        unpenalized.penalty.family = PenaltyFamily::None;
        const Vector pilot_theta = fit(unpenalized, data, config).theta_hat;
        null_point = null_model(spec, data, config, pilot_theta);
        lmax = null_point ? zeroing_lambda(spec, data, config, *null_point) : 0.0;
        if (!(lmax > negligible)) {
            pilot = pilot_theta;
            lmax = 1.0;
        }
    }

    PathResult path;
    path.lambda_max = lmax;
    Vector warm = null_point ? *null_point : (pilot ? *pilot : base);
    SolverConfig cfg = config;
    cfg.initialization = Initialization::Warm;
    cfg.random_restarts = 0;

    const double ratio = 1e-3;
    for (std::size_t k = 0; k < grid_size; ++k) {
        const double frac = static_cast<double>(k) / static_cast<double>(grid_size - 1);
        const double lam = lmax * std::pow(ratio, frac);
        ObjectiveSpec at = spec;
        at.penalty.lambda = lam;
        std::vector<Vector> starts{warm};
        if (pilot) starts.push_back(*pilot);
        FitResult f = fit_from_starts(at, data, cfg, starts);
        warm = f.theta_hat;
        path.points.push_back({lam, std::move(f)});
    }

    std::size_t best = 0;
    for (std::size_t k = 1; k < path.points.size(); ++k) {
        if (path.points[k].fit.bic < path.points[best].fit.bic) best = k;
    }
    path.selected = best;
    return path;
}

std::size_t degrees_of_freedom(const FitResult& fit, const ObjectiveSpec& spec, bool df_includes_intercept) {
    std::size_t df = 0;
    const std::size_t off = spec.theta_offset();
    for (std::size_t j = 0; j < spec.model.dimension(); ++j) {
        const bool counted = spec.penalty_exempt.empty() || !spec.penalty_exempt[j];
        if (counted && fit.theta_hat[static_cast<Eigen::Index>(off + j)] != 0.0) ++df;
    }
    if (df_includes_intercept && spec.method == Method::POLS) ++df;
    return df;
}

double bic(const FitResult& fit, const Dataset& data, const ObjectiveSpec& spec, bool df_includes_intercept) {
    const Residuals r = residuals(spec, data, fit.theta_hat);
    const double n = static_cast<double>(data.size());
    const double mean_r = r.raw.mean();
    const double mean_r2 = r.raw.squaredNorm() / n;
    const double sigma2 = mean_r2 - mean_r * mean_r;
    if (!(sigma2 > 0.0)) throw DegenerateVariance("residual variance estimate is not positive");
    const double df = static_cast<double>(degrees_of_freedom(fit, spec, df_includes_intercept));
    return std::log(sigma2) + std::log(n) * df / n;
}

}  // namespace mls
