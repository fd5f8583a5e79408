#include "mls/simharness.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <sstream>

#include "mls/dataset_io.hpp"
#include "mls/error.hpp"
#include "mls/kernels.hpp"

namespace mls {

Vector StudyConfig::default_theta() {
    Vector t = Vector::Zero(20);
    t.head(5) << 1.0, 4.0, 3.0, 2.0, 1.0;
    return t;
}

Vector StudyConfig::default_start() {
    Vector t = Vector::Zero(20);
    t[0] = 1.0;
    return t;
}

SolverConfig StudyConfig::default_solver() {
    SolverConfig c;
    // The logistic model is stationary at theta = 0, so the pilot fit needs other starts.
    c.random_restarts = 3;
    return c;
}

std::size_t StudyConfig::covariate_count() const {
    return ModelSpec(model, static_cast<std::size_t>(true_theta.size())).required_covariates();
}

void StudyConfig::validate() const {
    if (sample_sizes.empty()) throw ConfigError("sample_sizes is empty");
    for (auto n : sample_sizes) {
        if (n < 3) throw ConfigError("sample sizes must be at least 3");
    }
    if (error_means.empty() || error_sds.empty()) throw ConfigError("error_means and error_sds must be nonempty");
    for (double s : error_sds) {
        if (!(s >= 0.0)) throw ConfigError("error_sds must be nonnegative");
    }
    if (covariances.empty()) throw ConfigError("covariances is empty");
    for (const auto& c : covariances) {
        if (c.name.empty()) throw ConfigError("covariance model needs a name");
        CovarianceSpec{c.family, c.range, nugget, 1.0, 0.0}.validate();
    }
    if (penalties.empty() || methods.empty()) throw ConfigError("penalties and methods must be nonempty");
    if (repetitions < 2) throw ConfigError("repetitions must be at least 2");
    if (true_theta.size() == 0) throw ConfigError("true_theta is empty");
    ModelSpec(model, static_cast<std::size_t>(true_theta.size()));
    if (!(covariate_correlation >= 0.0 && covariate_correlation < 1.0)) {
        throw ConfigError("covariate_correlation must lie in [0, 1)");
    }
    if (grid_size < 2) throw ConfigError("grid_size must be at least 2");
    for (auto j : penalty_exempt) {
        if (j >= static_cast<std::size_t>(true_theta.size())) throw ConfigError("penalty_exempt index out of range");
    }
    if (start_theta.size() != 0 && start_theta.size() != true_theta.size()) {
        throw ConfigError("start_theta must be empty or match the length of true_theta");
    }
    if (!(failure_budget >= 0.0 && failure_budget <= 1.0)) throw ConfigError("failure_budget must lie in [0, 1]");
    PenaltySpec{PenaltyFamily::Scad, 1.0, scad_a}.validate();
    solver.validate();
}

std::string StudyCell::data_key() const {
    std::ostringstream out;
    out << "mu=" << format_double(mu) << "|sigma=" << format_double(sigma) << "|cov=" << cov.name << "|n=" << n;
    return out.str();
}

std::vector<StudyCell> study_cells(const StudyConfig& config) {
    std::vector<StudyCell> cells;
    for (auto pen : config.penalties)
        for (double mu : config.error_means)
            for (double sigma : config.error_sds)
                for (const auto& cov : config.covariances)
                    for (auto method : config.methods)
                        for (auto n : config.sample_sizes) cells.push_back({mu, sigma, cov, method, pen, n});
    return cells;
}

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t replicate_seed(std::uint64_t base_seed, const std::string& key, std::size_t j) {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (unsigned char c : key) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return mix64(mix64(base_seed ^ h) + static_cast<std::uint64_t>(j));
}

Dataset simulate_replicate(const StudyConfig& config, const StudyCell& cell, std::size_t j) {
    const std::uint64_t seed = replicate_seed(config.base_seed, cell.data_key(), j);
    const ModelSpec model(config.model, static_cast<std::size_t>(config.true_theta.size()));

    Dataset d;
    d.scale = Scale::Log;
    d.locations = sample_locations(SamplingDesign{}, cell.n, mix64(seed + 1));
    d.covariates = simulate_covariates(cell.n, model.required_covariates(), config.covariate_correlation,
                                       mix64(seed + 2), config.covariate_structure);
    const CovarianceSpec cov{cell.cov.family, cell.cov.range, config.nugget, cell.sigma, cell.mu};
    Vector eps;
    if (cell.sigma == 0.0) {
        eps = Vector::Constant(static_cast<Eigen::Index>(cell.n), cell.mu);
    } else {
        eps = FieldSampler(cov, d.locations).draw(mix64(seed + 3));
    }
    d.response = evaluate(model, d, config.true_theta) + eps;
    return d;
}

ObjectiveSpec cell_objective(const StudyConfig& config, const StudyCell& cell) {
    ObjectiveSpec spec;
    spec.method = cell.method;
    spec.model = ModelSpec(config.model, static_cast<std::size_t>(config.true_theta.size()));
    spec.penalty = PenaltySpec{cell.penalty, cell.penalty == PenaltyFamily::None ? 0.0 : 1.0, config.scad_a};
    if (!config.penalty_exempt.empty()) {
        spec.penalty_exempt.assign(spec.model.dimension(), false);
        for (auto j : config.penalty_exempt) spec.penalty_exempt.at(j) = true;
    }
    return spec;
}

Vector estimate_replicate(const StudyConfig& config, const StudyCell& cell, std::size_t j) {
    Dataset data = simulate_replicate(config, cell, j);
    const ObjectiveSpec spec = cell_objective(config, cell);
    if (spec.method == Method::Additive) {
        data.response = data.response.array().exp().matrix();
        data.scale = Scale::Raw;
    }
    SolverConfig solver = config.solver;
    solver.restart_seed = mix64(replicate_seed(config.base_seed, cell.data_key(), j) ^ solver.restart_seed);
    if (config.start_theta.size() != 0) {
        solver.initialization = Initialization::Provided;
        solver.start = Vector::Zero(static_cast<Eigen::Index>(spec.parameter_count()));
        solver.start.tail(config.start_theta.size()) = config.start_theta;
    }

    const auto p = static_cast<Eigen::Index>(spec.model.dimension());
    if (cell.penalty == PenaltyFamily::None) return fit(spec, data, solver).theta_hat.tail(p);
    const PathResult path = lambda_path(spec, data, solver, config.grid_size);
    return path.selected_fit().theta_hat.tail(p);
}

Metrics compute_metrics(const std::vector<Vector>& estimates, const Vector& truth) {
    Metrics m;
    m.replicates = estimates.size();
    if (estimates.empty()) return m;
    const auto p = truth.size();
    const double r = static_cast<double>(estimates.size());

    Vector mean = Vector::Zero(p);
    double sq = 0.0;
    for (const auto& est : estimates) {
        if (est.size() != p) throw ConfigError("estimate length does not match the true parameter");
        mean += est;
        sq += (est - truth).squaredNorm();
        for (Eigen::Index i = 0; i < p; ++i) {
            if (truth[i] != 0.0 && est[i] != 0.0) m.tp += 1.0;
            if (truth[i] == 0.0 && est[i] == 0.0) m.tn += 1.0;
        }
    }
    mean /= r;
    m.mse = sq / (r * static_cast<double>(p));
    m.tp /= r;
    m.tn /= r;
    if (estimates.size() > 1) {
        double dev = 0.0;
        for (const auto& est : estimates) dev += (est - mean).squaredNorm();
        m.sd = std::sqrt(dev / (r - 1.0));
    }
    return m;
}

namespace {

struct Outcome {
    std::optional<Vector> estimate;
    std::string error;
};

Metrics aggregate(const StudyConfig& config, const std::vector<Outcome>& outcomes) {
    std::vector<Vector> ok;
    std::vector<std::string> errors;
    for (const auto& o : outcomes) {
        if (o.estimate) {
            ok.push_back(*o.estimate);
        } else {
            errors.push_back(o.error);
        }
    }
    Metrics m = compute_metrics(ok, config.true_theta);
    m.failures = errors.size();
    m.errors = std::move(errors);
    m.failed = static_cast<double>(m.failures) > config.failure_budget * static_cast<double>(outcomes.size());
    return m;
}

Outcome run_replicate(const StudyConfig& config, const StudyCell& cell, std::size_t j) {
    Outcome o;
    try {
        o.estimate = estimate_replicate(config, cell, j);
    } catch (const Error& e) {
        o.error = "replicate " + std::to_string(j) + ": " + e.what();
    }
    return o;
}

}  // namespace

Metrics run_cell(const StudyConfig& config, const StudyCell& cell, int jobs) {
    config.validate();
    std::vector<Outcome> outcomes(config.repetitions);
    kernels::for_each_index(config.repetitions, jobs,
                            [&](std::size_t j) { outcomes[j] = run_replicate(config, cell, j); });
    return aggregate(config, outcomes);
}

std::vector<CellResult> run_study(const StudyConfig& config, int jobs) {
    config.validate();
    const auto cells = study_cells(config);
    const std::size_t reps = config.repetitions;
    std::vector<Outcome> outcomes(cells.size() * reps);
    kernels::for_each_index(outcomes.size(), jobs, [&](std::size_t t) {
        outcomes[t] = run_replicate(config, cells[t / reps], t % reps);
    });

    std::vector<CellResult> results;
    results.reserve(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
        const std::vector<Outcome> slice(outcomes.begin() + static_cast<std::ptrdiff_t>(c * reps),
                                         outcomes.begin() + static_cast<std::ptrdiff_t>((c + 1) * reps));
        results.push_back({cells[c], aggregate(config, slice)});
    }
    return results;
}

std::string metrics_csv(const std::vector<CellResult>& results, PenaltyFamily penalty) {
    std::string out = "mu,sigma,cov_model,method,penalty,n,mse,sd,tp,tn\n";
    for (const auto& r : results) {
        if (r.cell.penalty != penalty) continue;
        const auto& m = r.metrics;
        out += format_double(r.cell.mu) + ',' + format_double(r.cell.sigma) + ',' + r.cell.cov.name + ',' +
               std::string(to_string(r.cell.method)) + ',' + std::string(to_string(r.cell.penalty)) + ',' +
               std::to_string(r.cell.n) + ',' + format_double(m.mse) + ',' + format_double(m.sd) + ',' +
               format_double(m.tp) + ',' + format_double(m.tn) + '\n';
    }
    return out;
}

// ---------------------------------------------------------------------------------------------
// JSON

StudyConfig study_from_json(const Json& j) {
    using namespace json_field;
    const std::string root = "study";
    allow_keys(j, root,
               {"model", "sample_sizes", "error_means", "error_sds", "covariances", "nugget", "penalties",
                "methods", "repetitions", "base_seed", "true_theta", "covariate_correlation",
                "covariate_structure", "grid_size", "scad_a", "penalty_exempt", "start_theta", "failure_budget",
                "solver"});
    StudyConfig c;
    const auto wrap = [](const std::string& path, auto&& fn) {
        try {
            return fn();
        } catch (const ConfigError& e) {
            const std::string msg = e.what();
            if (msg.rfind(path, 0) == 0) throw;
            throw ConfigError(path + ": " + msg);
        }
    };
    const auto numbers = [&](const char* key) {
        const std::string path = root + "." + key;
        std::vector<double> out;
        const Json& arr = array(j[key], path);
        for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(number(arr[i], path + "[" + std::to_string(i) + "]"));
        return out;
    };

    if (j.contains("model")) {
        c.model = wrap(root + ".model", [&] { return parse_model_kind(text(j["model"], root + ".model")); });
    }
    if (j.contains("sample_sizes")) {
        c.sample_sizes.clear();
        const Json& arr = array(j["sample_sizes"], root + ".sample_sizes");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            c.sample_sizes.push_back(count(arr[i], root + ".sample_sizes[" + std::to_string(i) + "]"));
        }
    }
    if (j.contains("error_means")) c.error_means = numbers("error_means");
    if (j.contains("error_sds")) c.error_sds = numbers("error_sds");
    if (j.contains("covariances")) {
        c.covariances.clear();
        const Json& arr = array(j["covariances"], root + ".covariances");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string path = root + ".covariances[" + std::to_string(i) + "]";
            allow_keys(arr[i], path, {"name", "family", "range"});
            if (!arr[i].contains("name") || !arr[i].contains("family")) {
                throw ConfigError(path + ": needs name and family");
            }
            CovarianceModel m;
            m.name = text(arr[i]["name"], path + ".name");
            m.family = wrap(path + ".family",
                            [&] { return parse_covariance_family(text(arr[i]["family"], path + ".family")); });
            if (arr[i].contains("range")) m.range = number(arr[i]["range"], path + ".range");
            c.covariances.push_back(std::move(m));
        }
    }
    if (j.contains("nugget")) c.nugget = number(j["nugget"], root + ".nugget");
    if (j.contains("penalties")) {
        c.penalties.clear();
        const Json& arr = array(j["penalties"], root + ".penalties");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string path = root + ".penalties[" + std::to_string(i) + "]";
            c.penalties.push_back(wrap(path, [&] { return parse_penalty_family(text(arr[i], path)); }));
        }
    }
    if (j.contains("methods")) {
        c.methods.clear();
        const Json& arr = array(j["methods"], root + ".methods");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string path = root + ".methods[" + std::to_string(i) + "]";
            c.methods.push_back(wrap(path, [&] { return parse_method(text(arr[i], path)); }));
        }
    }
    if (j.contains("repetitions")) c.repetitions = count(j["repetitions"], root + ".repetitions");
    if (j.contains("base_seed")) c.base_seed = seed(j["base_seed"], root + ".base_seed");
    if (j.contains("true_theta")) {
        const auto v = numbers("true_theta");
        c.true_theta = Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
    }
    if (j.contains("covariate_correlation")) {
        c.covariate_correlation = number(j["covariate_correlation"], root + ".covariate_correlation");
    }
    if (j.contains("covariate_structure")) {
        const std::string s = text(j["covariate_structure"], root + ".covariate_structure");
        if (s == "equicorrelated") {
            c.covariate_structure = CovariateStructure::Equicorrelated;
        } else if (s == "ar1") {
            c.covariate_structure = CovariateStructure::AR1;
        } else {
            throw ConfigError(root + ".covariate_structure: expected equicorrelated or ar1");
        }
    }
    if (j.contains("grid_size")) c.grid_size = count(j["grid_size"], root + ".grid_size");
    if (j.contains("scad_a")) c.scad_a = number(j["scad_a"], root + ".scad_a");
    if (j.contains("penalty_exempt")) {
        c.penalty_exempt.clear();
        const Json& arr = array(j["penalty_exempt"], root + ".penalty_exempt");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            c.penalty_exempt.push_back(count(arr[i], root + ".penalty_exempt[" + std::to_string(i) + "]"));
        }
    }
    if (j.contains("start_theta")) {
        const auto v = numbers("start_theta");
        c.start_theta = Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
    } else if (c.model == ModelKind::Logistic) {
        c.start_theta = Vector::Zero(c.true_theta.size());
        if (c.start_theta.size() > 0) c.start_theta[0] = 1.0;
    } else {
        c.start_theta.resize(0);
    }
    if (j.contains("failure_budget")) c.failure_budget = number(j["failure_budget"], root + ".failure_budget");
    if (j.contains("solver")) c.solver = solver_from_json(j["solver"], root + ".solver", c.solver);
    wrap(root, [&] {
        c.validate();
        return 0;
    });
    return c;
}

Json to_json(const StudyConfig& c) {
    Json j;
    j["model"] = to_string(c.model);
    j["sample_sizes"] = c.sample_sizes;
    j["error_means"] = c.error_means;
    j["error_sds"] = c.error_sds;
    Json covs = Json::array();
    for (const auto& m : c.covariances) {
        covs.push_back(Json{{"name", m.name}, {"family", to_string(m.family)}, {"range", m.range}});
    }
    j["covariances"] = std::move(covs);
    j["nugget"] = c.nugget;
    Json pens = Json::array();
    for (auto p : c.penalties) pens.push_back(to_string(p));
    j["penalties"] = std::move(pens);
    Json methods = Json::array();
    for (auto m : c.methods) methods.push_back(to_string(m));
    j["methods"] = std::move(methods);
    j["repetitions"] = c.repetitions;
    j["base_seed"] = c.base_seed;
    j["true_theta"] = to_json(c.true_theta);
    j["covariate_correlation"] = c.covariate_correlation;
    j["covariate_structure"] =
        c.covariate_structure == CovariateStructure::Equicorrelated ? "equicorrelated" : "ar1";
    j["grid_size"] = c.grid_size;
    j["scad_a"] = c.scad_a;
    j["penalty_exempt"] = c.penalty_exempt;
    j["start_theta"] = to_json(c.start_theta);
    j["failure_budget"] = c.failure_budget;
    j["solver"] = to_json(c.solver);
    return j;
}

// ---------------------------------------------------------------------------------------------
// Theorem checks

std::pair<double, double> shape_moments(const std::vector<double>& x) {
    const double n = static_cast<double>(x.size());
    if (x.size() < 2) return {0.0, 0.0};
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : x) {
        const double d = v - mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    if (!(m2 > 0.0)) return {0.0, 0.0};
    return {m3 / std::pow(m2, 1.5), m4 / (m2 * m2) - 3.0};
}

bool TheoremReport::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const TheoremCheck& c) { return c.passed; });
}

namespace {

std::vector<Vector> estimates_for(const StudyConfig& sc, const StudyCell& cell, std::size_t reps, int jobs) {
    std::vector<Vector> out(reps);
    kernels::for_each_index(reps, jobs, [&](std::size_t j) { out[j] = estimate_replicate(sc, cell, j); });
    return out;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

}  // namespace

TheoremReport verify_theorems(const TheoremConfig& tc, int jobs) {
    if (tc.model != ModelKind::LinearAdditive && tc.model != ModelKind::Logistic) {
        throw ConfigError("verify_theorems supports the linear and logistic models");
    }
    if (tc.sample_sizes.empty() || tc.trend_repetitions < 2 || tc.normal_repetitions < 3) {
        throw ConfigError("verify_theorems needs sample sizes and at least a few repetitions");
    }
    StudyConfig sc;
    sc.model = tc.model;
    sc.true_theta = tc.true_theta;
    sc.nugget = tc.nugget;
    sc.penalty_exempt = tc.penalty_exempt;
    sc.start_theta = tc.start_theta;
    sc.covariate_correlation = tc.covariate_correlation;
    sc.base_seed = tc.base_seed;
    sc.grid_size = tc.grid_size;
    sc.solver = tc.solver;
    sc.repetitions = tc.trend_repetitions;
    sc.validate();

    const auto p = tc.true_theta.size();
    std::vector<Eigen::Index> support;
    for (Eigen::Index i = 0; i < p; ++i) {
        if (tc.true_theta[i] != 0.0) support.push_back(i);
    }
    const double zeros = static_cast<double>(p - static_cast<Eigen::Index>(support.size()));

    TheoremReport report;

    // Consistency and oracle, SCAD path under spatially correlated errors.
    std::vector<Vector> last;
    StudyCell cell{tc.error_mean, tc.error_sd, tc.cov, Method::PMLS, PenaltyFamily::Scad, 0};
    for (auto n : tc.sample_sizes) {
        cell.n = n;
        auto est = estimates_for(sc, cell, tc.trend_repetitions, jobs);
        std::vector<double> err;
        for (const auto& e : est) err.push_back((e - tc.true_theta).norm());
        report.median_error.push_back(median(err));
        last = std::move(est);
    }
    std::size_t exact = 0;
    for (const auto& e : last) {
        std::size_t nonzero = 0;
        bool on_support = true;
        for (Eigen::Index i = 0; i < p; ++i) {
            if (e[i] != 0.0) ++nonzero;
            if ((e[i] != 0.0) != (tc.true_theta[i] != 0.0)) on_support = false;
        }
        if (on_support && nonzero == support.size()) ++exact;
    }
    report.oracle_frequency = static_cast<double>(exact) / static_cast<double>(last.size());
    report.scad_tn = compute_metrics(last, tc.true_theta).tn;

    cell.penalty = PenaltyFamily::Lasso;
    report.lasso_tn = compute_metrics(estimates_for(sc, cell, tc.trend_repetitions, jobs), tc.true_theta).tn;

    // Normality and bias: unpenalized PMLS with iid errors (a pure nugget field).
    StudyConfig iid = sc;
    iid.nugget = 1.0;
    const StudyCell normal_cell{tc.error_mean, tc.error_sd, {"iid", tc.cov.family, tc.cov.range}, Method::PMLS,
                                PenaltyFamily::None, tc.normal_n};
    const auto est = estimates_for(iid, normal_cell, tc.normal_repetitions, jobs);
    const double r = static_cast<double>(est.size());
    std::vector<double> pooled;
    double worst_bias = 0.0;
    for (Eigen::Index i = 0; i < p; ++i) {
        std::vector<double> col;
        for (const auto& e : est) col.push_back(e[i]);
        const double mean = std::accumulate(col.begin(), col.end(), 0.0) / r;
        double ss = 0.0;
        for (double v : col) ss += (v - mean) * (v - mean);
        const double sd = std::sqrt(ss / (r - 1.0));
        std::vector<double> z;
        for (double v : col) z.push_back(sd > 0.0 ? (v - mean) / sd : 0.0);
        const auto [sk, ku] = shape_moments(z);
        report.coordinate_skewness.push_back(sk);
        report.coordinate_kurtosis.push_back(ku);
        pooled.insert(pooled.end(), z.begin(), z.end());
        const double se = sd / std::sqrt(r);
        const double bias = std::abs(mean - tc.true_theta[i]);
        const double zb = se > 0.0 ? bias / se : (bias > 0.0 ? INFINITY : 0.0);
        report.coordinate_bias.push_back(zb);
        worst_bias = std::max(worst_bias, zb);
    }
    // Joint test of zero bias: Hotelling T^2 = R b' S^-1 b is about chi^2_p under the null.
    // Testing each coordinate at 3 SE would flag some coordinate in about one run out of twenty.
    Matrix centered(static_cast<Eigen::Index>(est.size()), p);
    for (std::size_t k = 0; k < est.size(); ++k) centered.row(static_cast<Eigen::Index>(k)) = est[k].transpose();
    const Vector mean_est = centered.colwise().mean().transpose();
    centered.rowwise() -= mean_est.transpose();
    const Matrix cov_est = centered.transpose() * centered / (r - 1.0);
    const Vector b = mean_est - tc.true_theta;
    report.bias_statistic = r * b.dot(cov_est.ldlt().solve(b));
    // Wilson-Hilferty 0.999 quantile of chi^2_p.
    const double dof = static_cast<double>(p);
    const double h = 2.0 / (9.0 * dof);
    report.bias_critical = dof * std::pow(1.0 - h + 3.0902 * std::sqrt(h), 3);
    const bool unbiased = std::isfinite(report.bias_statistic) && report.bias_statistic <= report.bias_critical;
    std::tie(report.skewness, report.excess_kurtosis) = shape_moments(pooled);

    bool monotone = true;
    std::string trend;
    for (std::size_t k = 0; k < report.median_error.size(); ++k) {
        if (k > 0 && !(report.median_error[k] < report.median_error[k - 1])) monotone = false;
        trend += (k ? " > " : "") + fmt(report.median_error[k]);
    }
    report.checks.push_back({"consistency", monotone, "median |theta - theta0| by n: " + trend});
    report.checks.push_back({"normality",
                             std::abs(report.skewness) < tc.skew_bound &&
                                 std::abs(report.excess_kurtosis) < tc.kurtosis_bound,
                             "skewness " + fmt(report.skewness) + ", excess kurtosis " +
                                 fmt(report.excess_kurtosis)});
    report.checks.push_back({"oracle", report.oracle_frequency >= tc.oracle_frequency,
                             "SCAD exact support frequency " + fmt(report.oracle_frequency)});
    report.checks.push_back({"centering", unbiased,
                             "T^2 " + fmt(report.bias_statistic) + " vs " + fmt(report.bias_critical) +
                                 ", largest |bias| / MC SE " + fmt(worst_bias)});
    report.checks.push_back({"lasso_gap", report.lasso_tn < zeros && report.scad_tn >= zeros - 0.1,
                             "TN lasso " + fmt(report.lasso_tn) + ", scad " + fmt(report.scad_tn)});
    return report;
}

Json to_json(const TheoremReport& r) {
    Json j;
    j["passed"] = r.passed();
    Json checks = Json::array();
    for (const auto& c : r.checks) checks.push_back(Json{{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    j["checks"] = std::move(checks);
    j["median_error"] = r.median_error;
    j["skewness"] = r.skewness;
    j["excess_kurtosis"] = r.excess_kurtosis;
    j["coordinate_skewness"] = r.coordinate_skewness;
    j["coordinate_kurtosis"] = r.coordinate_kurtosis;
    j["coordinate_bias"] = r.coordinate_bias;
    j["bias_statistic"] = r.bias_statistic;
    j["bias_critical"] = r.bias_critical;
    j["oracle_frequency"] = r.oracle_frequency;
    j["scad_tn"] = r.scad_tn;
    j["lasso_tn"] = r.lasso_tn;
    return j;
}

}  // namespace mls
