#include "mls/surface.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include "mls/error.hpp"

namespace mls {

void SurfaceScene::validate() const {
    if (grid.x_count < 1 || grid.y_count < 1) throw ConfigError("scene.grid: counts must be positive");
    if (!(grid.x_max >= grid.x_min) || !(grid.y_max >= grid.y_min)) {
        throw ConfigError("scene.grid: max must not be below min");
    }
    if (sign != 1 && sign != -1) throw ConfigError("scene.sign: must be 1 or -1");
    try {
        error.validate();
    } catch (const ConfigError& e) {
        throw ConfigError(std::string("scene.error: ") + e.what());
    }
}

namespace {

double grid_value(double lo, double hi, std::size_t count, std::size_t k) {
    if (count == 1) return lo;
    return lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(count - 1);
}

}  // namespace

PointCloud generate_scene(const SurfaceScene& scene, std::uint64_t seed) {
    scene.validate();
    const SurfaceGrid& g = scene.grid;
    const auto n = static_cast<Eigen::Index>(g.size());

    // The curve is checked on the y grid only; it has no x dependence.
    double lo = INFINITY;
    for (std::size_t k = 0; k < g.y_count; ++k) {
        lo = std::min(lo, scene.curve(grid_value(g.y_min, g.y_max, g.y_count, k)));
    }
    if (!(lo > 0.0)) {
        throw SignChange("curve is not strictly positive on the grid (minimum " + format_double(lo) + ")");
    }

    PointCloud cloud;
    cloud.xy.resize(n, 2);
    Eigen::Index i = 0;
    for (std::size_t a = 0; a < g.x_count; ++a) {
        for (std::size_t b = 0; b < g.y_count; ++b, ++i) {
            cloud.xy(i, 0) = grid_value(g.x_min, g.x_max, g.x_count, a);
            cloud.xy(i, 1) = grid_value(g.y_min, g.y_max, g.y_count, b);
        }
    }
    Vector eps = Vector::Constant(n, scene.error.mean);
    if (scene.error.sd > 0.0) eps = FieldSampler(scene.error, cloud.xy).draw(seed);

    cloud.z.resize(n);
    for (i = 0; i < n; ++i) cloud.z[i] = scene.sign * scene.curve(cloud.xy(i, 1)) * std::exp(eps[i]);
    return cloud;
}

SurfaceScene scene_from_json(const Json& j) {
    using namespace json_field;
    const std::string root = "scene";
    allow_keys(j, root, {"curve", "grid", "error", "sign", "seed"});
    SurfaceScene s;
    if (j.contains("curve")) {
        const Json& c = j["curve"];
        allow_keys(c, root + ".curve", {"c2", "c1", "c0"});
        if (c.contains("c2")) s.curve.c2 = number(c["c2"], root + ".curve.c2");
        if (c.contains("c1")) s.curve.c1 = number(c["c1"], root + ".curve.c1");
        if (c.contains("c0")) s.curve.c0 = number(c["c0"], root + ".curve.c0");
    }
    if (j.contains("grid")) {
        const Json& g = j["grid"];
        const std::string p = root + ".grid";
        allow_keys(g, p, {"x_min", "x_max", "x_count", "y_min", "y_max", "y_count"});
        if (g.contains("x_min")) s.grid.x_min = number(g["x_min"], p + ".x_min");
        if (g.contains("x_max")) s.grid.x_max = number(g["x_max"], p + ".x_max");
        if (g.contains("x_count")) s.grid.x_count = count(g["x_count"], p + ".x_count");
        if (g.contains("y_min")) s.grid.y_min = number(g["y_min"], p + ".y_min");
        if (g.contains("y_max")) s.grid.y_max = number(g["y_max"], p + ".y_max");
        if (g.contains("y_count")) s.grid.y_count = count(g["y_count"], p + ".y_count");
    }
    if (j.contains("error")) {
        const Json& e = j["error"];
        const std::string p = root + ".error";
        allow_keys(e, p, {"family", "range", "nugget", "sd", "mean"});
        if (e.contains("family")) {
            const std::string name = text(e["family"], p + ".family");
            try {
                s.error.family = parse_covariance_family(name);
            } catch (const Error& err) {
                throw ConfigError(p + ".family: " + err.what());
            }
        }
        if (e.contains("range")) s.error.range = number(e["range"], p + ".range");
        if (e.contains("nugget")) s.error.nugget = number(e["nugget"], p + ".nugget");
        if (e.contains("sd")) s.error.sd = number(e["sd"], p + ".sd");
        if (e.contains("mean")) s.error.mean = number(e["mean"], p + ".mean");
    }
    if (j.contains("sign")) {
        const double v = number(j["sign"], root + ".sign");
        if (v != 1.0 && v != -1.0) throw ConfigError(root + ".sign: must be 1 or -1");
        s.sign = static_cast<int>(v);
    }
    if (j.contains("seed")) s.seed = seed(j["seed"], root + ".seed");
    s.validate();
    return s;
}

Json to_json(const SurfaceScene& s) {
    Json j;
    j["curve"] = Json{{"c2", s.curve.c2}, {"c1", s.curve.c1}, {"c0", s.curve.c0}};
    j["grid"] = Json{{"x_min", s.grid.x_min}, {"x_max", s.grid.x_max}, {"x_count", s.grid.x_count},
                     {"y_min", s.grid.y_min}, {"y_max", s.grid.y_max}, {"y_count", s.grid.y_count}};
    j["error"] = Json{{"family", to_string(s.error.family)},
                      {"range", s.error.range},
                      {"nugget", s.error.nugget},
                      {"sd", s.error.sd},
                      {"mean", s.error.mean}};
    j["sign"] = s.sign;
    j["seed"] = s.seed;
    return j;
}

std::vector<std::size_t> SurfaceFit::active_set() const {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < coefficients.size(); ++k) {
        if (coefficients[k] != 0.0) out.push_back(k);
    }
    return out;
}

SolverConfig SurfaceOptions::default_solver() {
    SolverConfig c;
    // 1, y and y^2 are nearly collinear on a short y range; coordinate descent needs many sweeps.
    c.max_outer_iterations = 5000;
    c.coordinate_tolerance = 1e-10;
    c.objective_tolerance = 1e-14;
    return c;
}

namespace {

// Each design column is divided by its root mean square before fitting so that one lambda
// means the same thing for the intercept and for y^2 (which is ~100 times larger). Scaling
// without centering keeps zeros at zero, so active sets carry over to the raw coefficients.
SurfaceFit fit_one(Method method, const Dataset& magnitude, const Matrix& terms, const SurfaceOptions& opt) {
    const double n = static_cast<double>(terms.rows());
    const Vector scale = (terms.colwise().squaredNorm() / n).cwiseSqrt().transpose();

    Dataset data = method == Method::Additive ? magnitude : magnitude.to_log();
    data.covariates = terms * scale.cwiseInverse().asDiagonal();

    ObjectiveSpec spec;
    spec.method = method;
    spec.penalty = PenaltySpec{opt.penalty, 0.0, opt.scad_a};
    spec.penalty_exempt.assign(6, false);
    SolverConfig cfg = opt.solver;

    if (method == Method::Additive) {
        spec.model = ModelSpec(ModelKind::LinearAdditive, 6);
        spec.penalty_exempt[0] = true;
    } else {
        spec.model = ModelSpec(ModelKind::LogLinear, 6);
        // log(theta' x~) needs theta' x~ > 0; theta = e_1 is feasible everywhere.
        cfg.initialization = Initialization::Provided;
        cfg.start = Vector::Zero(static_cast<Eigen::Index>(spec.parameter_count()));
        cfg.start[static_cast<Eigen::Index>(spec.theta_offset())] = 1.0;
        if (method == Method::POLS) cfg.max_outer_iterations = opt.pols_max_iterations;
        if (method == Method::PMLS) {
            spec.penalty_exempt[0] = true;
            cfg.frozen.assign(6, false);
            cfg.frozen[0] = true;
        }
    }

    FitResult f;
    double lambda = 0.0;
    if (opt.penalty == PenaltyFamily::None) {
        f = fit(spec, data, cfg);
    } else {
        PathResult path = lambda_path(spec, data, cfg, opt.path_size);
        lambda = path.points[path.selected].lambda;
        f = path.selected_fit();
    }

    const auto off = static_cast<Eigen::Index>(spec.theta_offset());
    Vector theta = f.theta_hat.segment(off, 6);
    if (method == Method::POLS) {
        theta *= std::exp(f.theta_hat[0]);
    } else if (method == Method::PMLS) {
        theta *= std::exp(residuals(spec, data, f.theta_hat).raw.mean());
    }
    theta = theta.cwiseQuotient(scale);

    SurfaceFit out;
    out.method = method;
    for (Eigen::Index k = 0; k < 6; ++k) out.coefficients[static_cast<std::size_t>(k)] = theta[k];
    out.lambda = lambda;
    out.bic = f.bic;
    out.converged = f.converged;
    return out;
}

}  // namespace

std::vector<SurfaceFit> compare_methods(const PointCloud& cloud, const SurfaceOptions& options) {
    const Eigen::Index n = cloud.z.size();
    if (n == 0) throw DataError("point cloud is empty");
    if (cloud.xy.rows() != n || cloud.xy.cols() != 2) throw DataError("point cloud needs n x 2 coordinates");
    int sign = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double z = cloud.z[i];
        if (!(z != 0.0) || !std::isfinite(z)) {
            throw DataError("z must be nonzero and finite (row " + std::to_string(i) + ")");
        }
        const int s = z > 0.0 ? 1 : -1;
        if (sign == 0) sign = s;
        if (s != sign) throw DataError("z changes sign (row " + std::to_string(i) + ")");
    }

    PointCloud magnitude = cloud;
    magnitude.z = cloud.z.cwiseAbs();
    const Dataset raw = dataset_from_cloud(magnitude);
    const Matrix terms = quadratic_terms(raw.covariates);

    std::vector<SurfaceFit> fits;
    for (Method m : options.methods) {
        SurfaceFit f = fit_one(m, raw, terms, options);
        for (double& c : f.coefficients) c *= sign;
        fits.push_back(f);
    }
    return fits;
}

std::string comparison_csv(const std::vector<SurfaceFit>& fits) {
    std::string out = "method";
    for (const char* t : surface_terms) out += std::string(",") + t;
    out += '\n';
    for (const auto& f : fits) {
        out += to_string(f.method);
        for (double c : f.coefficients) out += ',' + format_double(c);
        out += '\n';
    }
    return out;
}

std::string comparison_text(const std::vector<SurfaceFit>& fits) {
    std::ostringstream os;
    os << std::left << std::setw(10) << "method" << std::right;
    for (const char* t : surface_terms) os << std::setw(12) << t;
    os << '\n';
    for (const auto& f : fits) {
        os << std::left << std::setw(10) << to_string(f.method) << std::right;
        for (double c : f.coefficients) {
            std::ostringstream cell;
            cell << std::setprecision(4) << (c == 0.0 ? 0.0 : c);
            os << std::setw(12) << cell.str();
        }
        os << '\n';
    }
    return os.str();
}

}  // namespace mls
