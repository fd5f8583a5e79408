// mls: command-line front end.
//
//   mls fit       --data FILE --model M --method X --penalty P [--lambda L | --path N] --out DIR
//   mls simulate  --study FILE --out DIR [--jobs K]
//   mls surface   generate|compare [--scene FILE] [--data FILE] [--config FILE] --out DIR
//   mls replay    --manifest FILE --out DIR
//
// Every command first resolves flags, config files and MLS_SEED into one JSON config, then
// runs from that config alone. The config goes into manifest.json, and replay feeds it back
// through the same code path, so a replayed run writes the same bytes.
//
// Exit codes: 0 ok, 2 bad input (data, config, usage), 3 solver failure, 4 a simulation cell
// exceeded its replicate-failure budget.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "mls/dataset_io.hpp"
#include "mls/error.hpp"
#include "mls/serialize.hpp"
#include "mls/simharness.hpp"
#include "mls/solver.hpp"
#include "mls/surface.hpp"

namespace fs = std::filesystem;
using namespace mls;

namespace {

#ifndef MLS_VERSION
#define MLS_VERSION "0.0.0"
#endif

constexpr int kOk = 0;
constexpr int kInputError = 2;
constexpr int kSolverError = 3;
constexpr int kBudgetExceeded = 4;

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Json read_json(const fs::path& path) {
    const std::string text = read_text(path);
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

// FNV-1a over the file bytes; recorded so a replay can tell its input changed.
std::string content_hash(const fs::path& path) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : read_text(path)) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

void check_input_hash(const Json& config) {
    if (!config.contains("data_hash")) return;
    const fs::path data = config.at("data").get<std::string>();
    if (content_hash(data) != config.at("data_hash").get<std::string>()) {
        throw DataError(data.string() + ": contents differ from the manifest");
    }
}

std::optional<std::uint64_t> env_seed() {
    const char* raw = std::getenv("MLS_SEED");
    if (raw == nullptr || *raw == '\0') return std::nullopt;
    try {
        std::size_t used = 0;
        const unsigned long long v = std::stoull(raw, &used, 0);
        if (used != std::string(raw).size()) throw std::invalid_argument("trailing characters");
        return static_cast<std::uint64_t>(v);
    } catch (const std::exception&) {
        throw ConfigError(std::string("MLS_SEED: not an unsigned integer: '") + raw + "'");
    }
}

void write_manifest(const fs::path& out, const std::string& subcommand, const Json& config,
                    const Json& seeds, const std::vector<std::string>& artifacts, const Json& execution) {
    Json m;
    m["tool"] = "mls";
    m["version"] = MLS_VERSION;
    m["subcommand"] = subcommand;
    m["config"] = config;
    m["seeds"] = seeds;
    m["artifacts"] = artifacts;
    m["execution"] = execution;
    write_file_atomic(out / "manifest.json", dump_json(m));
}

// ---------------------------------------------------------------------------------------------
// fit

struct FitRequest {
    std::string data;
    std::string response = "raw";  // raw: z > 0, logged for pmls/pols; log: already y = log z
    std::string model;
    std::string method;
    std::string penalty;
    std::optional<double> lambda;
    std::optional<std::size_t> path;
    Json options = Json::object();  // scad_a, penalty_exempt, start, solver
};

Json to_json(const FitRequest& r) {
    Json j;
    j["data"] = r.data;
    j["data_hash"] = content_hash(r.data);
    j["response"] = r.response;
    j["model"] = r.model;
    j["method"] = r.method;
    j["penalty"] = r.penalty;
    if (r.lambda) j["lambda"] = *r.lambda;
    if (r.path) j["path"] = *r.path;
    j["options"] = r.options;
    return j;
}

int execute_fit(const Json& config, const fs::path& out) {
    using namespace json_field;
    check_input_hash(config);
    const std::string response = text(config.at("response"), "fit.response");
    if (response != "raw" && response != "log") throw ConfigError("fit.response: expected raw or log");

    ObjectiveSpec spec;
    spec.method = parse_method(text(config.at("method"), "fit.method"));
    const ModelKind kind = parse_model_kind(text(config.at("model"), "fit.model"));
    spec.penalty.family = parse_penalty_family(text(config.at("penalty"), "fit.penalty"));

    Dataset data = read_dataset_csv(fs::path(text(config.at("data"), "fit.data")),
                                    response == "raw" ? Scale::Raw : Scale::Log);
    if (spec.method == Method::Additive) {
        if (response == "log") throw DataError("the additive method needs the raw response");
    } else if (response == "raw") {
        data = data.to_log();
    }
    spec.model = ModelSpec::for_covariates(kind, static_cast<std::size_t>(data.covariates.cols()));
    const auto p = spec.model.dimension();

    const Json& opt = config.at("options");
    allow_keys(opt, "fit.options", {"scad_a", "penalty_exempt", "start", "solver", "fix_scale"});
    if (opt.contains("scad_a")) spec.penalty.scad_a = number(opt["scad_a"], "fit.options.scad_a");
    if (opt.contains("penalty_exempt")) {
        spec.penalty_exempt.assign(p, false);
        const Json& arr = array(opt["penalty_exempt"], "fit.options.penalty_exempt");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const auto j = count(arr[i], "fit.options.penalty_exempt[" + std::to_string(i) + "]");
            if (j >= p) throw ConfigError("fit.options.penalty_exempt[" + std::to_string(i) + "]: out of range");
            spec.penalty_exempt[j] = true;
        }
    }
    SolverConfig solver;
    if (opt.contains("solver")) solver = solver_from_json(opt["solver"], "fit.options.solver");
    if (opt.contains("start")) {
        const Json& arr = array(opt["start"], "fit.options.start");
        if (arr.size() != spec.parameter_count()) {
            throw ConfigError("fit.options.start: expected " + std::to_string(spec.parameter_count()) + " values");
        }
        solver.initialization = Initialization::Provided;
        solver.start.resize(static_cast<Eigen::Index>(arr.size()));
        for (std::size_t i = 0; i < arr.size(); ++i) {
            solver.start[static_cast<Eigen::Index>(i)] = number(arr[i], "fit.options.start[" + std::to_string(i) + "]");
        }
    } else if (kind == ModelKind::LogLinear || kind == ModelKind::Logistic) {
        // theta = 0 is infeasible (log-linear) or stationary (logistic); start from theta_1 = 1.
        solver.initialization = Initialization::Provided;
        solver.start = Vector::Zero(static_cast<Eigen::Index>(spec.parameter_count()));
        solver.start[static_cast<Eigen::Index>(spec.theta_offset())] = 1.0;
    }

    // Centering (PMLS) or a free beta_0 (POLS) absorbs log c in log(c theta' x), so the
    // log-linear index is identified only up to scale. Pin theta_1 = 1 unless told otherwise.
    const bool fix_scale = kind == ModelKind::LogLinear && spec.method != Method::Additive &&
                           (!opt.contains("fix_scale") || flag(opt["fix_scale"], "fit.options.fix_scale"));
    if (fix_scale) {
        const auto off = spec.theta_offset();
        if (solver.start[static_cast<Eigen::Index>(off)] == 0.0) {
            throw ConfigError("fit.options.start: theta_1 must be nonzero when the scale is fixed");
        }
        solver.start.segment(static_cast<Eigen::Index>(off), static_cast<Eigen::Index>(p)) /=
            solver.start[static_cast<Eigen::Index>(off)];
        solver.frozen.assign(spec.parameter_count(), false);
        solver.frozen[off] = true;
        if (spec.penalty_exempt.empty()) spec.penalty_exempt.assign(p, false);
        spec.penalty_exempt[0] = true;
    }

    Json result;
    result["model"] = to_string(kind);
    result["scale_fixed"] = fix_scale;
    result["method"] = to_string(spec.method);
    result["penalty"] = to_string(spec.penalty.family);
    std::ostringstream summary;
    summary << "model " << to_string(kind) << ", method " << to_string(spec.method) << ", penalty "
            << to_string(spec.penalty.family) << ", n = " << data.size() << ", p = " << p << "\n";
    if (fix_scale) summary << "theta1 fixed at 1 (the index scale is not identified)\n";

    FitResult best;
    if (config.contains("path") && spec.penalty.family != PenaltyFamily::None) {
        const auto grid = count(config["path"], "fit.path");
        const PathResult path = lambda_path(spec, data, solver, grid);
        result["path"] = mls::to_json(path);
        best = path.selected_fit();
        summary << "path of " << path.points.size() << " lambdas from " << format_double(path.lambda_max)
                << "; selected #" << path.selected << " (lambda " << format_double(path.points[path.selected].lambda)
                << ")\n";
    } else {
        if (config.contains("lambda")) spec.penalty.lambda = number(config["lambda"], "fit.lambda");
        best = fit(spec, data, solver);
        best.bic = bic(best, data, spec, solver.df_includes_intercept);
        result["fit"] = mls::to_json(best);
        summary << "lambda " << format_double(spec.penalty.lambda) << "\n";
    }
    summary << "objective " << format_double(best.objective) << ", iterations " << best.iterations
            << (best.converged ? ", converged" : ", NOT converged") << "\n";
    for (Eigen::Index i = 0; i < best.theta_hat.size(); ++i) {
        const bool intercept = spec.method == Method::POLS && i == 0;
        summary << (intercept ? std::string("beta0") : "theta" + std::to_string(i + 1 - spec.theta_offset()))
                << "\t" << format_double(best.theta_hat[i]) << "\n";
    }

    write_file_atomic(out / "fit.json", dump_json(result));
    write_file_atomic(out / "summary.txt", summary.str());
    write_manifest(out, "fit", config, Json::object(), {"fit.json", "summary.txt"}, Json::object());
    std::cout << summary.str();
    return kOk;
}

// ---------------------------------------------------------------------------------------------
// simulate

int execute_simulate(const Json& config, const fs::path& out, int jobs) {
    const StudyConfig study = study_from_json(config);
    const auto results = run_study(study, jobs);

    std::vector<std::string> artifacts;
    for (PenaltyFamily pen : study.penalties) {
        const std::string name = "table_" + std::string(to_string(pen)) + ".csv";
        write_file_atomic(out / name, metrics_csv(results, pen));
        artifacts.push_back(name);
    }
    Json failures = Json::array();
    bool over_budget = false;
    for (const auto& r : results) {
        if (r.metrics.failures == 0) continue;
        over_budget = over_budget || r.metrics.failed;
        failures.push_back(Json{{"cell", r.cell.data_key() + "|" + std::string(to_string(r.cell.method)) + "|" +
                                             std::string(to_string(r.cell.penalty))},
                                {"failures", r.metrics.failures},
                                {"over_budget", r.metrics.failed},
                                {"errors", r.metrics.errors}});
    }
    write_file_atomic(out / "failures.json", dump_json(failures));
    artifacts.push_back("failures.json");
    write_manifest(out, "simulate", config, Json{{"base_seed", study.base_seed}}, artifacts,
                   Json{{"jobs", jobs}});

    std::cout << results.size() << " cells, " << study.repetitions << " replicates each; tables in "
              << out.string() << "\n";
    if (over_budget) {
        for (const auto& f : failures) {
            if (f["over_budget"].get<bool>()) {
                std::cerr << "cell over failure budget: " << f["cell"].get<std::string>() << " ("
                          << f["failures"].get<std::size_t>() << " failed)\n";
            }
        }
        return kBudgetExceeded;
    }
    return kOk;
}

// ---------------------------------------------------------------------------------------------
// surface

int execute_generate(const Json& config, const fs::path& out) {
    const SurfaceScene scene = scene_from_json(config.at("scene"));
    write_xyz(out / "cloud.xyz", generate_scene(scene, scene.seed));
    write_manifest(out, "surface generate", config, Json{{"seed", scene.seed}}, {"cloud.xyz"}, Json::object());
    std::cout << "wrote " << scene.grid.size() << " points to " << (out / "cloud.xyz").string() << "\n";
    return kOk;
}

int execute_compare(const Json& config, const fs::path& out) {
    using namespace json_field;
    check_input_hash(config);
    std::vector<std::string> artifacts;
    PointCloud cloud;
    if (config.contains("data")) {
        cloud = read_xyz(fs::path(text(config["data"], "compare.data")));
    } else {
        const SurfaceScene scene = scene_from_json(config.at("scene"));
        cloud = generate_scene(scene, scene.seed);
        write_xyz(out / "cloud.xyz", cloud);
        artifacts.push_back("cloud.xyz");
    }
    SurfaceOptions opt;
    const Json& o = config.at("options");
    allow_keys(o, "compare.options", {"penalty", "path", "scad_a", "pols_max_iterations", "solver"});
    if (o.contains("penalty")) opt.penalty = parse_penalty_family(text(o["penalty"], "compare.options.penalty"));
    if (o.contains("path")) opt.path_size = count(o["path"], "compare.options.path");
    if (o.contains("scad_a")) opt.scad_a = number(o["scad_a"], "compare.options.scad_a");
    if (o.contains("pols_max_iterations")) {
        opt.pols_max_iterations = static_cast<int>(count(o["pols_max_iterations"], "compare.options.pols_max_iterations"));
    }
    if (o.contains("solver")) opt.solver = solver_from_json(o["solver"], "compare.options.solver", opt.solver);

    const auto fits = compare_methods(cloud, opt);
    write_file_atomic(out / "comparison.csv", comparison_csv(fits));
    write_file_atomic(out / "comparison.txt", comparison_text(fits));
    artifacts.push_back("comparison.csv");
    artifacts.push_back("comparison.txt");
    Json seeds = Json::object();
    if (config.contains("scene")) seeds["seed"] = config["scene"]["seed"];
    write_manifest(out, "surface compare", config, seeds, artifacts, Json::object());
    std::cout << comparison_text(fits);
    return kOk;
}

// ---------------------------------------------------------------------------------------------

int dispatch(const std::string& subcommand, const Json& config, const fs::path& out, int jobs) {
    fs::create_directories(out);
    if (subcommand == "fit") return execute_fit(config, out);
    if (subcommand == "simulate") return execute_simulate(config, out, jobs);
    if (subcommand == "surface generate") return execute_generate(config, out);
    if (subcommand == "surface compare") return execute_compare(config, out);
    throw ConfigError("manifest.subcommand: unknown '" + subcommand + "'");
}

template <class Fn>
int guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    } catch (const ScaleMismatch& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    } catch (const SignChange& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    } catch (const Error& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return kSolverError;
    } catch (const Json::exception& e) {
        std::cerr << "error: malformed JSON: " << e.what() << "\n";
        return kInputError;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Penalized modified least squares for multiplicative spatial error models"};
    app.set_version_flag("--version", MLS_VERSION);
    app.require_subcommand(1);

    std::string out_dir;
    int jobs = 1;

    FitRequest fr;
    std::string fit_config;
    double lambda = 0.0;
    std::size_t path = 0;
    auto* fit_cmd = app.add_subcommand("fit", "Fit one dataset at a fixed lambda or over a BIC-selected path");
    fit_cmd->add_option("--data", fr.data, "CSV with header s1,s2,x1..xk,response")->required();
    fit_cmd->add_option("--model", fr.model, "Mean function")
        ->required()
        ->check(CLI::IsMember({"loglinear", "logistic", "surface2d", "linear"}));
    fit_cmd->add_option("--method", fr.method)->required()->check(CLI::IsMember({"pmls", "pols", "additive"}));
    fit_cmd->add_option("--penalty", fr.penalty)->required()->check(CLI::IsMember({"none", "lasso", "scad"}));
    auto* lambda_opt = fit_cmd->add_option("--lambda", lambda, "Fixed lambda")->check(CLI::NonNegativeNumber);
    auto* path_opt = fit_cmd->add_option("--path", path, "Number of lambdas on the path")->check(CLI::Range(2, 100000));
    lambda_opt->excludes(path_opt);
    fit_cmd->add_option("--response", fr.response, "raw (z > 0) or log (already log z)")
        ->check(CLI::IsMember({"raw", "log"}));
    fit_cmd->add_option("--config", fit_config, "JSON with scad_a, penalty_exempt, start, solver");
    fit_cmd->add_option("--out", out_dir)->required();

    std::string study_file;
    std::optional<std::uint64_t> seed_flag;
    auto* sim_cmd = app.add_subcommand("simulate", "Run a Monte Carlo study");
    sim_cmd->add_option("--study", study_file, "Study JSON")->required();
    sim_cmd->add_option("--out", out_dir)->required();
    sim_cmd->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
    sim_cmd->add_option("--seed", seed_flag, "Base seed (overrides MLS_SEED and the study file)");

    auto* surf_cmd = app.add_subcommand("surface", "Synthetic slide scans and the three-way comparison");
    surf_cmd->require_subcommand(1);
    std::string scene_file, cloud_file, compare_config;
    auto* gen_cmd = surf_cmd->add_subcommand("generate", "Write a synthetic XYZ cloud");
    gen_cmd->add_option("--scene", scene_file, "Scene JSON (defaults if omitted)");
    gen_cmd->add_option("--seed", seed_flag, "Noise seed (overrides MLS_SEED and the scene file)");
    gen_cmd->add_option("--out", out_dir)->required();
    auto* cmp_cmd = surf_cmd->add_subcommand("compare", "Fit Additive, POLS and PMLS to an XYZ cloud");
    auto* cmp_data = cmp_cmd->add_option("--data", cloud_file, "XYZ file");
    cmp_cmd->add_option("--scene", scene_file, "Scene JSON to generate from when --data is absent")
        ->excludes(cmp_data);
    cmp_cmd->add_option("--seed", seed_flag, "Noise seed for a generated scene");
    cmp_cmd->add_option("--config", compare_config, "JSON with penalty, path, scad_a, pols_max_iterations, solver");
    cmp_cmd->add_option("--out", out_dir)->required();

    std::string manifest_file;
    auto* replay_cmd = app.add_subcommand("replay", "Re-run from a manifest.json");
    replay_cmd->add_option("--manifest", manifest_file)->required();
    replay_cmd->add_option("--out", out_dir)->required();
    replay_cmd->add_option("--jobs", jobs)->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInputError;
    }

    return guarded([&]() -> int {
        const fs::path out(out_dir);
        if (*fit_cmd) {
            if (!fs::exists(fr.data)) throw DataError("cannot open '" + fr.data + "'");
            fr.data = fs::absolute(fr.data).lexically_normal().string();
            if (*lambda_opt) fr.lambda = lambda;
            if (*path_opt) fr.path = path;
            if (!fit_config.empty()) fr.options = read_json(fit_config);
            json_field::require_object(fr.options, "fit.options");
            return dispatch("fit", to_json(fr), out, 1);
        }
        if (*sim_cmd) {
            StudyConfig study = study_from_json(read_json(study_file));
            if (auto s = env_seed()) study.base_seed = *s;
            if (seed_flag) study.base_seed = *seed_flag;
            return dispatch("simulate", mls::to_json(study), out, jobs);
        }
        if (*gen_cmd) {
            SurfaceScene scene = scene_file.empty() ? SurfaceScene{} : scene_from_json(read_json(scene_file));
            if (auto s = env_seed()) scene.seed = *s;
            if (seed_flag) scene.seed = *seed_flag;
            return dispatch("surface generate", Json{{"scene", mls::to_json(scene)}}, out, 1);
        }
        if (*cmp_cmd) {
            Json options = compare_config.empty() ? Json::object() : read_json(compare_config);
            json_field::require_object(options, "compare.options");
            Json config;
            if (!cloud_file.empty()) {
                if (!fs::exists(cloud_file)) throw DataError("cannot open '" + cloud_file + "'");
                config["data"] = fs::absolute(cloud_file).lexically_normal().string();
                config["data_hash"] = content_hash(cloud_file);
            } else {
                SurfaceScene scene = scene_file.empty() ? SurfaceScene{} : scene_from_json(read_json(scene_file));
                if (auto s = env_seed()) scene.seed = *s;
                if (seed_flag) scene.seed = *seed_flag;
                config["scene"] = mls::to_json(scene);
            }
            config["options"] = options;
            return dispatch("surface compare", config, out, 1);
        }
        const Json manifest = read_json(manifest_file);
        json_field::require_object(manifest, "manifest");
        if (!manifest.contains("subcommand") || !manifest.contains("config")) {
            throw ConfigError("manifest: needs subcommand and config");
        }
        return dispatch(json_field::text(manifest["subcommand"], "manifest.subcommand"), manifest["config"], out,
                        jobs);
    });
}
