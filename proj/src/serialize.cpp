#include "mls/serialize.hpp"

#include <cmath>
#include <fstream>

#include "mls/dataset_io.hpp"
#include "mls/error.hpp"

namespace mls {

Json to_json(const Vector& v) {
    Json arr = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

Json to_json(const FitResult& fit) {
    Json j;
    j["theta_hat"] = to_json(fit.theta_hat);
    j["active_set"] = fit.active_set;
    j["objective"] = fit.objective;
    j["smooth_part"] = fit.smooth_part;
    j["iterations"] = fit.iterations;
    j["converged"] = fit.converged;
    j["lambda"] = fit.lambda;
    // JSON has no infinity; a degenerate variance is reported as null plus a flag.
    j["bic"] = std::isfinite(fit.bic) ? Json(fit.bic) : Json(nullptr);
    j["bic_degenerate"] = fit.bic_degenerate;
    return j;
}

Json to_json(const PathResult& path) {
    Json j;
    j["lambda_max"] = path.lambda_max;
    j["selected"] = path.selected;
    j["selected_lambda"] = path.points.at(path.selected).lambda;
    Json criteria = Json::array();
    Json points = Json::array();
    for (const auto& pt : path.points) {
        criteria.push_back(std::isfinite(pt.fit.bic) ? Json(pt.fit.bic) : Json(nullptr));
        Json entry;
        entry["lambda"] = pt.lambda;
        entry["fit"] = to_json(pt.fit);
        points.push_back(std::move(entry));
    }
    j["criterion"] = std::move(criteria);
    j["points"] = std::move(points);
    return j;
}

namespace json_field {

void require_object(const Json& j, const std::string& path) {
    if (!j.is_object()) throw ConfigError(path + ": expected an object");
}

void allow_keys(const Json& j, const std::string& path, std::initializer_list<const char*> keys) {
    require_object(j, path);
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* k : keys) known = known || it.key() == k;
        if (!known) throw ConfigError(path + "." + it.key() + ": unknown field");
    }
}

double number(const Json& j, const std::string& path) {
    if (!j.is_number()) throw ConfigError(path + ": expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ConfigError(path + ": not finite");
    return v;
}

namespace {
// Parsed text gives unsigned integers; values set from C++ ints are stored signed.
bool nonnegative_integer(const Json& j) {
    return j.is_number_unsigned() || (j.is_number_integer() && j.get<std::int64_t>() >= 0);
}
}  // namespace

std::size_t count(const Json& j, const std::string& path) {
    if (!nonnegative_integer(j)) throw ConfigError(path + ": expected a nonnegative integer");
    return j.get<std::size_t>();
}

std::uint64_t seed(const Json& j, const std::string& path) {
    if (!nonnegative_integer(j)) throw ConfigError(path + ": expected a nonnegative integer seed");
    return j.get<std::uint64_t>();
}

bool flag(const Json& j, const std::string& path) {
    if (!j.is_boolean()) throw ConfigError(path + ": expected true or false");
    return j.get<bool>();
}

std::string text(const Json& j, const std::string& path) {
    if (!j.is_string()) throw ConfigError(path + ": expected a string");
    return j.get<std::string>();
}

const Json& array(const Json& j, const std::string& path) {
    if (!j.is_array()) throw ConfigError(path + ": expected an array");
    return j;
}

}  // namespace json_field

Json to_json(const SolverConfig& c) {
    Json j;
    j["max_outer_iterations"] = c.max_outer_iterations;
    j["coordinate_tolerance"] = c.coordinate_tolerance;
    j["objective_tolerance"] = c.objective_tolerance;
    j["backtrack_factor"] = c.backtrack_factor;
    j["max_halvings"] = c.max_halvings;
    j["random_restarts"] = c.random_restarts;
    j["restart_seed"] = c.restart_seed;
    j["unpenalized_start"] = c.unpenalized_start;
    j["df_includes_intercept"] = c.df_includes_intercept;
    return j;
}

SolverConfig solver_from_json(const Json& j, const std::string& path, SolverConfig c) {
    using namespace json_field;
    allow_keys(j, path,
               {"max_outer_iterations", "coordinate_tolerance", "objective_tolerance", "backtrack_factor",
                "max_halvings", "random_restarts", "restart_seed", "unpenalized_start", "df_includes_intercept"});
    const auto as_int = [&](const char* key) {
        const std::size_t v = count(j.at(key), path + "." + key);
        if (v > 100000000) throw ConfigError(path + "." + key + ": too large");
        return static_cast<int>(v);
    };
    if (j.contains("max_outer_iterations")) c.max_outer_iterations = as_int("max_outer_iterations");
    if (j.contains("coordinate_tolerance")) c.coordinate_tolerance = number(j["coordinate_tolerance"], path + ".coordinate_tolerance");
    if (j.contains("objective_tolerance")) c.objective_tolerance = number(j["objective_tolerance"], path + ".objective_tolerance");
    if (j.contains("backtrack_factor")) c.backtrack_factor = number(j["backtrack_factor"], path + ".backtrack_factor");
    if (j.contains("max_halvings")) c.max_halvings = as_int("max_halvings");
    if (j.contains("random_restarts")) c.random_restarts = as_int("random_restarts");
    if (j.contains("restart_seed")) c.restart_seed = seed(j["restart_seed"], path + ".restart_seed");
    if (j.contains("unpenalized_start")) c.unpenalized_start = flag(j["unpenalized_start"], path + ".unpenalized_start");
    if (j.contains("df_includes_intercept")) c.df_includes_intercept = flag(j["df_includes_intercept"], path + ".df_includes_intercept");
    try {
        c.validate();
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return c;
}

namespace {

void dump_into(const Json& v, int indent, int depth, std::string& out) {
    const auto newline = [&](int d) {
        if (indent < 0) return;
        out += '\n';
        out.append(static_cast<std::size_t>(indent * d), ' ');
    };
    switch (v.type()) {
        case Json::value_t::number_float: {
            const double d = v.get<double>();
            out += std::isfinite(d) ? format_double(d) : "null";
            return;
        }
        case Json::value_t::object: {
            if (v.empty()) {
                out += "{}";
                return;
            }
            out += '{';
            bool first = true;
            for (auto it = v.begin(); it != v.end(); ++it) {
                if (!first) out += ',';
                first = false;
                newline(depth + 1);
                out += Json(it.key()).dump();
                out += indent < 0 ? ":" : ": ";
                dump_into(it.value(), indent, depth + 1, out);
            }
            newline(depth);
            out += '}';
            return;
        }
        case Json::value_t::array: {
            if (v.empty()) {
                out += "[]";
                return;
            }
            out += '[';
            bool first = true;
            for (const auto& item : v) {
                if (!first) out += ',';
                first = false;
                newline(depth + 1);
                dump_into(item, indent, depth + 1, out);
            }
            newline(depth);
            out += ']';
            return;
        }
        default: out += v.dump(); return;
    }
}

}  // namespace

std::string dump_json(const Json& value, int indent) {
    std::string out;
    dump_into(value, indent, 0, out);
    out += '\n';
    return out;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot write '" + tmp.string() + "'");
        out << content;
        if (!out) throw DataError("write failed for '" + tmp.string() + "'");
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace mls
