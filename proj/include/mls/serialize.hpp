#pragma once

#include <filesystem>
#include <cstdint>
#include <initializer_list>
#include <string>

#include <json.hpp>

#include "mls/solver.hpp"

namespace mls {

using Json = nlohmann::ordered_json;

Json to_json(const Vector& v);
Json to_json(const FitResult& fit);
Json to_json(const PathResult& path);

Json to_json(const SolverConfig& config);

/// Overrides fields of `base` from an object; unknown keys and type errors raise
/// ConfigError naming the offending field path.
SolverConfig solver_from_json(const Json& j, const std::string& path, SolverConfig base = {});

/// Field readers shared by the JSON config loaders. All throw ConfigError("<path>: ...").
namespace json_field {
void require_object(const Json& j, const std::string& path);
void allow_keys(const Json& j, const std::string& path, std::initializer_list<const char*> keys);
double number(const Json& j, const std::string& path);
std::size_t count(const Json& j, const std::string& path);
std::uint64_t seed(const Json& j, const std::string& path);
bool flag(const Json& j, const std::string& path);
std::string text(const Json& j, const std::string& path);
const Json& array(const Json& j, const std::string& path);
}  // namespace json_field

/// Serializes with every floating-point number in shortest round-trip form.
std::string dump_json(const Json& value, int indent = 2);

/// Writes `content` to a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace mls
