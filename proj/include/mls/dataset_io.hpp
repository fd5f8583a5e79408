#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "mls/model.hpp"

namespace mls {

/// Raw x y z triples as read from a point-cloud file. z may be of either sign.
struct PointCloud {
    Matrix xy;  // n x 2
    Vector z;
};

/// Reads a CSV with header `s1,s2,x1,...,xk,response`.
Dataset read_dataset_csv(std::istream& in, Scale scale);
Dataset read_dataset_csv(const std::filesystem::path& path, Scale scale);

/// Writes the CSV layout read_dataset_csv accepts, numbers in round-trip form.
void write_dataset_csv(std::ostream& out, const Dataset& data);
void write_dataset_csv(const std::filesystem::path& path, const Dataset& data);

/// Three whitespace-separated columns per line; blank lines and lines starting with '#' are skipped.
PointCloud read_xyz(std::istream& in);
PointCloud read_xyz(const std::filesystem::path& path);

void write_xyz(std::ostream& out, const PointCloud& cloud);
void write_xyz(const std::filesystem::path& path, const PointCloud& cloud);

/// Raw-scale Dataset with (x, y) as both location and covariates. Throws DataError if any z <= 0.
Dataset dataset_from_cloud(const PointCloud& cloud);

/// Shortest decimal form that reads back as the same double.
std::string format_double(double value);

}  // namespace mls
