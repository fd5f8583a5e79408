#include "mls/dataset_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "mls/error.hpp"

namespace mls {
namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_commas(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_number(const std::string& cell, std::size_t line_no) {
    double v = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last) {
        throw DataError("line " + std::to_string(line_no) + ": cannot parse number '" + cell + "'");
    }
    return v;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path.string() + "'");
    return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    return out;
}

}  // namespace

std::string format_double(double value) {
    // Shortest representation that parses back to the same double.
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

Dataset read_dataset_csv(std::istream& in, Scale scale) {
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty CSV");
    const auto header = split_commas(trim(line));
    if (header.size() < 4 || header[0] != "s1" || header[1] != "s2" || header.back() != "response") {
        throw DataError("CSV header must be s1,s2,x1..xk,response");
    }
    const std::size_t k = header.size() - 3;
    for (std::size_t j = 0; j < k; ++j) {
        if (header[2 + j] != "x" + std::to_string(j + 1)) {
            throw DataError("CSV header column " + std::to_string(j + 3) + " should be x" + std::to_string(j + 1));
        }
    }

    std::vector<std::vector<double>> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty()) continue;
        const auto cells = split_commas(line);
        if (cells.size() != header.size()) {
            throw DataError("line " + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                            " fields, found " + std::to_string(cells.size()));
        }
        std::vector<double> row(cells.size());
        for (std::size_t c = 0; c < cells.size(); ++c) row[c] = parse_number(cells[c], line_no);
        rows.push_back(std::move(row));
    }

    const auto n = static_cast<Eigen::Index>(rows.size());
    Dataset d;
    d.scale = scale;
    d.locations.resize(n, 2);
    d.covariates.resize(n, static_cast<Eigen::Index>(k));
    d.response.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& r = rows[static_cast<std::size_t>(i)];
        d.locations(i, 0) = r[0];
        d.locations(i, 1) = r[1];
        for (std::size_t j = 0; j < k; ++j) d.covariates(i, static_cast<Eigen::Index>(j)) = r[2 + j];
        d.response[i] = r.back();
    }
    d.validate();
    return d;
}

Dataset read_dataset_csv(const std::filesystem::path& path, Scale scale) {
    auto in = open_in(path);
    try {
        return read_dataset_csv(in, scale);
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

void write_dataset_csv(std::ostream& out, const Dataset& data) {
    if (data.locations.cols() != 2) throw DataError("CSV export supports 2-d locations only");
    out << "s1,s2";
    for (Eigen::Index j = 0; j < data.covariates.cols(); ++j) out << ",x" << (j + 1);
    out << ",response\n";
    for (Eigen::Index i = 0; i < data.response.size(); ++i) {
        out << format_double(data.locations(i, 0)) << ',' << format_double(data.locations(i, 1));
        for (Eigen::Index j = 0; j < data.covariates.cols(); ++j) out << ',' << format_double(data.covariates(i, j));
        out << ',' << format_double(data.response[i]) << '\n';
    }
}

void write_dataset_csv(const std::filesystem::path& path, const Dataset& data) {
    auto out = open_out(path);
    write_dataset_csv(out, data);
}

PointCloud read_xyz(std::istream& in) {
    std::vector<double> xs, ys, zs;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line.front() == '#') continue;
        std::istringstream ss(line);
        std::string a, b, c, extra;
        if (!(ss >> a >> b >> c) || (ss >> extra)) {
            throw DataError("line " + std::to_string(line_no) + ": expected three columns x y z");
        }
        xs.push_back(parse_number(a, line_no));
        ys.push_back(parse_number(b, line_no));
        zs.push_back(parse_number(c, line_no));
    }
    if (zs.empty()) throw DataError("point cloud is empty");
    PointCloud cloud;
    const auto n = static_cast<Eigen::Index>(zs.size());
    cloud.xy.resize(n, 2);
    cloud.z.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        cloud.xy(i, 0) = xs[static_cast<std::size_t>(i)];
        cloud.xy(i, 1) = ys[static_cast<std::size_t>(i)];
        cloud.z[i] = zs[static_cast<std::size_t>(i)];
    }
    return cloud;
}

PointCloud read_xyz(const std::filesystem::path& path) {
    auto in = open_in(path);
    try {
        return read_xyz(in);
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

void write_xyz(std::ostream& out, const PointCloud& cloud) {
    for (Eigen::Index i = 0; i < cloud.z.size(); ++i) {
        out << format_double(cloud.xy(i, 0)) << ' ' << format_double(cloud.xy(i, 1)) << ' '
            << format_double(cloud.z[i]) << '\n';
    }
}

void write_xyz(const std::filesystem::path& path, const PointCloud& cloud) {
    auto out = open_out(path);
    write_xyz(out, cloud);
}

Dataset dataset_from_cloud(const PointCloud& cloud) {
    Dataset d;
    d.locations = cloud.xy;
    d.covariates = cloud.xy;
    d.response = cloud.z;
    d.scale = Scale::Raw;
    d.validate();
    return d;
}

}  // namespace mls
