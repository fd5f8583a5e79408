#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mls {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data (bad CSV, row-count mismatch, z <= 0 on raw scale).
class DataError : public Error {
public:
    using Error::Error;
};

class InfeasibleParameter : public Error {
public:
    InfeasibleParameter(std::size_t row, const std::string& what)
        : Error("infeasible parameter at row " + std::to_string(row) + ": " + what), row_(row) {}
    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

class ScaleMismatch : public Error {
public:
    using Error::Error;
};

class NegativeArgument : public Error {
public:
    using Error::Error;
};

class NonpositiveArgument : public Error {
public:
    using Error::Error;
};

class NonpositiveCurvature : public Error {
public:
    using Error::Error;
};

class NoFeasibleStart : public Error {
public:
    using Error::Error;
};

class NonFiniteObjective : public Error {
public:
    using Error::Error;
};

class DegenerateVariance : public Error {
public:
    using Error::Error;
};

class CovarianceNotPD : public Error {
public:
    using Error::Error;
};

class SignChange : public Error {
public:
    using Error::Error;
};

/// Configuration (study/scene/CLI) that fails validation; carries a field path.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace mls
