#include "mls/objective.hpp"

#include <cmath>
#include <string>

#include "mls/error.hpp"

namespace mls {

std::string_view to_string(Method method) {
    switch (method) {
        case Method::PMLS: return "pmls";
        case Method::POLS: return "pols";
        case Method::Additive: return "additive";
    }
    return "?";
}

Method parse_method(std::string_view name) {
    if (name == "pmls") return Method::PMLS;
    if (name == "pols") return Method::POLS;
    if (name == "additive") return Method::Additive;
    throw ConfigError("unknown method '" + std::string(name) + "'");
}

void ObjectiveSpec::validate() const {
    penalty.validate();
    if (!penalty_exempt.empty() && penalty_exempt.size() != model.dimension()) {
        throw ConfigError("penalty_exempt mask has length " + std::to_string(penalty_exempt.size()) +
                          ", model has " + std::to_string(model.dimension()) + " parameters");
    }
}

Vector center(const Vector& x) {
    if (x.size() == 0) return x;
    return (x.array() - x.mean()).matrix();
}

void check_scale(const ObjectiveSpec& spec, const Dataset& data) {
    if (data.scale != spec.required_scale()) {
        throw ScaleMismatch(std::string(to_string(spec.method)) + " requires a " +
                            (spec.required_scale() == Scale::Log ? "log" : "raw") + "-scale response");
    }
}

namespace {

void check_params(const ObjectiveSpec& spec, const Vector& params) {
    if (static_cast<std::size_t>(params.size()) != spec.parameter_count()) {
        throw ConfigError("parameter vector has length " + std::to_string(params.size()) + ", expected " +
                          std::to_string(spec.parameter_count()));
    }
}

Vector theta_part(const ObjectiveSpec& spec, const Vector& params) {
    return params.tail(static_cast<Eigen::Index>(spec.model.dimension()));
}

}  // namespace

Residuals residuals(const ObjectiveSpec& spec, const Dataset& data, const Vector& params) {
    check_params(spec, params);
    check_scale(spec, data);
    Residuals r;
    r.raw = data.response - evaluate(spec.model, data, theta_part(spec, params));
    if (spec.method == Method::POLS) r.raw.array() -= params[0];
    if (spec.method == Method::PMLS) r.centered = center(r.raw);
    return r;
}

double smooth_value(const ObjectiveSpec& spec, const Dataset& data, const Vector& params) {
    const Residuals r = residuals(spec, data, params);
    return spec.method == Method::PMLS ? r.centered.squaredNorm() : r.raw.squaredNorm();
}

double penalty_total(const ObjectiveSpec& spec, std::size_t n, const Vector& params) {
    if (spec.penalty.family == PenaltyFamily::None) return 0.0;
    const std::size_t off = spec.theta_offset();
    double total = 0.0;
    for (std::size_t j = 0; j < spec.model.dimension(); ++j) {
        if (spec.is_penalized(j)) total += penalty_value(spec.penalty, std::abs(params[static_cast<Eigen::Index>(off + j)]));
    }
    return static_cast<double>(n) * total;
}

double objective_value(const ObjectiveSpec& spec, const Dataset& data, const Vector& params) {
    const double value = smooth_value(spec, data, params) + penalty_total(spec, data.size(), params);
    if (!std::isfinite(value)) throw NonFiniteObjective("objective is not finite");
    return value;
}

Vector objective_gradient(const ObjectiveSpec& spec, const Dataset& data, const Vector& params) {
    const Residuals r = residuals(spec, data, params);
    const Matrix jac = gradient(spec.model, data, theta_part(spec, params));
    Vector grad(static_cast<Eigen::Index>(spec.parameter_count()));
    switch (spec.method) {
        case Method::PMLS: {
            // -2 G'(r - mean r) = -2 G'r + 2 mean(r) colsum(G)
            const double rbar = r.raw.mean();
            grad = -2.0 * (jac.transpose() * r.raw) + 2.0 * rbar * jac.colwise().sum().transpose();
            break;
        }
        case Method::POLS:
            grad[0] = -2.0 * r.raw.sum();
            grad.tail(jac.cols()) = -2.0 * (jac.transpose() * r.raw);
            break;
        case Method::Additive: grad = -2.0 * (jac.transpose() * r.raw); break;
    }
    return grad;
}

}  // namespace mls
