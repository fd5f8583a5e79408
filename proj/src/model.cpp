#include "mls/model.hpp"

#include <cmath>

#include "mls/error.hpp"

namespace mls {

void Dataset::validate() const {
    const auto n = response.size();
    if (n == 0) throw DataError("dataset is empty");
    if (locations.rows() != n || covariates.rows() != n) {
        throw DataError("row count mismatch: locations " + std::to_string(locations.rows()) + ", covariates " +
                        std::to_string(covariates.rows()) + ", response " + std::to_string(n));
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!std::isfinite(response[i])) throw DataError("non-finite response at row " + std::to_string(i));
        if (scale == Scale::Raw && !(response[i] > 0.0)) {
            throw DataError("raw-scale response must be strictly positive; row " + std::to_string(i) + " has " +
                            std::to_string(response[i]));
        }
    }
}

Dataset Dataset::to_log() const {
    if (scale != Scale::Raw) throw ScaleMismatch("to_log requires a raw-scale dataset");
    validate();
    Dataset out = *this;
    out.response = response.array().log().matrix();
    out.scale = Scale::Log;
    return out;
}

std::string_view to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::LogLinear: return "loglinear";
        case ModelKind::Logistic: return "logistic";
        case ModelKind::PolynomialSurface2D: return "surface2d";
        case ModelKind::LinearAdditive: return "linear";
    }
    return "?";
}

ModelKind parse_model_kind(std::string_view name) {
    if (name == "loglinear") return ModelKind::LogLinear;
    if (name == "logistic") return ModelKind::Logistic;
    if (name == "surface2d") return ModelKind::PolynomialSurface2D;
    if (name == "linear") return ModelKind::LinearAdditive;
    throw ConfigError("unknown model '" + std::string(name) + "'");
}

ModelSpec::ModelSpec(ModelKind kind, std::size_t dimension) : kind_(kind), dimension_(dimension) {
    if (dimension == 0) throw ConfigError("model dimension must be positive");
    if (kind == ModelKind::PolynomialSurface2D && dimension != 6) {
        throw ConfigError("surface2d model has exactly 6 parameters");
    }
    if (kind == ModelKind::Logistic && dimension < 2) throw ConfigError("logistic model needs p >= 2");
}

ModelSpec ModelSpec::for_covariates(ModelKind kind, std::size_t covariate_count) {
    switch (kind) {
        case ModelKind::PolynomialSurface2D: return {kind, 6};
        case ModelKind::Logistic: return {kind, covariate_count + 1};
        default: return {kind, covariate_count};
    }
}

std::size_t ModelSpec::required_covariates() const noexcept {
    switch (kind_) {
        case ModelKind::PolynomialSurface2D: return 2;
        case ModelKind::Logistic: return dimension_ - 1;
        default: return dimension_;
    }
}

Matrix quadratic_terms(const Matrix& xy) {
    const auto n = xy.rows();
    Matrix d(n, 6);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double x = xy(i, 0);
        const double y = xy(i, 1);
        d(i, 0) = 1.0;
        d(i, 1) = x;
        d(i, 2) = y;
        d(i, 3) = x * x;
        d(i, 4) = y * y;
        d(i, 5) = x * y;
    }
    return d;
}

Matrix design_matrix(const ModelSpec& model, const Dataset& data) {
    const auto need = static_cast<Eigen::Index>(model.required_covariates());
    if (data.covariates.cols() < need) {
        throw DataError("model '" + std::string(to_string(model.kind())) + "' needs " + std::to_string(need) +
                        " covariate columns, dataset has " + std::to_string(data.covariates.cols()));
    }
    if (model.kind() == ModelKind::PolynomialSurface2D) return quadratic_terms(data.covariates.leftCols(2));
    return data.covariates.leftCols(need);
}

ModelEvaluator::ModelEvaluator(ModelSpec model, const Dataset& data)
    : model_(model), design_(design_matrix(model, data)) {}

void ModelEvaluator::check_theta(const Vector& theta) const {
    if (static_cast<std::size_t>(theta.size()) != model_.dimension()) {
        throw ConfigError("parameter vector has length " + std::to_string(theta.size()) + ", model expects " +
                          std::to_string(model_.dimension()));
    }
}

Vector ModelEvaluator::index(const Vector& theta) const {
    check_theta(theta);
    if (model_.kind() == ModelKind::Logistic) return design_ * theta.tail(theta.size() - 1);
    return design_ * theta;
}

std::optional<std::size_t> ModelEvaluator::infeasible_row(const Vector& index, const Vector& theta) const {
    const auto n = index.size();
    switch (model_.kind()) {
        case ModelKind::LogLinear:
            for (Eigen::Index i = 0; i < n; ++i) {
                if (!(index[i] > 0.0)) return static_cast<std::size_t>(i);
            }
            break;
        case ModelKind::Logistic:
            for (Eigen::Index i = 0; i < n; ++i) {
                const double den = 1.0 + theta[0] * std::exp(-index[i]);
                if (den == 0.0 || std::isnan(den)) return static_cast<std::size_t>(i);
            }
            break;
        default: break;
    }
    return std::nullopt;
}

bool ModelEvaluator::try_values(const Vector& index, const Vector& theta, Vector& out) const {
    const auto n = index.size();
    out.resize(n);
    switch (model_.kind()) {
        case ModelKind::LinearAdditive:
        case ModelKind::PolynomialSurface2D: out = index; return true;
        case ModelKind::LogLinear:
            for (Eigen::Index i = 0; i < n; ++i) {
                if (!(index[i] > 0.0)) return false;
                out[i] = std::log(index[i]);
            }
            return true;
        case ModelKind::Logistic: {
            const double t1 = theta[0];
            for (Eigen::Index i = 0; i < n; ++i) {
                const double den = 1.0 + t1 * std::exp(-index[i]);
                if (den == 0.0 || std::isnan(den)) return false;
                out[i] = 1.0 / den;
            }
            return true;
        }
    }
    return false;
}

void ModelEvaluator::values(const Vector& index, const Vector& theta, Vector& out) const {
    if (!try_values(index, theta, out)) {
        const auto row = infeasible_row(index, theta).value_or(0);
        throw InfeasibleParameter(row, model_.kind() == ModelKind::LogLinear ? "x'theta <= 0"
                                                                             : "1 + theta_1 exp(-x'theta) == 0");
    }
}

void ModelEvaluator::derivative_column(std::size_t j, const Vector& index, const Vector& theta, Vector& out) const {
    const auto n = index.size();
    out.resize(n);
    switch (model_.kind()) {
        case ModelKind::LinearAdditive:
        case ModelKind::PolynomialSurface2D: out = design_.col(static_cast<Eigen::Index>(j)); return;
        case ModelKind::LogLinear:
            out = design_.col(static_cast<Eigen::Index>(j)).cwiseQuotient(index);
            return;
        case ModelKind::Logistic: {
            const double t1 = theta[0];
            if (j == 0) {
                // dg/dtheta_1 = -e / (1 + theta_1 e)^2
                for (Eigen::Index i = 0; i < n; ++i) {
                    const double e = std::exp(-index[i]);
                    const double g = 1.0 / (1.0 + t1 * e);
                    out[i] = -e * g * g;
                }
            } else {
                // dg/dtheta_k = x_k g (1 - g), written without cancellation as x_k g * (t g)
                const auto col = design_.col(static_cast<Eigen::Index>(j - 1));
                for (Eigen::Index i = 0; i < n; ++i) {
                    const double t = t1 * std::exp(-index[i]);
                    const double g = 1.0 / (1.0 + t);
                    out[i] = col[i] * g * (t * g);
                }
            }
            return;
        }
    }
}

Vector evaluate(const ModelSpec& model, const Dataset& data, const Vector& theta) {
    const ModelEvaluator ev(model, data);
    Vector out;
    ev.values(ev.index(theta), theta, out);
    return out;
}

Matrix gradient(const ModelSpec& model, const Dataset& data, const Vector& theta) {
    const ModelEvaluator ev(model, data);
    const Vector idx = ev.index(theta);
    if (auto row = ev.infeasible_row(idx, theta)) {
        throw InfeasibleParameter(*row, "gradient requested at an infeasible parameter");
    }
    Matrix jac(idx.size(), static_cast<Eigen::Index>(model.dimension()));
    Vector col;
    for (std::size_t k = 0; k < model.dimension(); ++k) {
        ev.derivative_column(k, idx, theta, col);
        jac.col(static_cast<Eigen::Index>(k)) = col;
    }
    return jac;
}

}  // namespace mls
