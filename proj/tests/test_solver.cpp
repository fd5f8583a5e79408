#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "mls/error.hpp"
#include "mls/solver.hpp"
#include "oracles.hpp"

using namespace mls;

namespace {

ObjectiveSpec make_spec(Method method, ModelKind kind, std::size_t p, PenaltySpec pen = {}) {
    ObjectiveSpec s;
    s.method = method;
    s.model = ModelSpec(kind, p);
    s.penalty = pen;
    return s;
}

SolverConfig tight() {
    SolverConfig c;
    c.max_outer_iterations = 20000;
    c.coordinate_tolerance = 1e-13;
    c.objective_tolerance = 1e-15;
    return c;
}

/// Q_n at theta written out directly: centered (PMLS) or intercept-profiled (POLS) residuals.
double oracle_objective(Method method, const Dataset& d, const PenaltySpec& pen, const Vector& theta) {
    const Vector g = oracle::mean_vector(ModelKind::LinearAdditive, d.covariates, theta);
    const Vector r = d.response - g;
    double smooth = 0.0;
    const double mean = r.mean();
    for (Eigen::Index i = 0; i < r.size(); ++i) smooth += (r[i] - mean) * (r[i] - mean);
    (void)method;  // min over beta_0 of the POLS sum equals the centered sum
    double pen_sum = 0.0;
    for (Eigen::Index j = 0; j < theta.size(); ++j) {
        const double t = std::abs(theta[j]);
        pen_sum += pen.family == PenaltyFamily::Lasso ? pen.lambda * t : oracle::scad_value(pen.lambda, pen.scad_a, t);
    }
    return smooth + static_cast<double>(d.size()) * pen_sum;
}

}  // namespace

TEST_CASE("noiseless linear PMLS recovers the generating theta") {
    std::mt19937_64 rng(31);
    Dataset d = fixture::random_dataset(ModelKind::LinearAdditive, 20, 3, rng);
    Vector truth(3);
    truth << 1.5, -0.7, 2.0;
    d.response = d.covariates * truth;
    d.response.array() += 4.0;  // unknown error mean, removed by centering
    const FitResult f = fit(make_spec(Method::PMLS, ModelKind::LinearAdditive, 3), d, tight());
    CHECK(f.converged);
    CHECK((f.theta_hat - truth).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("PMLS + LASSO agrees with a 400 x 400 grid search") {
    std::mt19937_64 rng(32);
    Dataset d = fixture::random_dataset(ModelKind::LinearAdditive, 6, 2, rng);
    const PenaltySpec pen{PenaltyFamily::Lasso, 0.15, 3.7};
    const FitResult f = fit(make_spec(Method::PMLS, ModelKind::LinearAdditive, 2, pen), d, tight());
    const auto [arg, best] = oracle::grid_min_2d(
        [&](const Vector& t) { return oracle_objective(Method::PMLS, d, pen, t); }, -5.0, 5.0, 400);
    CHECK(f.objective <= best + 1e-6);
    CHECK(std::abs(f.objective - oracle_objective(Method::PMLS, d, pen, f.theta_hat)) <= 1e-10);
}

TEST_CASE("fit invariants: monotone history, exact zeros, KKT on inactive coordinates") {
    std::mt19937_64 rng(33);
    for (const auto family : {PenaltyFamily::Lasso, PenaltyFamily::Scad}) {
        for (const auto method : {Method::PMLS, Method::POLS}) {
            for (int trial = 0; trial < 10; ++trial) {
                const Dataset d = fixture::random_dataset(ModelKind::LinearAdditive, 40, 6, rng);
                const PenaltySpec pen{family, 0.1, 3.7};
                const auto spec = make_spec(method, ModelKind::LinearAdditive, 6, pen);
                const FitResult f = fit(spec, d, tight());
                for (std::size_t k = 1; k < f.history.size(); ++k) CHECK(f.history[k] <= f.history[k - 1]);
                const Vector grad = objective_gradient(spec, d, f.theta_hat);
                const std::size_t off = spec.theta_offset();
                for (std::size_t j = 0; j < 6; ++j) {
                    if (f.theta_hat[static_cast<Eigen::Index>(off + j)] != 0.0) continue;
                    const double gj = std::abs(grad[static_cast<Eigen::Index>(off + j)]);
                    // Stationarity of n * p_lambda at zero: |dS/dtheta_j| <= n * q_lambda(0+).
                    CHECK(gj <= 40.0 * pen.lambda + 1e-6);
                    CHECK(gj <= 2.0 * 40.0 * pen.lambda + 1e-6);
                }
            }
        }
    }
}

TEST_CASE("fit matches grid search on small instances (PMLS, POLS; LASSO, SCAD)") {
    std::mt19937_64 rng(34);
    std::uniform_int_distribution<int> n_d(4, 10);
    std::uniform_real_distribution<double> lam_d(0.02, 0.3);
    int checked = 0;
    for (const auto method : {Method::PMLS, Method::POLS}) {
        for (const auto family : {PenaltyFamily::Lasso, PenaltyFamily::Scad}) {
            for (int trial = 0; trial < 5; ++trial) {
                const auto n = static_cast<std::size_t>(n_d(rng));
                const Dataset d = fixture::random_dataset(ModelKind::LinearAdditive, n, 2, rng);
                const PenaltySpec pen{family, lam_d(rng), 3.7};
                SolverConfig cfg = tight();
                cfg.random_restarts = 8;
                const FitResult f = fit(make_spec(method, ModelKind::LinearAdditive, 2, pen), d, cfg);
                const auto [arg, best] = oracle::grid_min_2d(
                    [&](const Vector& t) { return oracle_objective(method, d, pen, t); }, -5.0, 5.0, 400);
                CHECK_MESSAGE(f.objective <= best + 1e-6, "method ", to_string(method), " penalty ",
                              to_string(family), " n ", n, " lambda ", pen.lambda, " theta ", f.theta_hat.transpose(),
                              " grid ", arg.transpose());
                ++checked;
            }
        }
    }
    CHECK(checked == 20);
}

TEST_CASE("refitting from a solution moves no coordinate beyond the tolerance") {
    std::mt19937_64 rng(35);
    Dataset d = fixture::random_dataset(ModelKind::Logistic, 60, 4, rng);
    Vector truth(4);
    truth << 1.0, 1.5, 0.0, -1.0;
    std::normal_distribution<double> noise(0.2, 0.1);
    d.response = evaluate(ModelSpec(ModelKind::Logistic, 4), d, truth);
    for (Eigen::Index i = 0; i < d.response.size(); ++i) d.response[i] += noise(rng);
    const auto spec = make_spec(Method::PMLS, ModelKind::Logistic, 4, {PenaltyFamily::Scad, 0.02, 3.7});
    SolverConfig cfg;
    cfg.random_restarts = 3;
    const FitResult first = fit(spec, d, cfg);
    SolverConfig again;
    again.initialization = Initialization::Warm;
    again.start = first.theta_hat;
    const FitResult second = fit(spec, d, again);
    CHECK((second.theta_hat - first.theta_hat).cwiseAbs().maxCoeff() <= again.coordinate_tolerance);
}

TEST_CASE("POLS objective at its optimum is not below the PMLS optimum") {
    std::mt19937_64 rng(36);
    for (int trial = 0; trial < 10; ++trial) {
        const Dataset d = fixture::random_dataset(ModelKind::LinearAdditive, 8, 2, rng);
        const PenaltySpec pen{trial % 2 ? PenaltyFamily::Scad : PenaltyFamily::Lasso, 0.1, 3.7};
        SolverConfig cfg = tight();
        cfg.random_restarts = 8;
        const FitResult pm = fit(make_spec(Method::PMLS, ModelKind::LinearAdditive, 2, pen), d, cfg);
        const FitResult po = fit(make_spec(Method::POLS, ModelKind::LinearAdditive, 2, pen), d, cfg);
        CHECK(po.objective >= pm.objective - 1e-6);
    }
}

TEST_CASE("logistic PMLS is stationary at zero; restarts escape") {
    std::mt19937_64 rng(37);
    Dataset d = fixture::random_dataset(ModelKind::Logistic, 80, 3, rng);
    Vector truth(3);
    truth << 1.0, 2.0, -1.0;
    d.response = evaluate(ModelSpec(ModelKind::Logistic, 3), d, truth).array() + 0.4;
    const auto spec = make_spec(Method::PMLS, ModelKind::Logistic, 3);
    const FitResult stuck = fit(spec, d, SolverConfig{});
    CHECK(stuck.theta_hat.cwiseAbs().maxCoeff() == 0.0);
    SolverConfig cfg = tight();
    cfg.random_restarts = 4;
    const FitResult free = fit(spec, d, cfg);
    CHECK((free.theta_hat - truth).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("starting point errors") {
    std::mt19937_64 rng(38);
    const Dataset d = fixture::random_dataset(ModelKind::LogLinear, 10, 2, rng);
    const auto spec = make_spec(Method::PMLS, ModelKind::LogLinear, 2);
    CHECK_THROWS_AS(fit(spec, d, SolverConfig{}), NoFeasibleStart);
    SolverConfig cfg;
    cfg.initialization = Initialization::Provided;
    cfg.start = Vector::Ones(2);
    CHECK_NOTHROW(fit(spec, d, cfg));
    cfg.start = Vector::Ones(3);
    CHECK_THROWS_AS(fit(spec, d, cfg), NoFeasibleStart);
}

TEST_CASE("bic examples") {
    Dataset d;
    d.locations = Matrix::Zero(4, 2);
    d.covariates = Matrix::Zero(4, 2);
    d.response.resize(4);
    d.response << 1.0, -1.0, 1.0, -1.0;
    const auto spec = make_spec(Method::PMLS, ModelKind::LinearAdditive, 2, {PenaltyFamily::Scad, 0.1, 3.7});
    FitResult f;
    f.theta_hat = Vector::Ones(2);
    CHECK(bic(f, d, spec) == doctest::Approx(std::log(4.0) * 2.0 / 4.0));

    // A zero coefficient does not count toward df.
    const auto spec3 = make_spec(Method::PMLS, ModelKind::LinearAdditive, 3, spec.penalty);
    Dataset d3 = d;
    d3.covariates = Matrix::Zero(4, 3);
    FitResult f3;
    f3.theta_hat.resize(3);
    f3.theta_hat << 1.0, 1.0, 0.0;
    CHECK(bic(f3, d3, spec3) == doctest::Approx(bic(f, d, spec)));

    d.response = Vector::Constant(4, 2.5);
    CHECK_THROWS_AS(bic(f, d, spec), DegenerateVariance);
}

TEST_CASE("lambda path: zero response, grid validation, selection") {
    std::mt19937_64 rng(39);
    Dataset d = fixture::random_dataset(ModelKind::LinearAdditive, 30, 4, rng);
    const auto spec = make_spec(Method::PMLS, ModelKind::LinearAdditive, 4, {PenaltyFamily::Scad, 0.0, 3.7});
    CHECK_THROWS_AS(lambda_path(spec, d, SolverConfig{}, 1), ConfigError);

    Dataset zero = d;
    zero.response.setZero();
    const PathResult zp = lambda_path(spec, zero, SolverConfig{}, 10);
    CHECK(zp.points.size() == 10);
    for (const auto& pt : zp.points) CHECK(pt.fit.active_set.empty());
    CHECK(zp.selected == 0);

    Vector truth(4);
    truth << 2.0, 0.0, -1.5, 0.0;
    std::normal_distribution<double> noise(0.0, 0.1);
    d.response = d.covariates * truth;
    for (Eigen::Index i = 0; i < d.response.size(); ++i) d.response[i] += 1.0 + noise(rng);
    const PathResult path = lambda_path(spec, d, SolverConfig{}, 30);
    for (std::size_t k = 1; k < path.points.size(); ++k) CHECK(path.points[k].lambda < path.points[k - 1].lambda);
    // The largest lambda zeroes everything; lambda_max is tight (slightly smaller lambda activates).
    CHECK(path.points.front().fit.active_set.empty());
    const auto& sel = path.selected_fit();
    CHECK(sel.active_set == std::vector<std::size_t>{0, 2});
    for (const auto& pt : path.points) CHECK(pt.fit.bic >= sel.bic);

    ObjectiveSpec just_below = spec;
    just_below.penalty.lambda = path.lambda_max * 0.98;
    CHECK(!fit(just_below, d, SolverConfig{}).active_set.empty());
}
