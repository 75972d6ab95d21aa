#include <doctest.h>

#include "scalinglab/gamp.hpp"

using namespace slab;

namespace {

ProblemSpec make_spec(Model m, int d, std::int64_t n, double delta, std::uint64_t seed) {
    ProblemSpec s;
    s.model = m;
    s.d = d;
    s.n = n;
    s.gamma = 1.0;
    s.delta = delta;
    s.seed = seed;
    return s;
}

// channel denoiser of the vector algorithm
double channel_g(double omega, double y, double v) { return (y - omega) / (1.0 + v); }

}  // namespace

TEST_CASE("channel denoiser: g(0, 1, 0) = 1") {
    CHECK(channel_g(0.0, 1.0, 0.0) == 1.0);
}

TEST_CASE("vector GAMP fixed point matches coordinate descent") {
    const auto spec = make_spec(Model::Diagonal, 100, 300, 0.5, 21);
    const auto t = gen_diagonal_target(spec);
    const auto data = gen_dataset(spec, t);
    const double lambda = 1.0;
    LassoOptions lo;
    lo.tol = 1e-13;
    const auto cd = solve_lasso(data, lambda, lo);
    const auto [est, trace] = gamp_lasso(data, lambda, {}, &t);
    CHECK(trace.converged);
    CHECK((est.theta_hat - cd.theta_hat).norm() / cd.theta_hat.norm() <= 1e-4);
    CHECK(est.kkt_residual <= 1e-6);
    // overlaps are recorded and stabilize
    const std::size_t k = trace.q.size();
    REQUIRE(k >= 4);
    CHECK(std::abs(trace.q[k - 1] - trace.q[k - 2]) <= 1e-6 * std::max(1.0, trace.q[k - 1]));
    // Onsager coupling a = (n/d)/(1+v) holds along the run
    for (std::size_t i = 0; i < k; ++i)
        CHECK(trace.onsager_a[i] == doctest::Approx(3.0 / (1.0 + trace.v[i])).epsilon(1e-10));
}

TEST_CASE("above the null threshold GAMP lands on zero") {
    const auto spec = make_spec(Model::Diagonal, 40, 80, 0.5, 22);
    const auto t = gen_diagonal_target(spec);
    const auto data = gen_dataset(spec, t);
    const Eigen::MatrixXd m = data.design / std::sqrt(40.0);
    const double thresh = (m.transpose() * data.labels).lpNorm<Eigen::Infinity>();
    const auto [est, trace] = gamp_lasso(data, thresh * 1.05);
    CHECK(trace.converged);
    CHECK(est.theta_hat.cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("spectral divergence sum vanishes when everything is thresholded") {
    Eigen::VectorXd evals(4);
    evals << 0.5, 1.0, 1.5, 1.9;
    CHECK(spectral_divergence_sum(evals, 2.0, 1.0) == 0.0);
    // degenerate pair takes the derivative limit
    Eigen::VectorXd ties(2);
    ties << 3.0, 3.0;
    CHECK(spectral_divergence_sum(ties, 2.0, 2.0) == doctest::Approx((2.0 / 2) * (2.0 / 2.0 + 0.5)));
}

TEST_CASE("matrix GAMP fixed point matches the convex solver") {
    const int d = 40;
    const auto spec = make_spec(Model::Quadratic, d, 4 * d * d, 0.5, 23);
    const auto t = gen_quadratic_target(spec);
    const auto data = gen_dataset(spec, t, MeasurementMode::GOEUniversal);
    const double lambda = 40.0;  // objective units
    MatrixSensingOptions mo;
    mo.tol = 1e-9;
    const auto convex = solve_matrix_sensing(data, lambda, mo);
    const auto [est, trace] = gamp_matrix(data, lambda, {}, &t);
    CHECK(trace.converged);
    const double risk_gap = std::abs(excess_risk(est.s_hat, t) - excess_risk(convex.s_hat, t));
    CHECK(risk_gap <= 1e-2 * excess_risk(convex.s_hat, t));
    CHECK(std::abs(est.objective - convex.objective) <= 1e-3 * convex.objective);
    // same KKT certificate as the convex path, looser tolerance
    CHECK(est.opt_residual <= 1e-3 * lambda);
}

TEST_CASE("huge lambda sends the matrix fixed point to zero") {
    const auto spec = make_spec(Model::Quadratic, 16, 400, 0.5, 24);
    const auto t = gen_quadratic_target(spec);
    const auto data = gen_dataset(spec, t);
    const Eigen::MatrixXd g0 = 2.0 * data.sensing->adjoint(data.labels);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g0, Eigen::EigenvaluesOnly);
    const auto [est, trace] = gamp_matrix(data, es.eigenvalues().maxCoeff() * 1.2);
    CHECK(est.s_hat.cwiseAbs().maxCoeff() <= 1e-9);
}
