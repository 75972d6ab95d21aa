#include <doctest.h>

#include "scalinglab/two_layer.hpp"

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

}  // namespace

TEST_CASE("diagonal two-layer ERM reaches the LASSO objective") {
    const auto spec = make_spec(Model::Diagonal, 10, 20, 0.5, 42);
    const auto t = gen_diagonal_target(spec);
    const auto data = gen_dataset(spec, t);
    const double lambda = 0.5;
    const auto lasso = solve_lasso(data, lambda);
    TwoLayerOptions o;
    o.restarts = 4;
    const auto net = diagonal_net_erm(data, lambda, o);
    CHECK(std::abs(net.objective - lasso.objective) <= 1e-4);
    CHECK(net.objective >= lasso.objective - 1e-9);  // LASSO value is the global floor
}

TEST_CASE("lambda = 0 reduces both paths to unregularized least squares") {
    const auto spec = make_spec(Model::Diagonal, 8, 24, 0.3, 5);
    const auto t = gen_diagonal_target(spec);
    const auto data = gen_dataset(spec, t);
    const auto lasso = solve_lasso(data, 0.0);
    TwoLayerOptions o;
    o.restarts = 3;
    o.init_std = 0.3;  // away from the saddle at the origin
    const auto net = diagonal_net_erm(data, 0.0, o);
    CHECK(std::abs(net.objective - lasso.objective) <= 1e-5 * std::max(1.0, lasso.objective));
}

TEST_CASE("canonical factorization of the LASSO optimum is already optimal") {
    const auto spec = make_spec(Model::Diagonal, 12, 30, 0.5, 7);
    const auto t = gen_diagonal_target(spec);
    const auto data = gen_dataset(spec, t);
    const double lambda = 0.8;
    const auto lasso = solve_lasso(data, lambda);
    TwoLayerOptions o;
    o.init_theta = lasso.theta_hat;
    const auto net = diagonal_net_erm(data, lambda, o);
    CHECK(std::abs(net.objective - lasso.objective) <= 1e-8 * std::max(1.0, lasso.objective));
}

TEST_CASE("quadratic network ERM matches trace-regularized sensing") {
    const auto spec = make_spec(Model::Quadratic, 16, 600, 0.5, 11);
    const auto t = gen_quadratic_target(spec);
    const auto data = gen_dataset(spec, t);
    const double lambda = 0.5;
    MatrixSensingOptions mo;
    mo.tol = 1e-9;
    const auto convex = solve_matrix_sensing(data, lambda, mo);
    TwoLayerOptions o;
    o.restarts = 2;
    o.init_std = 0.15;
    o.max_iter = 200000;
    const auto net = quadratic_net_erm(data, lambda, 32, o);
    CHECK(std::abs(net.objective - convex.objective) <= 1e-3 * convex.objective);
    CHECK(net.objective >= convex.objective - 1e-8);
}

TEST_CASE("noiseless identifiable limit recovers the teacher") {
    const int d = 16;
    const auto spec = make_spec(Model::Quadratic, d, 5 * d * d, 0.0, 13);
    const auto t = gen_quadratic_target(spec);
    const auto data = gen_dataset(spec, t);
    MatrixSensingOptions mo;
    mo.tol = 1e-9;
    const auto convex = solve_matrix_sensing(data, 1e-9, mo);
    CHECK(excess_risk(convex.s_hat, t) <= 1e-3);
    TwoLayerOptions o;
    o.init_std = 0.3;
    o.max_iter = 300000;
    const auto net = quadratic_net_erm(data, 1e-9, 2 * d, o);
    CHECK(excess_risk(net.s_hat, t) <= 1e-3);
}

TEST_CASE("factorized convex optimum is a stationary start") {
    const auto spec = make_spec(Model::Quadratic, 12, 400, 0.5, 17);
    const auto t = gen_quadratic_target(spec);
    const auto data = gen_dataset(spec, t);
    const double lambda = 1.0;
    MatrixSensingOptions mo;
    mo.tol = 1e-10;
    const auto convex = solve_matrix_sensing(data, lambda, mo);
    const int p = 24;
    // W = sqrt((p d)^(1/2)) * sqrt(S) padded to p rows: S(W) reproduces s_hat
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(convex.s_hat);
    Eigen::MatrixXd root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
                           es.eigenvectors().transpose();
    Eigen::MatrixXd w0 = Eigen::MatrixXd::Zero(p, 12);
    w0.topRows(12) = std::pow(double(p) * 12.0, 0.25) * root;
    TwoLayerOptions o;
    o.init_w = w0;
    const auto net = quadratic_net_erm(data, lambda, p, o);
    CHECK(std::abs(net.objective - convex.objective) <= 1e-6 * std::max(1.0, convex.objective));
}
