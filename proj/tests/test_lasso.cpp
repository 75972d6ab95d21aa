#include <doctest.h>

#include <cmath>

#include "scalinglab/lasso.hpp"

using namespace slab;

namespace {

ProblemSpec diag_spec(int d, std::int64_t n, double delta, std::uint64_t seed) {
    ProblemSpec s;
    s.model = Model::Diagonal;
    s.d = d;
    s.n = n;
    s.gamma = 1.0;
    s.delta = delta;
    s.seed = seed;
    return s;
}

// Independent proximal-gradient oracle with a conservative fixed step: shares
// no code path with the coordinate-descent solver.
double prox_grad_objective(const Dataset& data, double lambda, int iters) {
    const int d = data.d();
    const Eigen::MatrixXd m = data.design / std::sqrt(double(d));
    const Eigen::VectorXd& y = data.labels;
    // crude operator-norm bound for the step size
    double lip = (m.transpose() * m).cwiseAbs().rowwise().sum().maxCoeff();
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(d);
    for (int k = 0; k < iters; ++k) {
        const Eigen::VectorXd grad = m.transpose() * (m * theta - y);
        const Eigen::VectorXd z = theta - grad / lip;
        for (int j = 0; j < d; ++j) theta[j] = soft_threshold(z[j], lambda / lip);
    }
    return 0.5 * (y - m * theta).squaredNorm() + lambda * theta.lpNorm<1>();
}

}  // namespace

TEST_CASE("soft threshold basics") {
    CHECK(soft_threshold(3.0, 1.0) == 2.0);
    CHECK(soft_threshold(-0.5, 1.0) == 0.0);
    CHECK(soft_threshold(-2.5, 1.0) == -1.5);
}

TEST_CASE("lambda = 0 with full-rank design reduces to least squares") {
    const auto spec = diag_spec(10, 40, 0.3, 1);
    const auto t = gen_diagonal_target(spec);
    const auto data = gen_dataset(spec, t);
    const auto est = solve_lasso(data, 0.0);
    const Eigen::MatrixXd m = data.design / std::sqrt(10.0);
    const Eigen::VectorXd r = data.labels - m * est.theta_hat;
    CHECK((m.transpose() * r).lpNorm<Eigen::Infinity>() <= 1e-8);
}

TEST_CASE("lambda above the null threshold yields the zero vector") {
    const auto spec = diag_spec(12, 30, 0.5, 2);
    const auto t = gen_diagonal_target(spec);
    const auto data = gen_dataset(spec, t);
    const Eigen::MatrixXd m = data.design / std::sqrt(12.0);
    const double thresh = (m.transpose() * data.labels).lpNorm<Eigen::Infinity>();
    const auto est = solve_lasso(data, thresh * 1.0001);
    CHECK(est.theta_hat.cwiseAbs().maxCoeff() == 0.0);
    CHECK(est.support_size == 0);
}

TEST_CASE("objective matches an independent first-order oracle") {
    const auto spec = diag_spec(8, 12, 0.4, 0);
    const auto t = gen_diagonal_target(spec);
    const auto data = gen_dataset(spec, t);
    const double lambda = 0.7;
    const auto est = solve_lasso(data, lambda);
    const double oracle = prox_grad_objective(data, lambda, 200000);
    CHECK(est.objective == doctest::Approx(oracle).epsilon(1e-6));
    CHECK(est.objective <= oracle + 1e-9);
}

TEST_CASE("KKT certificate holds at the solution") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto spec = diag_spec(30, 60, 0.5, 100 + seed);
        const auto t = gen_diagonal_target(spec);
        const auto data = gen_dataset(spec, t);
        const auto est = solve_lasso(data, 0.8);
        CHECK(est.converged);
        CHECK(est.kkt_residual <= 1e-8);
    }
}

TEST_CASE("positive homogeneity: scaling y and lambda scales the solution") {
    const auto spec = diag_spec(20, 35, 0.5, 7);
    const auto t = gen_diagonal_target(spec);
    auto data = gen_dataset(spec, t);
    const double lambda = 0.5, c = 3.7;
    const auto base = solve_lasso(data, lambda);
    data.labels *= c;
    const auto scaled = solve_lasso(data, c * lambda);
    CHECK((scaled.theta_hat - c * base.theta_hat).lpNorm<Eigen::Infinity>() <= 1e-7);
}

TEST_CASE("support is stable under re-solving from the solution") {
    const auto spec = diag_spec(25, 50, 0.5, 13);
    const auto t = gen_diagonal_target(spec);
    const auto data = gen_dataset(spec, t);
    const auto est = solve_lasso(data, 0.6);
    // one manual coordinate pass starting from the solution must not move it
    const Eigen::MatrixXd m = data.design / std::sqrt(25.0);
    const Eigen::VectorXd r = data.labels - m * est.theta_hat;
    for (int j = 0; j < 25; ++j) {
        const double csq = m.col(j).squaredNorm();
        const double rho = m.col(j).dot(r) + csq * est.theta_hat[j];
        CHECK(std::abs(soft_threshold(rho, 0.6) / csq - est.theta_hat[j]) <= 1e-8);
    }
}

TEST_CASE("objective is nonincreasing in the sweep budget") {
    const auto spec = diag_spec(40, 30, 0.5, 19);
    const auto t = gen_diagonal_target(spec);
    const auto data = gen_dataset(spec, t);
    double prev = std::numeric_limits<double>::infinity();
    for (int sweeps : {1, 2, 4, 8, 32}) {
        LassoOptions o;
        o.max_sweeps = sweeps;
        o.tol = 0.0;
        const double obj = solve_lasso(data, 0.4, o).objective;
        CHECK(obj <= prev + 1e-12);
        prev = obj;
    }
}
