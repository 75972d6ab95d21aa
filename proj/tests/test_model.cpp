#include <doctest.h>

#include <cmath>

#include "scalinglab/model.hpp"

using namespace slab;

namespace {

ProblemSpec diag_spec(int d, std::int64_t n, double gamma = 1.0, double delta = 0.0,
                      std::uint64_t seed = 0) {
    ProblemSpec s;
    s.model = Model::Diagonal;
    s.d = d;
    s.n = n;
    s.gamma = gamma;
    s.delta = delta;
    s.seed = seed;
    return s;
}

ProblemSpec quad_spec(int d, std::int64_t n, double gamma = 1.0, double delta = 0.0,
                      std::uint64_t seed = 0) {
    ProblemSpec s = diag_spec(d, n, gamma, delta, seed);
    s.model = Model::Quadratic;
    return s;
}

}  // namespace

TEST_CASE("power-law variances: gamma=1, d=4 gives (4, 1, 4/9, 1/4)") {
    const Eigen::VectorXd lam = power_law_variances(4, 1.0);
    CHECK(lam[0] == doctest::Approx(4.0));
    CHECK(lam[1] == doctest::Approx(1.0));
    CHECK(lam[2] == doctest::Approx(4.0 / 9.0));
    CHECK(lam[3] == doctest::Approx(0.25));
}

TEST_CASE("diagonal target is deterministic in the seed") {
    const auto spec = diag_spec(64, 10, 0.8, 0.0, 123);
    const auto a = gen_diagonal_target(spec);
    const auto b = gen_diagonal_target(spec);
    CHECK((a.theta_star - b.theta_star).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("theta* variances concentrate on Lambda (chi-square check)") {
    const auto spec = diag_spec(1000, 10, 1.0, 0.0, 5);
    const auto t = gen_diagonal_target(spec);
    const double ratio = (t.theta_star.array().square() / t.lambda_diag.array()).mean();
    CHECK(ratio > 0.9);
    CHECK(ratio < 1.1);
}

TEST_CASE("gamma <= 1/2 is rejected") {
    auto spec = diag_spec(10, 10, 0.5);
    CHECK_THROWS_AS(gen_diagonal_target(spec), SpecError);
}

TEST_CASE("quadratic target spectrum and basis") {
    const auto spec = quad_spec(3, 10, 1.0, 0.0, 9);
    const auto t = gen_quadratic_target(spec);
    const double r3 = std::sqrt(3.0);
    CHECK(t.eigvals[0] == doctest::Approx(r3));
    CHECK(t.eigvals[1] == doctest::Approx(r3 / 4.0));
    CHECK(t.eigvals[2] == doctest::Approx(r3 / 9.0));
    const Eigen::MatrixXd gram = t.basis.transpose() * t.basis - Eigen::MatrixXd::Identity(3, 3);
    CHECK(gram.cwiseAbs().maxCoeff() <= 1e-10);
    // constructed spectrum is exact
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t.s_star);
    CHECK((es.eigenvalues().reverse() - t.eigvals).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("Q* approaches zeta(2 gamma)") {
    CHECK(q_star(200000, 1.0) == doctest::Approx(M_PI * M_PI / 6.0).epsilon(1e-4));
}

TEST_CASE("GOE sampler matches the variance convention") {
    Rng rng(3, "goe_test");
    const int d = 16, reps = 700;  // ~1e4 offdiag draws per cell group
    double off_acc = 0, dia_acc = 0;
    std::int64_t off_n = 0, dia_n = 0;
    for (int r = 0; r < reps; ++r) {
        const Eigen::MatrixXd z = sample_goe(d, rng);
        for (int i = 0; i < d; ++i) {
            dia_acc += z(i, i) * z(i, i);
            ++dia_n;
            for (int j = i + 1; j < d; ++j) {
                off_acc += z(i, j) * z(i, j);
                ++off_n;
                CHECK(z(i, j) == z(j, i));
            }
        }
    }
    CHECK(off_acc / off_n == doctest::Approx(1.0 / d).epsilon(0.05));
    CHECK(dia_acc / dia_n == doctest::Approx(2.0 / d).epsilon(0.05));
}

TEST_CASE("noiseless labels vanish for a zero target") {
    auto spec = diag_spec(8, 20, 1.0, 0.0, 2);
    auto t = gen_diagonal_target(spec);
    t.theta_star.setZero();
    const auto data = gen_dataset(spec, t);
    CHECK(data.labels.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("diagonal label variance matches ||theta*||^2/d") {
    const auto spec = diag_spec(400, 20000, 1.0, 0.0, 11);
    const auto t = gen_diagonal_target(spec);
    const auto data = gen_dataset(spec, t);
    const double var = data.labels.squaredNorm() / data.labels.size();
    const double expected = t.theta_star.squaredNorm() / spec.d;
    CHECK(var == doctest::Approx(expected).epsilon(0.05));
}

TEST_CASE("centered quadratic measurements: variance identity and dataset variance") {
    // oracle first: Var(Tr[A(xx^T - I)]/sqrt(d)) = 2||A||_F^2/d for symmetric A
    const int d = 20;
    Rng rng(17, "var_oracle");
    Eigen::MatrixXd a = rng.normal_matrix(d, d);
    a = 0.5 * (a + a.transpose().eval());
    const std::int64_t m = 200000;
    double acc = 0.0;
    for (std::int64_t k = 0; k < m; ++k) {
        const Eigen::VectorXd x = rng.normal_vector(d);
        const double v = (x.dot(a * x) - a.trace()) / std::sqrt(double(d));
        acc += v * v;
    }
    const double oracle = acc / m;
    CHECK(oracle == doctest::Approx(2.0 * a.squaredNorm() / d).epsilon(0.03));

    // generator obeys it at d=200: Var(y) ~ 2 Q*
    const auto spec = quad_spec(200, 4000, 1.0, 0.0, 3);
    const auto t = gen_quadratic_target(spec);
    const auto data = gen_dataset(spec, t);
    const double var = data.labels.squaredNorm() / data.labels.size();
    CHECK(var == doctest::Approx(2.0 * q_star(200, 1.0)).epsilon(0.10));
}

TEST_CASE("GOE measurement mode agrees with the same variance scale") {
    const auto spec = quad_spec(60, 4000, 1.0, 0.0, 4);
    const auto t = gen_quadratic_target(spec);
    const auto data = gen_dataset(spec, t, MeasurementMode::GOEUniversal);
    const double var = data.labels.squaredNorm() / data.labels.size();
    CHECK(var == doctest::Approx(2.0 * q_star(60, 1.0)).epsilon(0.12));
}

TEST_CASE("GOE mode is invalid for the diagonal model") {
    auto spec = diag_spec(8, 4);
    auto t = gen_diagonal_target(spec);
    spec.model = Model::Quadratic;  // mismatched target
    CHECK_THROWS_AS(gen_dataset(spec, t), SpecError);
}

TEST_CASE("excess risk: definition and symmetry") {
    const auto spec = diag_spec(4, 4, 1.0, 0.0, 8);
    const auto t = gen_diagonal_target(spec);
    CHECK(excess_risk(t.theta_star, t) == 0.0);
    CHECK(excess_risk(Eigen::VectorXd::Zero(4), t) ==
          doctest::Approx(t.theta_star.squaredNorm() / 4.0));
    CHECK_THROWS_AS(excess_risk(Eigen::VectorXd::Zero(5), t), SpecError);
}

TEST_CASE("quadratic excess-risk prefactor 2 matches the Monte-Carlo oracle") {
    const int d = 50;
    const auto spec = quad_spec(d, 10, 1.0, 0.0, 21);
    const auto t = gen_quadratic_target(spec);
    Rng rng(901, "risk_probe");
    Eigen::MatrixXd s_hat = t.s_star;
    Eigen::MatrixXd bump = rng.normal_matrix(d, d);
    s_hat += 0.3 * (bump + bump.transpose());
    // Monte-Carlo of the population predictive gap over Gaussian probes
    const std::int64_t m = 1000000;
    const Eigen::MatrixXd delta_s = s_hat - t.s_star;
    double acc = 0.0;
    for (std::int64_t k = 0; k < m; ++k) {
        const Eigen::VectorXd x = rng.normal_vector(d);
        const double v = (x.dot(delta_s * x) - delta_s.trace()) / std::sqrt(double(d));
        acc += v * v;
    }
    CHECK(acc / m == doctest::Approx(excess_risk(s_hat, t)).epsilon(0.02));
}
