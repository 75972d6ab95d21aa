#include "scalinglab/lasso.hpp"

#include <cmath>
#include <vector>

namespace slab {

namespace {

double lasso_objective(const Eigen::VectorXd& r, const Eigen::VectorXd& theta, double lambda) {
    return 0.5 * r.squaredNorm() + lambda * theta.lpNorm<1>();
}

// Duality gap for 1/2||y - M theta||^2 + lambda ||theta||_1. The residual is a
// dual candidate after scaling into the feasible set ||M^T r||_inf <= lambda.
double duality_gap(const Eigen::MatrixXd& m, const Eigen::VectorXd& y, const Eigen::VectorXd& r,
                   const Eigen::VectorXd& theta, double lambda, const Eigen::VectorXd& corr) {
    const double primal = lasso_objective(r, theta, lambda);
    const double cmax = corr.lpNorm<Eigen::Infinity>();
    const double scale = (lambda > 0 && cmax > lambda) ? lambda / cmax : 1.0;
    // D(alpha) = -1/2||alpha||^2 + y^T alpha at alpha = scale * r
    const double dual = -0.5 * scale * scale * r.squaredNorm() + scale * y.dot(r);
    return primal - dual;
}

}  // namespace

VectorEstimate solve_lasso(const Dataset& data, double lambda, const LassoOptions& opts) {
    if (data.model != Model::Diagonal) throw SpecError("solve_lasso: diagonal dataset required");
    if (lambda < 0) throw SpecError("solve_lasso: lambda must be >= 0");
    const int d = data.d();
    const std::int64_t n = data.n();
    Eigen::MatrixXd m = data.design / std::sqrt(double(d));
    const Eigen::VectorXd& y = data.labels;
    Eigen::VectorXd col_sq = m.colwise().squaredNorm();

    Eigen::VectorXd theta = Eigen::VectorXd::Zero(d);
    Eigen::VectorXd r = y;

    VectorEstimate out;
    auto sweep_over = [&](const std::vector<int>& idx) {
        double max_delta = 0.0;
        for (int j : idx) {
            if (col_sq[j] <= 0) continue;
            const double rho = m.col(j).dot(r) + col_sq[j] * theta[j];
            const double nj = soft_threshold(rho, lambda) / col_sq[j];
            const double dj = nj - theta[j];
            if (dj != 0.0) {
                r -= m.col(j) * dj;
                theta[j] = nj;
                max_delta = std::max(max_delta, std::abs(dj));
            }
        }
        return max_delta;
    };

    std::vector<int> all(d);
    for (int j = 0; j < d; ++j) all[j] = j;

    int sweeps = 0;
    bool ok = false;
    while (sweeps < opts.max_sweeps) {
        sweep_over(all);
        ++sweeps;
        // inner passes on the current active set until stable
        std::vector<int> active;
        for (int j = 0; j < d; ++j)
            if (theta[j] != 0.0) active.push_back(j);
        while (sweeps < opts.max_sweeps) {
            const double delta = sweep_over(active);
            ++sweeps;
            if (delta < 1e-14) break;
        }
        Eigen::VectorXd corr = m.transpose() * r;
        const double gap = duality_gap(m, y, r, theta, lambda, corr);
        const double obj = lasso_objective(r, theta, lambda);
        if (gap <= opts.tol * std::max(1.0, obj)) {
            ok = true;
            break;
        }
    }

    Eigen::VectorXd corr = m.transpose() * r;
    double kkt = 0.0;
    for (int j = 0; j < d; ++j) {
        if (theta[j] != 0.0)
            kkt = std::max(kkt, std::abs(corr[j] - lambda * (theta[j] > 0 ? 1.0 : -1.0)));
        else
            kkt = std::max(kkt, std::max(std::abs(corr[j]) - lambda, 0.0));
    }

    out.theta_hat = std::move(theta);
    out.objective = lasso_objective(r, out.theta_hat, lambda);
    out.kkt_residual = kkt;
    out.iterations = sweeps;
    out.support_size = static_cast<int>((out.theta_hat.array() != 0.0).count());
    out.converged = ok;
    if (!ok && opts.throw_on_failure) throw NumericsError("solve_lasso: no convergence in max_sweeps");
    (void)n;
    return out;
}

VectorEstimate bayes_posterior_mean(const Dataset& data, const Eigen::VectorXd& lambda_diag,
                                    double delta) {
    if (data.model != Model::Diagonal) throw SpecError("bayes_posterior_mean: diagonal dataset required");
    if (!(delta > 0)) throw SpecError("bayes_posterior_mean: requires Delta > 0");
    const int d = data.d();
    if (lambda_diag.size() != d) throw SpecError("bayes_posterior_mean: lambda_diag size mismatch");
    const std::int64_t n = data.n();
    Eigen::MatrixXd v_inv = Eigen::MatrixXd::Zero(d, d);
    if (n > 0) v_inv = data.design.transpose() * data.design / (d * delta);
    v_inv.diagonal() += lambda_diag.cwiseInverse();
    Eigen::LLT<Eigen::MatrixXd> llt(v_inv);
    if (llt.info() != Eigen::Success) throw NumericsError("bayes_posterior_mean: posterior covariance not SPD");
    VectorEstimate out;
    if (n > 0) {
        Eigen::VectorXd xty = data.design.transpose() * data.labels / (std::sqrt(double(d)) * delta);
        out.theta_hat = llt.solve(xty);
    } else {
        out.theta_hat = Eigen::VectorXd::Zero(d);
    }
    Eigen::MatrixXd v = llt.solve(Eigen::MatrixXd::Identity(d, d));
    out.posterior_risk = v.trace() / d;
    out.objective = 0.0;
    out.support_size = d;
    out.converged = true;
    return out;
}

}  // namespace slab
