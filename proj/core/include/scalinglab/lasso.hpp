#pragma once

#include <limits>

#include <Eigen/Dense>

#include "scalinglab/model.hpp"

namespace slab {

struct VectorEstimate {
    Eigen::VectorXd theta_hat;
    double objective = 0.0;
    double kkt_residual = 0.0;
    int iterations = 0;
    int support_size = 0;
    bool converged = true;
    double posterior_risk = std::numeric_limits<double>::quiet_NaN();  // bayes only
};

/// Soft thresholding max(x-a,0) - max(-x-a,0), the prox of a|.|.
inline double soft_threshold(double x, double a) {
    const double up = x - a > 0 ? x - a : 0.0;
    const double dn = -x - a > 0 ? -x - a : 0.0;
    return up - dn;
}

struct LassoOptions {
    double tol = 1e-10;      // relative duality gap
    int max_sweeps = 100000;
    bool throw_on_failure = false;
};

/// minimize 1/2 sum_mu (y_mu - <x_mu, theta>/sqrt(d))^2 + lambda ||theta||_1
/// by cyclic coordinate descent with active-set passes. The 1/sqrt(d) design
/// scaling is folded into the columns once at setup. On success the KKT
/// certificate holds: |(X~^T r)_j| <= lambda + tol off-support and
/// (X~^T r)_j = lambda sign(theta_j) +- tol on-support.
VectorEstimate solve_lasso(const Dataset& data, double lambda, const LassoOptions& opts = {});

/// Exact Gaussian posterior mean theta_hat = V X^T y/(sqrt(d) Delta) with
/// V = (Lambda^{-1} + X^T X/(d Delta))^{-1}; posterior_risk = Tr V / d.
VectorEstimate bayes_posterior_mean(const Dataset& data, const Eigen::VectorXd& lambda_diag,
                                    double delta);

}  // namespace slab
