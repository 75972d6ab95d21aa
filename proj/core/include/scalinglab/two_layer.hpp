#pragma once

#include <optional>

#include <Eigen/Dense>

#include "scalinglab/lasso.hpp"
#include "scalinglab/matrix_sensing.hpp"

namespace slab {

struct TwoLayerOptions {
    int max_iter = 50000;
    double grad_tol = 1e-10;      // on the gradient norm, relative to scale
    double init_std = 1e-2;
    std::uint64_t init_seed = 0;
    int restarts = 1;
    std::optional<Eigen::VectorXd> init_theta;   // diagonal: start at its canonical factorization
    std::optional<Eigen::MatrixXd> init_w;       // quadratic: explicit W start
};

/// Two-layer diagonal-network ERM in (u, w): full-batch gradient descent with
/// backtracking line search on
///   1/2 ||y - X~ (u .* w)||^2 + lambda/2 (||u||^2 + ||w||^2),
/// X~ = X/sqrt(d). Returns theta_hat = u .* w. A validation tool for small d;
/// at the optimum the objective matches the LASSO value.
VectorEstimate diagonal_net_erm(const Dataset& data, double lambda,
                                const TwoLayerOptions& opts = {});

/// Quadratic-network ERM on W (p x d), all-ones second layer:
///   sum_mu (y_mu - Tr[S(W) Z_mu])^2 + lambda Tr S(W),   S(W) = W^T W / sqrt(p d).
/// `lambda` is the matrix-sensing objective coefficient; the equivalent weight
/// decay on W is lambda/sqrt(p d). Requires p >= d so every local minimum is global.
MatrixEstimate quadratic_net_erm(const Dataset& data, double lambda, int p,
                                 const TwoLayerOptions& opts = {});

}  // namespace slab
