#pragma once

#include <utility>
#include <vector>

#include "scalinglab/lasso.hpp"
#include "scalinglab/matrix_sensing.hpp"

namespace slab {

/// Per-iteration overlap record of a GAMP run. m needs the teacher and is NaN
/// when none was supplied.
struct GampTrace {
    std::vector<double> m;        // <est, target>/d
    std::vector<double> q;        // ||est||^2/d
    std::vector<double> v;        // denoiser divergence (Onsager v_t)
    std::vector<double> onsager_a;
    bool converged = false;
    bool diverged = false;
    int iterations = 0;
};

struct GampOptions {
    double damping = 0.7;      // on both field updates; halved on oscillation
    int max_iter = 3000;
    double tol = 1e-11;        // relative fixed-point residual
    double q_divergence = 1e12;
};

/// GAMP for the LASSO objective of solve_lasso. Channel g(w,y,v) = (y-w)/(1+v),
/// input denoiser f(b,a) = ST_lambda(b)/a, Onsager a_t = (n/d)/(1+v_t) and
/// v_t = |support|/(d a). Fixed points coincide with the coordinate-descent
/// minimizer.
std::pair<VectorEstimate, GampTrace> gamp_lasso(const Dataset& data, double lambda,
                                                const GampOptions& opts = {},
                                                const DiagonalTarget* target = nullptr);

/// Matrix GAMP with the spectral input denoiser. `lambda` is the matrix-sensing
/// objective coefficient (as in solve_matrix_sensing); in the network-normalized
/// field the spectral threshold is 2*lambda/d. Fixed points coincide with the
/// proximal-gradient minimizer.
std::pair<MatrixEstimate, GampTrace> gamp_matrix(const Dataset& data, double lambda,
                                                 const GampOptions& opts = {},
                                                 const QuadraticTarget* target = nullptr);

/// Eigenvalue map of the spectral denoiser: nu -> max(nu - thresh, 0)/sigma_hat.
Eigen::VectorXd spectral_denoise(const Eigen::VectorXd& evals, double thresh, double sigma_hat);

/// Divergence sum of the spectral denoiser,
///   (2/d) [ sum_i Theta(nu_i - thresh)/sigma_hat
///           + sum_{i<j} (nu~_i - nu~_j)/(nu_i - nu_j) ],
/// with nu~ the denoised eigenvalues. Near-degenerate pairs (|nu_i - nu_j| <
/// 1e-12) use the derivative limit Theta(nu_i - thresh)/sigma_hat.
double spectral_divergence_sum(const Eigen::VectorXd& evals, double thresh, double sigma_hat);

/// Spectral KKT residual of the matrix-sensing objective at s (shared by the
/// convex solver and the GAMP fixed point).
double matrix_opt_residual(const SensingOperator& a, const Eigen::VectorXd& y,
                           const Eigen::MatrixXd& s, double lambda);

/// KKT residual of the LASSO objective at theta.
double lasso_kkt_residual(const Dataset& data, const Eigen::VectorXd& theta, double lambda);

}  // namespace slab
