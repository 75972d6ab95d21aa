#pragma once

#include <Eigen/Dense>

#include "scalinglab/model.hpp"

namespace slab {

struct MatrixEstimate {
    Eigen::MatrixXd s_hat;       // symmetric PSD
    Eigen::VectorXd eigvals_hat; // nonincreasing
    double objective = 0.0;
    double opt_residual = 0.0;
    int iterations = 0;
    int rank = 0;
    bool converged = true;
};

/// argmin over PSD S of tau Tr S + 1/2 ||S - m||_F^2: eigenvalues of m shifted
/// down by tau and clipped at zero, eigenvectors kept.
Eigen::MatrixXd psd_nuclear_prox(const Eigen::MatrixXd& m, double tau);

struct MatrixSensingOptions {
    double tol = 1e-8;       // optimality residual target (spectral KKT)
    int max_iter = 20000;
    int check_every = 25;    // certificate evaluation cadence
    Eigen::MatrixXd warm_start;
};

/// minimize over PSD S: sum_mu (y_mu - Tr[S Z_mu])^2 + lambda ||S||_*
/// by accelerated proximal gradient with monotone restarts. `lambda` here is
/// the coefficient in this objective (theory-layer specs carry lambda/d, see
/// ProblemSpec::matrix_lambda). The optimality residual is spectral: with
/// G = 2 A^T(y - A(S)), range(S) directions must satisfy v^T G v = lambda and
/// the top eigenvalue of G must not exceed lambda.
MatrixEstimate solve_matrix_sensing(const Dataset& data, double lambda,
                                    const MatrixSensingOptions& opts = {});

/// Post-hoc spectral pruning: eigenvalues nu -> max(nu - (2 delta_se - lambda*eps_se), 0).
/// Requires the under-regularized regime lambda*eps_se < 2 delta_se.
MatrixEstimate prune(const MatrixEstimate& estimate, double delta_se, double eps_se, double lambda);

}  // namespace slab
