#pragma once

#include <Eigen/Dense>

#include "scalinglab/model.hpp"

namespace slab {

struct DiagSEOutput {
    double nu = 0.0;
    double delta_hat = 0.0;  // Delta + R
    double risk = 0.0;
    double residual = 0.0;
    int iterations = 0;
    bool converged = false;
};

struct BayesSEOutput {
    double q_hat = 0.0;
    double risk = 0.0;
    double residual = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Quadratic-model ERM state evolution output. `risk` is in the SE/network
/// units R = 2(n/d^2) delta^2 - Delta/2, which measure ||S_hat - S*||_F^2/d;
/// the population excess risk of excess_risk() is exactly twice this (see
/// excess_risk_units()).
struct QuadSEOutput {
    double delta = 0.0;
    double eps = 0.0;
    double risk = 0.0;
    double mc_stderr = 0.0;
    int iterations = 0;
    bool converged = false;
    double excess_risk_units() const { return 2.0 * risk; }
};

/// LASSO state evolution: solves the coupled (nu, R) system
///   (lambda/nu) sqrt(n/2d) + (1/d) sum_i erfc(nu / sqrt((n/d)Lambda_i + Dhat)) = n/d
///   R = (1/n) sum_i [ (n/d)Lambda_i erf(.) + (Dhat + 2 nu^2) erfc(.) ]
///       - (2 nu)/(n sqrt(pi)) sum_i sqrt((n/d)Lambda_i + Dhat) exp(-nu^2/(.))
/// with Dhat = Delta + R, by damped outer iteration on R and bisection on nu.
/// For lambda = 0 and n >= d no positive nu exists and a RegimeError is thrown.
DiagSEOutput se_lasso(const ProblemSpec& spec, const Eigen::VectorXd& lambda_diag);

/// Convenience overload with the power-law Lambda_i = d i^(-2 gamma).
DiagSEOutput se_lasso(const ProblemSpec& spec);

/// Diagonal Bayes-optimal risk: R = (1/d) sum 1/(Lambda_i^{-1} + q_hat/d),
/// q_hat = n/(Delta + R), solved by bisection on R in [0, Tr Lambda / d].
BayesSEOutput se_bayes_diagonal(const ProblemSpec& spec, const Eigen::VectorXd& lambda_diag);
BayesSEOutput se_bayes_diagonal(const ProblemSpec& spec);

/// Quadratic-model ERM state evolution in (delta, eps):
///   4 (n/d^2) delta - delta/eps = d_1 J(delta, lambda*eps)
///   Q* + Delta/2 + 2 (n/d^2) delta^2 - delta^2/eps = (1 - lambda*eps d_2) J
/// with J(a,b) = E (1/d) sum ReLU(nu_i - b)^2 over the spectrum of S* + a Z,
/// estimated by Monte Carlo with common random numbers. Solved by nested
/// deterministic bisection: inner on eps (first equation, monotone), outer on
/// delta scanning downward from the trivial large-lambda solution so the
/// physically connected branch is selected.
QuadSEOutput se_quadratic_erm(const ProblemSpec& spec, const QuadraticTarget& target,
                              const MCConfig& mc = {});

/// Quadratic-model Bayes-optimal SE: scalar fixed point on q with
///   q_hat = (4n/d^2)/(Delta + 2(Q* - q)),
///   1 - 2 n/d^2 + Delta q_hat/2 = (4 pi^2 / 3 q_hat) int mu_{1/sqrt(q_hat)}^3.
/// The cubic spectral integral is estimated by the KDE pipeline on pooled
/// eigenvalues of sqrt(q_hat) S* + Z and divided by a calibration factor
/// measured on pure GOE at matched size (the raw KDE has a smoothing bias of
/// order -2% that would otherwise swamp the equation at small n/d^2).
/// risk = Q* - q, in the same ||.||_F^2/d units as QuadSEOutput.
BayesSEOutput se_quadratic_bayes(const ProblemSpec& spec, const QuadraticTarget& target,
                                 const MCConfig& mc = {});

/// Per-draw J estimator pieces at one (delta, b) point (exposed for tests):
/// J = (1/d) sum ReLU(nu_i - b)^2, d1J via eigenvalue perturbation
/// (2/d) sum_{nu_i > b} (nu_i - b) v_i^T Z v_i, d2J = -(2/d) sum ReLU(nu_i - b).
struct JEstimate {
    double j = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
};
JEstimate estimate_j(const Eigen::VectorXd& target_eigs, double delta, double b, int draws,
                     std::uint64_t seed, bool finite_difference_d1 = false);

}  // namespace slab
