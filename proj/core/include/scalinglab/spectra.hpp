#pragma once

#include <string>
#include <vector>

#include "scalinglab/density.hpp"
#include "scalinglab/matrix_sensing.hpp"
#include "scalinglab/state_evolution.hpp"

namespace slab {

struct SpectrumPrediction {
    double zero_mass = 0.0;
    double bulk_edge = 0.0;                          // after the shift
    std::vector<std::pair<int, double>> spikes;      // (index, location after shift)
    double shift = 0.0;                              // lambda * eps
    Histogram sampled;                               // positive part
    std::vector<double> samples;                     // raw positive-part samples
};

enum class Regime { UnderRegularized, OverRegularized };

struct ErrorDecomposition {
    double overfitting = 0.0;
    double underfitting = 0.0;
    double approximation = 0.0;
    int cutoff_k = 0;
    Regime regime = Regime::UnderRegularized;
    double total() const { return overfitting + underfitting + approximation; }
};

struct SpectrumOptions {
    int bins = 200;
    int mc_samples_per_coord = 64;   // diagonal prediction: z draws per coordinate
    int mc_draws = 16;               // quadratic prediction: GOE draws
    std::uint64_t seed = 7;
    double grid_max = 0.0;           // 0: auto = 1.1 * max spike prediction
};

/// Distribution of |theta_hat| implied by the LASSO state evolution:
/// theta_hat_i ~ ST_{eps_d}(theta*_i + delta_d z), with eps_d = nu sqrt(2d/n)
/// and delta_d = sqrt(Dhat d/n), sampled per coordinate.
SpectrumPrediction predict_spectrum_diagonal(const DiagSEOutput& se, const DiagonalTarget& target,
                                             const ProblemSpec& spec,
                                             const SpectrumOptions& opts = {});

/// Spectrum of the trained quadratic network: eigenvalues of S* + delta Z
/// shifted left by lambda*eps and clamped into the zero atom; spike locations
/// s_i + delta^2/s_i - lambda*eps for s_i > delta; bulk edge 2 delta - lambda*eps.
SpectrumPrediction predict_spectrum_quadratic(const QuadSEOutput& se, const QuadraticTarget& target,
                                              const ProblemSpec& spec,
                                              const SpectrumOptions& opts = {});

/// Eigenvalues (quadratic) or |theta_hat| values (diagonal) binned on the same
/// grid convention as the predictions; zero atom below 1e-9.
Histogram empirical_spectrum(const Eigen::VectorXd& values, double grid_max, int bins = 200);

/// Risk split into overfitting / underfitting / approximation terms from the
/// converged SE constants (in the same units as QuadSEOutput::risk). The
/// under-regularized branch applies for lambda*eps < 2 delta.
ErrorDecomposition decompose_error(const QuadSEOutput& se, const QuadraticTarget& target,
                                   const ProblemSpec& spec);

/// KS distance between positive parts (conditional on non-zero) of a predicted
/// sample set and empirical values.
double spectrum_ks(const SpectrumPrediction& pred, const Eigen::VectorXd& empirical_values,
                   double zero_atol = 1e-9);

/// CSV (bin_left, bin_right, mass) plus a JSON sidecar with zero_mass, spikes, edges.
void write_spectrum_csv(const std::string& path, const Histogram& h);
void write_spectrum_sidecar(const std::string& path, const SpectrumPrediction& pred);

}  // namespace slab
