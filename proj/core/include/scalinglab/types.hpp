#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace slab {

enum class Model { Diagonal, Quadratic };
enum class MeasurementMode { VectorGaussian, WishartCentered, GOEUniversal };

std::string to_string(Model m);
std::string to_string(MeasurementMode m);

/// Problem instance. `lambda` is the regularization in the units used by the
/// theory layer (state evolution, rates, spectra) for BOTH models. For the
/// diagonal model this is also the LASSO penalty as-is; for the quadratic
/// model the matrix-sensing objective carries lambda_objective = d * lambda
/// (see matrix_lambda()), because the weight-decay penalty maps onto the
/// trace norm with that scale.
struct ProblemSpec {
    Model model = Model::Diagonal;
    int d = 1;
    std::int64_t n = 1;
    double gamma = 1.0;
    double delta = 0.0;
    double lambda = 0.0;
    std::uint64_t seed = 0;

    void validate() const;
    double n_eff() const { return model == Model::Diagonal ? double(n) : double(n) / d; }
    double matrix_lambda() const { return lambda * d; }
};

/// Monte-Carlo controls for the state-evolution solvers.
struct MCConfig {
    int draws = 10;            // GOE draws per estimated quantity
    std::uint64_t seed = 1;    // draw stream seed (common random numbers)
    double tol = 1e-4;         // relative tolerance on (delta, eps)
    int max_outer = 200;
    int scan_points = 40;      // coarse bracketing grid of the outer root search
    int workers = 1;
};

struct SpecError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Thrown when an operation is asked outside its validity regime
/// (e.g. pruning with lambda*eps >= 2*delta, rates at Delta = 0).
struct RegimeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Numerical-quality failures (diverged iterations, unusable density estimates).
struct NumericsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace slab
