#pragma once

#include <map>
#include <string>

#include "scalinglab/types.hpp"

namespace slab {

enum class Phase { Ia, Ib, II, III, IV, V, VIa, VIb, InterpolationPeak, Boundary };

std::string to_string(Phase p);

struct PhaseReport {
    Phase phase = Phase::Boundary;
    double n_eff = 0.0;
    std::map<std::string, double> rate_exponents;  // keys: "n_eff", "d", "lambda"
    double predicted_risk = 0.0;                   // NaN when only the order is known
    std::string constant_source;                   // "closed-form:<phase>" or "order-only"
    std::string rate_formula;                      // human-readable rate
};

/// Asymptotic-condition policy: "a << b" holds when a <= b/8; inside the buffer
/// the classifier returns Boundary.
constexpr double kAsymptoticFactor = 8.0;

/// Phase of the excess-risk rate table for Delta > 0. Throws RegimeError at
/// Delta = 0 (the noiseless rates are a different table).
PhaseReport classify(const ProblemSpec& spec);

/// Sample-size scale where the risk decay crosses from the fast phase-IV decay
/// into the noise-dominated phase V: (log d)^((4g-1)/(2g-1)) for the diagonal
/// model, d^(4g/(14g-5)) for the quadratic one.
double n_cross(const ProblemSpec& spec);

struct LambdaOpt {
    double value = 0.0;           // sqrt(n_eff/d)
    bool up_to_logs = false;      // true in the n_cross << n_eff << d^(2 gamma) branch
};
LambdaOpt lambda_opt(const ProblemSpec& spec);

/// Bayes-optimal rate branch.
PhaseReport bo_rate(const ProblemSpec& spec);

/// Diagonal phase-IV/V rate with its logarithmic factors,
/// (n/log(d/n))^(-1+1/(2 gamma)) + Delta/log(d/n); the clean power-law form is
/// rate_exponents in the PhaseReport.
double diagonal_log_corrected_rate(const ProblemSpec& spec);

}  // namespace slab
