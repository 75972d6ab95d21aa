#include "scalinglab/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "scalinglab/lasso.hpp"
#include "scalinglab/rng.hpp"

namespace slab {

namespace {

double auto_grid_max(const std::vector<double>& samples, const std::vector<std::pair<int, double>>& spikes,
                     double requested) {
    if (requested > 0) return requested;
    double m = 0.0;
    for (const auto& [i, loc] : spikes) m = std::max(m, loc);
    for (double s : samples) m = std::max(m, s);
    return m > 0 ? 1.1 * m : 1.0;
}

}  // namespace

SpectrumPrediction predict_spectrum_diagonal(const DiagSEOutput& se, const DiagonalTarget& target,
                                             const ProblemSpec& spec, const SpectrumOptions& opts) {
    const int d = static_cast<int>(target.theta_star.size());
    const double eps_d = se.nu * std::sqrt(2.0 * d / double(spec.n));
    const double delta_d = std::sqrt(se.delta_hat * d / double(spec.n));

    SpectrumPrediction out;
    out.shift = eps_d;
    out.bulk_edge = 0.0;  // the diagonal bulk has no sharp edge; kept at 0
    Rng rng(opts.seed, "diag_spectrum");
    out.samples.reserve(std::size_t(d) * opts.mc_samples_per_coord);
    std::int64_t zeros = 0;
    for (int rep = 0; rep < opts.mc_samples_per_coord; ++rep) {
        for (int i = 0; i < d; ++i) {
            const double v = soft_threshold(target.theta_star[i] + delta_d * rng.normal(), eps_d);
            if (v == 0.0)
                ++zeros;
            else
                out.samples.push_back(std::abs(v));
        }
    }
    const std::int64_t total = std::int64_t(d) * opts.mc_samples_per_coord;
    out.zero_mass = double(zeros) / double(total);
    const double gmax = auto_grid_max(out.samples, {}, opts.grid_max);
    Histogram h = make_histogram(out.samples, 0.0, gmax, opts.bins);
    h.mass *= out.samples.empty() ? 0.0 : (1.0 - out.zero_mass) / std::max(1e-300, h.mass.sum());
    h.zero_mass = out.zero_mass;
    out.sampled = std::move(h);
    return out;
}

SpectrumPrediction predict_spectrum_quadratic(const QuadSEOutput& se, const QuadraticTarget& target,
                                              const ProblemSpec& spec, const SpectrumOptions& opts) {
    const int d = static_cast<int>(target.eigvals.size());
    const double shift = spec.lambda * se.eps;
    const double delta = se.delta;

    SpectrumPrediction out;
    out.shift = shift;
    out.bulk_edge = 2.0 * delta - shift;
    for (int i = 0; i < d; ++i) {
        const double s = target.eigvals[i];
        if (s > delta) out.spikes.emplace_back(i + 1, s + delta * delta / s - shift);
    }

    Rng rng(opts.seed, "quad_spectrum");
    std::int64_t zeros = 0;
    for (int k = 0; k < opts.mc_draws; ++k) {
        Eigen::MatrixXd m = delta * sample_goe(d, rng);
        m.diagonal() += target.eigvals;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
        for (int i = 0; i < d; ++i) {
            const double v = es.eigenvalues()[i] - shift;
            if (v > 0)
                out.samples.push_back(v);
            else
                ++zeros;
        }
    }
    const std::int64_t total = std::int64_t(d) * opts.mc_draws;
    out.zero_mass = double(zeros) / double(total);
    const double gmax = auto_grid_max(out.samples, out.spikes, opts.grid_max);
    Histogram h = make_histogram(out.samples, 0.0, gmax, opts.bins);
    // make_histogram normalizes by sample count; rescale so bin mass + zero atom = 1
    h.mass *= out.samples.empty() ? 0.0
                                  : (1.0 - out.zero_mass) / std::max(1e-300, h.mass.sum());
    h.zero_mass = out.zero_mass;
    out.sampled = std::move(h);
    return out;
}

Histogram empirical_spectrum(const Eigen::VectorXd& values, double grid_max, int bins) {
    std::vector<double> v(values.data(), values.data() + values.size());
    for (double& x : v) x = std::abs(x) <= 1e-9 ? 0.0 : x;
    return make_histogram(v, 0.0, grid_max, bins, 1e-9);
}

ErrorDecomposition decompose_error(const QuadSEOutput& se, const QuadraticTarget& target,
                                   const ProblemSpec& spec) {
    const int d = static_cast<int>(target.eigvals.size());
    const double delta = se.delta;
    const double le = spec.lambda * se.eps;
    const Eigen::VectorXd& s = target.eigvals;  // nonincreasing

    ErrorDecomposition out;
    out.regime = le < 2.0 * delta ? Regime::UnderRegularized : Regime::OverRegularized;

    int k = 0;
    if (out.regime == Regime::UnderRegularized) {
        while (k < d && s[k] > delta) ++k;
        if (k == d)
            throw RegimeError("decompose_error: no cutoff (all target eigenvalues exceed delta)");
        // bulk second moment plus the spike-flux boundary term
        const double bulk = delta * delta * semicircle_overfit_integral(le / delta);
        const double kprime = -(1.0 / spec.gamma) * std::pow(double(d), 1.0 / (2.0 * spec.gamma)) *
                              std::pow(delta, -1.0 / spec.gamma - 1.0);
        out.overfitting = bulk + (delta / d) * kprime * (2.0 * delta - le) * (2.0 * delta - le);
    } else {
        while (k < d && s[k] + delta * delta / s[k] - le > 0) ++k;
        if (k == d)
            throw RegimeError("decompose_error: no cutoff (every spike survives the shift)");
        out.overfitting = 0.0;
    }
    out.cutoff_k = k;

    double under = 0.0;
    for (int i = k; i < d; ++i) under += s[i] * s[i];
    out.underfitting = under / d;

    // per-spike term of (delta d_delta + b d_b - 1)(s + delta^2/s - b)^2:
    // (delta^2/s - b)^2 + 2 (delta^2/s)(s + delta^2/s - b)
    double approx = 0.0;
    for (int i = 0; i < k; ++i) {
        const double u = delta * delta / s[i];
        const double a = u - le;
        approx += a * a + 2.0 * u * (s[i] + u - le);
    }
    out.approximation = approx / d;
    return out;
}

double spectrum_ks(const SpectrumPrediction& pred, const Eigen::VectorXd& empirical_values,
                   double zero_atol) {
    std::vector<double> emp;
    for (Eigen::Index i = 0; i < empirical_values.size(); ++i) {
        const double v = std::abs(empirical_values[i]);
        if (v > zero_atol) emp.push_back(v);
    }
    return ks_distance(pred.samples, emp);
}

void write_spectrum_csv(const std::string& path, const Histogram& h) {
    std::ofstream f(path);
    f << "bin_left,bin_right,mass\n";
    for (Eigen::Index i = 0; i < h.mass.size(); ++i)
        f << h.edges[i] << "," << h.edges[i + 1] << "," << h.mass[i] << "\n";
}

void write_spectrum_sidecar(const std::string& path, const SpectrumPrediction& pred) {
    nlohmann::json j;
    j["zero_mass"] = pred.zero_mass;
    j["bulk_edge"] = pred.bulk_edge;
    j["shift"] = pred.shift;
    auto& sp = j["spikes"] = nlohmann::json::array();
    for (const auto& [idx, loc] : pred.spikes) sp.push_back({{"index", idx}, {"location", loc}});
    std::ofstream f(path);
    f << j.dump(2) << "\n";
}

}  // namespace slab
