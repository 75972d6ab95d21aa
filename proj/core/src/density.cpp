#include "scalinglab/density.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace slab {

Histogram make_histogram(const std::vector<double>& values, double lo, double hi, int bins,
                         double zero_atol) {
    Histogram h;
    h.edges.resize(bins + 1);
    h.mass = Eigen::VectorXd::Zero(bins);
    for (int i = 0; i <= bins; ++i) h.edges[i] = lo + (hi - lo) * i / bins;
    if (values.empty()) return h;
    const double w = 1.0 / values.size();
    std::int64_t zeros = 0;
    for (double v : values) {
        if (std::abs(v) <= zero_atol) {
            ++zeros;
            continue;
        }
        int bin = static_cast<int>((v - lo) / (hi - lo) * bins);
        if (bin < 0) bin = 0;
        if (bin >= bins) bin = bins - 1;
        h.mass[bin] += w;
    }
    h.zero_mass = zeros * w;
    return h;
}

KdeResult kde_density(const std::vector<double>& samples, int grid_points) {
    if (samples.size() < 2) throw std::invalid_argument("kde_density: need >= 2 samples");
    const double m = static_cast<double>(samples.size());
    double mean = 0.0;
    for (double s : samples) mean += s;
    mean /= m;
    double var = 0.0;
    for (double s : samples) var += (s - mean) * (s - mean);
    var /= (m - 1.0);
    const double h = 1.06 * std::sqrt(var) * std::pow(m, -0.2);
    auto [mn_it, mx_it] = std::minmax_element(samples.begin(), samples.end());
    const double lo = *mn_it - 4.0 * h;
    const double hi = *mx_it + 4.0 * h;

    KdeResult out;
    out.bandwidth = h;
    out.grid.resize(grid_points);
    out.density = Eigen::VectorXd::Zero(grid_points);
    const double dx = (hi - lo) / (grid_points - 1);
    for (int i = 0; i < grid_points; ++i) out.grid[i] = lo + i * dx;

    // kernel support is effectively 8h; samples are sorted once so each grid
    // point only visits a window
    std::vector<double> sorted = samples;
    std::sort(sorted.begin(), sorted.end());
    const double cutoff = 8.0 * h;
    const double norm = 1.0 / (m * h * std::sqrt(2.0 * M_PI));
    for (int i = 0; i < grid_points; ++i) {
        const double x = out.grid[i];
        auto first = std::lower_bound(sorted.begin(), sorted.end(), x - cutoff);
        auto last = std::upper_bound(first, sorted.end(), x + cutoff);
        double acc = 0.0;
        for (auto it = first; it != last; ++it) {
            const double z = (x - *it) / h;
            acc += std::exp(-0.5 * z * z);
        }
        out.density[i] = acc * norm;
    }
    return out;
}

double kde_cube_integral(const std::vector<double>& samples, int grid_points) {
    KdeResult k = kde_density(samples, grid_points);
    double acc = 0.0;
    for (int i = 0; i + 1 < k.grid.size(); ++i) {
        const double f0 = k.density[i] * k.density[i] * k.density[i];
        const double f1 = k.density[i + 1] * k.density[i + 1] * k.density[i + 1];
        acc += 0.5 * (f0 + f1) * (k.grid[i + 1] - k.grid[i]);
    }
    return acc;
}

namespace {
double clamp2(double b) { return std::min(2.0, std::max(-2.0, b)); }
}  // namespace

double semicircle_m0(double b) {
    b = clamp2(b);
    const double s = std::sqrt(std::max(0.0, 4.0 - b * b));
    return (M_PI - 0.5 * b * s - 2.0 * std::asin(0.5 * b)) / (2.0 * M_PI);
}

double semicircle_m1(double b) {
    b = clamp2(b);
    return std::pow(std::max(0.0, 4.0 - b * b), 1.5) / (6.0 * M_PI);
}

double semicircle_m2(double b) {
    b = clamp2(b);
    const double s = std::sqrt(std::max(0.0, 4.0 - b * b));
    return (M_PI - 2.0 * std::asin(0.5 * b) - 0.125 * b * (2.0 * b * b - 4.0) * s) / (2.0 * M_PI);
}

double semicircle_overfit_integral(double b) {
    if (b >= 2.0) return 0.0;
    return semicircle_m2(b) - 2.0 * b * semicircle_m1(b) + b * b * semicircle_m0(b);
}

double ks_distance(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_distance: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = a[i] <= b[j] ? a[i] : b[j];
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(double(i) / a.size() - double(j) / b.size()));
    }
    return d;
}

}  // namespace slab
