#pragma once

#include <vector>

#include <Eigen/Dense>

namespace slab {

/// Histogram on uniform bins; the atom at zero is tracked separately and never
/// binned.
struct Histogram {
    Eigen::VectorXd edges;  // size bins+1
    Eigen::VectorXd mass;   // size bins, sums to 1 - zero_mass
    double zero_mass = 0.0;
};

Histogram make_histogram(const std::vector<double>& values, double lo, double hi, int bins,
                         double zero_atol = 1e-9);

/// Gaussian-kernel density estimate evaluated on a uniform grid. Bandwidth is
/// Silverman's 1.06 sigma m^(-1/5) over the pooled samples; the grid spans the
/// sample range padded by 4 bandwidths.
struct KdeResult {
    Eigen::VectorXd grid;
    Eigen::VectorXd density;
    double bandwidth = 0.0;
};
KdeResult kde_density(const std::vector<double>& samples, int grid_points = 2048);

/// Trapezoid integral of the KDE density cubed. For GOE spectra this times
/// 4 pi^2/3 should be 1.
double kde_cube_integral(const std::vector<double>& samples, int grid_points = 2048);

/// Partial moments of the Wigner semicircle on [b, 2]:
/// m0 = int mu_sc, m1 = int x mu_sc, m2 = int x^2 mu_sc.
double semicircle_m0(double b);
double semicircle_m1(double b);
double semicircle_m2(double b);

/// int_b^2 mu_sc(x) (x - b)^2 dx in closed form.
double semicircle_overfit_integral(double b);

/// Two-sample Kolmogorov-Smirnov distance (samples need not be sorted).
double ks_distance(std::vector<double> a, std::vector<double> b);

}  // namespace slab
