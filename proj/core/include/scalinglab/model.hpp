#pragma once

#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "scalinglab/rng.hpp"
#include "scalinglab/types.hpp"

namespace slab {

/// Teacher for the diagonal model: theta*_i ~ N(0, Lambda_i), Lambda_i = d i^(-2 gamma).
struct DiagonalTarget {
    Eigen::VectorXd theta_star;
    Eigen::VectorXd lambda_diag;
};

/// Teacher for the quadratic model: PSD with eigenvalues sqrt(d) i^(-gamma) in a Haar basis.
struct QuadraticTarget {
    Eigen::MatrixXd s_star;
    Eigen::VectorXd eigvals;  // nonincreasing
    Eigen::MatrixXd basis;    // orthogonal, s_star = basis * diag(eigvals) * basis^T
};

/// Linear measurement operator y_mu = Tr[S Z_mu] on symmetric matrices.
class SensingOperator {
  public:
    virtual ~SensingOperator() = default;
    virtual std::int64_t n() const = 0;
    virtual int d() const = 0;
    virtual Eigen::VectorXd apply(const Eigen::MatrixXd& s) const = 0;
    virtual Eigen::MatrixXd adjoint(const Eigen::VectorXd& r) const = 0;
};

/// Z_mu = (x_mu x_mu^T - I)/sqrt(d) with x_mu ~ N(0, I); stores only X (n x d).
class WishartSensing : public SensingOperator {
  public:
    WishartSensing(Eigen::MatrixXd x, int workers = 0);
    std::int64_t n() const override { return x_.rows(); }
    int d() const override { return static_cast<int>(x_.cols()); }
    Eigen::VectorXd apply(const Eigen::MatrixXd& s) const override;
    Eigen::MatrixXd adjoint(const Eigen::VectorXd& r) const override;
    const Eigen::MatrixXd& x() const { return x_; }

  private:
    Eigen::MatrixXd x_;
    int workers_;
};

/// Z_mu ~ GOE(d), stored as rows of the lower-triangular packing.
class GoeSensing : public SensingOperator {
  public:
    GoeSensing(std::vector<Eigen::MatrixXd> ops);
    std::int64_t n() const override { return static_cast<std::int64_t>(ops_.size()); }
    int d() const override { return ops_.empty() ? 0 : static_cast<int>(ops_.front().rows()); }
    Eigen::VectorXd apply(const Eigen::MatrixXd& s) const override;
    Eigen::MatrixXd adjoint(const Eigen::VectorXd& r) const override;
    const Eigen::MatrixXd& op(std::int64_t mu) const { return ops_[mu]; }

  private:
    std::vector<Eigen::MatrixXd> ops_;
};

struct Dataset {
    Model model = Model::Diagonal;
    MeasurementMode mode = MeasurementMode::VectorGaussian;
    Eigen::MatrixXd design;                     // n x d, diagonal model
    std::shared_ptr<SensingOperator> sensing;   // quadratic model
    Eigen::VectorXd labels;
    Eigen::VectorXd noise;                      // retained for diagnostics
    std::int64_t n() const { return labels.size(); }
    int d() const;
};

Eigen::VectorXd power_law_variances(int d, double gamma);   // Lambda_i = d i^(-2 gamma)
Eigen::VectorXd power_law_spectrum(int d, double gamma);    // s_i = sqrt(d) i^(-gamma)
double q_star(int d, double gamma);                         // sum i^(-2 gamma)

/// GOE(d): symmetric, offdiag variance 1/d, diag variance 2/d.
Eigen::MatrixXd sample_goe(int d, Rng& rng);

/// Haar-distributed orthogonal matrix (QR of a Gaussian matrix with the sign
/// of R's diagonal folded into Q).
Eigen::MatrixXd haar_orthogonal(int d, Rng& rng);

DiagonalTarget gen_diagonal_target(const ProblemSpec& spec);
QuadraticTarget gen_quadratic_target(const ProblemSpec& spec);

Dataset gen_dataset(const ProblemSpec& spec, const DiagonalTarget& target);
Dataset gen_dataset(const ProblemSpec& spec, const QuadraticTarget& target,
                    MeasurementMode mode = MeasurementMode::WishartCentered, int workers = 0);

/// Population excess risk of the prediction function, in closed form.
/// Diagonal: ||theta_hat - theta*||^2 / d. Quadratic: 2 ||S_hat - S*||_F^2 / d.
double excess_risk(const Eigen::VectorXd& theta_hat, const DiagonalTarget& target);
double excess_risk(const Eigen::MatrixXd& s_hat, const QuadraticTarget& target);

}  // namespace slab
