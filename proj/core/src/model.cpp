#include "scalinglab/model.hpp"

#include <cmath>

#include "scalinglab/parallel.hpp"

namespace slab {

std::string to_string(Model m) { return m == Model::Diagonal ? "diagonal" : "quadratic"; }

std::string to_string(MeasurementMode m) {
    switch (m) {
        case MeasurementMode::VectorGaussian: return "vector_gaussian";
        case MeasurementMode::WishartCentered: return "wishart_centered";
        default: return "goe_universal";
    }
}

void ProblemSpec::validate() const {
    if (!(gamma > 0.5)) throw SpecError("gamma must exceed 1/2 (square-summability)");
    if (d < 1) throw SpecError("d must be >= 1");
    if (n < 1) throw SpecError("n must be >= 1");
    if (delta < 0) throw SpecError("delta must be >= 0");
    if (lambda < 0) throw SpecError("lambda must be >= 0");
}

int Dataset::d() const {
    if (model == Model::Diagonal) return static_cast<int>(design.cols());
    return sensing ? sensing->d() : 0;
}

Eigen::VectorXd power_law_variances(int d, double gamma) {
    Eigen::VectorXd v(d);
    for (int i = 0; i < d; ++i) v[i] = d * std::pow(i + 1.0, -2.0 * gamma);
    return v;
}

Eigen::VectorXd power_law_spectrum(int d, double gamma) {
    Eigen::VectorXd v(d);
    const double rd = std::sqrt(double(d));
    for (int i = 0; i < d; ++i) v[i] = rd * std::pow(i + 1.0, -gamma);
    return v;
}

double q_star(int d, double gamma) {
    double q = 0.0;
    for (int i = d; i >= 1; --i) q += std::pow(double(i), -2.0 * gamma);
    return q;
}

Eigen::MatrixXd sample_goe(int d, Rng& rng) {
    Eigen::MatrixXd z(d, d);
    const double off = 1.0 / std::sqrt(double(d));
    const double dia = std::sqrt(2.0 / d);
    for (int i = 0; i < d; ++i) {
        z(i, i) = dia * rng.normal();
        for (int j = i + 1; j < d; ++j) z(i, j) = z(j, i) = off * rng.normal();
    }
    return z;
}

Eigen::MatrixXd haar_orthogonal(int d, Rng& rng) {
    Eigen::MatrixXd a = rng.normal_matrix(d, d);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
    Eigen::MatrixXd q = qr.householderQ();
    Eigen::VectorXd rdiag = qr.matrixQR().diagonal();
    for (int j = 0; j < d; ++j)
        if (rdiag[j] < 0) q.col(j) = -q.col(j);
    return q;
}

DiagonalTarget gen_diagonal_target(const ProblemSpec& spec) {
    spec.validate();
    if (spec.model != Model::Diagonal) throw SpecError("gen_diagonal_target: spec.model must be Diagonal");
    DiagonalTarget t;
    t.lambda_diag = power_law_variances(spec.d, spec.gamma);
    Rng rng(spec.seed, "diagonal_target");
    t.theta_star = rng.normal_vector(spec.d).cwiseProduct(t.lambda_diag.cwiseSqrt());
    return t;
}

QuadraticTarget gen_quadratic_target(const ProblemSpec& spec) {
    spec.validate();
    if (spec.model != Model::Quadratic) throw SpecError("gen_quadratic_target: spec.model must be Quadratic");
    QuadraticTarget t;
    t.eigvals = power_law_spectrum(spec.d, spec.gamma);
    Rng rng(spec.seed, "quadratic_target");
    t.basis = haar_orthogonal(spec.d, rng);
    t.s_star = t.basis * t.eigvals.asDiagonal() * t.basis.transpose();
    t.s_star = 0.5 * (t.s_star + t.s_star.transpose().eval());
    return t;
}

WishartSensing::WishartSensing(Eigen::MatrixXd x, int workers) : x_(std::move(x)), workers_(workers) {}

Eigen::VectorXd WishartSensing::apply(const Eigen::MatrixXd& s) const {
    const std::int64_t nn = x_.rows();
    const double inv_rd = 1.0 / std::sqrt(double(x_.cols()));
    const double tr = s.trace();
    Eigen::VectorXd y(nn);
    parallel_chunks(nn, workers_, kFixedChunks, [&](int, std::int64_t lo, std::int64_t hi) {
        const auto rows = x_.middleRows(lo, hi - lo);
        // (x^T S x - tr S)/sqrt(d) per row
        Eigen::MatrixXd xs = rows * s;
        for (std::int64_t i = 0; i < hi - lo; ++i)
            y[lo + i] = (xs.row(i).dot(rows.row(i)) - tr) * inv_rd;
    });
    return y;
}

Eigen::MatrixXd WishartSensing::adjoint(const Eigen::VectorXd& r) const {
    const std::int64_t nn = x_.rows();
    const int dd = static_cast<int>(x_.cols());
    const double inv_rd = 1.0 / std::sqrt(double(dd));
    std::vector<Eigen::MatrixXd> partials(kFixedChunks);
    std::vector<double> rsums(kFixedChunks, 0.0);
    parallel_chunks(nn, workers_, kFixedChunks, [&](int c, std::int64_t lo, std::int64_t hi) {
        const auto rows = x_.middleRows(lo, hi - lo);
        partials[c].noalias() = rows.transpose() * r.segment(lo, hi - lo).asDiagonal() * rows;
        rsums[c] = r.segment(lo, hi - lo).sum();
    });
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(dd, dd);
    double rsum = 0.0;
    for (int c = 0; c < kFixedChunks; ++c) {
        if (partials[c].size() > 0) acc += partials[c];
        rsum += rsums[c];
    }
    acc.diagonal().array() -= rsum;
    acc *= inv_rd;
    return 0.5 * (acc + acc.transpose().eval());
}

GoeSensing::GoeSensing(std::vector<Eigen::MatrixXd> ops) : ops_(std::move(ops)) {}

Eigen::VectorXd GoeSensing::apply(const Eigen::MatrixXd& s) const {
    Eigen::VectorXd y(n());
    for (std::int64_t mu = 0; mu < n(); ++mu) y[mu] = ops_[mu].cwiseProduct(s).sum();
    return y;
}

Eigen::MatrixXd GoeSensing::adjoint(const Eigen::VectorXd& r) const {
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(d(), d());
    for (std::int64_t mu = 0; mu < n(); ++mu) acc += r[mu] * ops_[mu];
    return acc;
}

Dataset gen_dataset(const ProblemSpec& spec, const DiagonalTarget& target) {
    spec.validate();
    if (spec.model != Model::Diagonal) throw SpecError("gen_dataset: diagonal target requires Diagonal model");
    Dataset data;
    data.model = Model::Diagonal;
    data.mode = MeasurementMode::VectorGaussian;
    Rng rng(spec.seed, "design");
    data.design = rng.normal_matrix(spec.n, spec.d);
    Rng nrng(spec.seed, "noise");
    data.noise = nrng.normal_vector(spec.n);
    data.labels = data.design * target.theta_star / std::sqrt(double(spec.d)) +
                  std::sqrt(spec.delta) * data.noise;
    return data;
}

Dataset gen_dataset(const ProblemSpec& spec, const QuadraticTarget& target, MeasurementMode mode,
                    int workers) {
    spec.validate();
    if (spec.model != Model::Quadratic) throw SpecError("gen_dataset: quadratic target requires Quadratic model");
    if (mode == MeasurementMode::VectorGaussian)
        throw SpecError("gen_dataset: VectorGaussian mode is for the diagonal model");
    Dataset data;
    data.model = Model::Quadratic;
    data.mode = mode;
    Rng nrng(spec.seed, "noise");
    data.noise = nrng.normal_vector(spec.n);
    if (mode == MeasurementMode::WishartCentered) {
        Rng rng(spec.seed, "design");
        data.sensing = std::make_shared<WishartSensing>(rng.normal_matrix(spec.n, spec.d), workers);
    } else {
        Rng rng(spec.seed, "goe_design");
        std::vector<Eigen::MatrixXd> ops;
        ops.reserve(spec.n);
        for (std::int64_t mu = 0; mu < spec.n; ++mu) ops.push_back(sample_goe(spec.d, rng));
        data.sensing = std::make_shared<GoeSensing>(std::move(ops));
    }
    data.labels = data.sensing->apply(target.s_star) + std::sqrt(spec.delta) * data.noise;
    return data;
}

double excess_risk(const Eigen::VectorXd& theta_hat, const DiagonalTarget& target) {
    if (theta_hat.size() != target.theta_star.size())
        throw SpecError("excess_risk: dimension mismatch");
    return (theta_hat - target.theta_star).squaredNorm() / theta_hat.size();
}

double excess_risk(const Eigen::MatrixXd& s_hat, const QuadraticTarget& target) {
    if (s_hat.rows() != target.s_star.rows() || s_hat.cols() != target.s_star.cols())
        throw SpecError("excess_risk: dimension mismatch");
    return 2.0 * (s_hat - target.s_star).squaredNorm() / s_hat.rows();
}

}  // namespace slab
