#include "scalinglab/gamp.hpp"

#include <cmath>

namespace slab {

double lasso_kkt_residual(const Dataset& data, const Eigen::VectorXd& theta, double lambda) {
    const int d = data.d();
    Eigen::MatrixXd m = data.design / std::sqrt(double(d));
    Eigen::VectorXd corr = m.transpose() * (data.labels - m * theta);
    double kkt = 0.0;
    for (int j = 0; j < d; ++j) {
        if (theta[j] != 0.0)
            kkt = std::max(kkt, std::abs(corr[j] - lambda * (theta[j] > 0 ? 1.0 : -1.0)));
        else
            kkt = std::max(kkt, std::max(std::abs(corr[j]) - lambda, 0.0));
    }
    return kkt;
}

double matrix_opt_residual(const SensingOperator& a, const Eigen::VectorXd& y,
                           const Eigen::MatrixXd& s, double lambda) {
    Eigen::MatrixXd g = 2.0 * a.adjoint(y - a.apply(s));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eg(g);
    const double gmax = eg.eigenvalues().maxCoeff();
    const Eigen::VectorXd& w = es.eigenvalues();
    double act = 0.0;
    const double thresh = 1e-8 * std::max(1.0, w.maxCoeff());
    for (int i = 0; i < s.rows(); ++i) {
        if (w[i] > thresh) {
            const double gv = es.eigenvectors().col(i).dot(g * es.eigenvectors().col(i));
            act = std::max(act, std::abs(gv - lambda));
        }
    }
    return std::max(act, std::max(gmax - lambda, 0.0));
}

std::pair<VectorEstimate, GampTrace> gamp_lasso(const Dataset& data, double lambda,
                                                const GampOptions& opts,
                                                const DiagonalTarget* target) {
    if (data.model != Model::Diagonal) throw SpecError("gamp_lasso: diagonal dataset required");
    if (!(lambda > 0)) throw SpecError("gamp_lasso: lambda must be > 0");
    const int d = data.d();
    const std::int64_t n = data.n();
    Eigen::MatrixXd m = data.design / std::sqrt(double(d));
    const Eigen::VectorXd& y = data.labels;

    Eigen::VectorXd b = Eigen::VectorXd::Zero(d);
    Eigen::VectorXd omega = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(d);
    double a = 1.0;
    double damp = opts.damping;

    GampTrace trace;
    double prev_res = std::numeric_limits<double>::infinity();
    int rising = 0;
    int it = 0;
    for (; it < opts.max_iter; ++it) {
        Eigen::VectorXd theta_new(d);
        int supp = 0;
        for (int j = 0; j < d; ++j) {
            theta_new[j] = soft_threshold(b[j], lambda) / a;
            supp += b[j] > lambda || b[j] < -lambda;
        }
        const double v = supp / (double(d) * a);

        Eigen::VectorXd omega_new = m * theta_new - v * g;
        omega = it == 0 ? omega_new : (damp * omega_new + (1.0 - damp) * omega).eval();
        g = (y - omega) / (1.0 + v);
        a = (double(n) / d) / (1.0 + v);
        Eigen::VectorXd b_new = m.transpose() * g + a * theta_new;
        b = it == 0 ? b_new : (damp * b_new + (1.0 - damp) * b).eval();

        const double q = theta_new.squaredNorm() / d;
        trace.q.push_back(q);
        trace.v.push_back(v);
        trace.onsager_a.push_back(a);
        trace.m.push_back(target ? theta_new.dot(target->theta_star) / d
                                 : std::numeric_limits<double>::quiet_NaN());
        if (q > opts.q_divergence || !std::isfinite(q)) {
            trace.diverged = true;
            break;
        }
        const double res = (theta_new - theta).norm() / std::max(1.0, theta_new.norm());
        theta = std::move(theta_new);
        if (it > 2 && res <= opts.tol) {
            trace.converged = true;
            break;
        }
        if (res > prev_res) {
            if (++rising >= 2) {
                damp = std::max(0.05, damp * 0.5);
                rising = 0;
            }
        } else {
            rising = 0;
        }
        prev_res = res;
    }
    trace.iterations = it;

    VectorEstimate est;
    est.theta_hat = theta;
    est.kkt_residual = lasso_kkt_residual(data, theta, lambda);
    est.objective = 0.5 * (y - m * theta).squaredNorm() + lambda * theta.lpNorm<1>();
    est.iterations = it;
    est.support_size = static_cast<int>((theta.array() != 0.0).count());
    est.converged = trace.converged;
    if (trace.diverged) throw NumericsError("gamp_lasso: diverged (q exceeded bound)");
    return {std::move(est), std::move(trace)};
}

Eigen::VectorXd spectral_denoise(const Eigen::VectorXd& evals, double thresh, double sigma_hat) {
    return (evals.array() - thresh).cwiseMax(0.0) / sigma_hat;
}

double spectral_divergence_sum(const Eigen::VectorXd& evals, double thresh, double sigma_hat) {
    const int d = static_cast<int>(evals.size());
    Eigen::VectorXd den = spectral_denoise(evals, thresh, sigma_hat);
    double first = 0.0;
    for (int i = 0; i < d; ++i) first += evals[i] > thresh ? 1.0 / sigma_hat : 0.0;
    double pairs = 0.0;
    for (int i = 0; i < d; ++i) {
        for (int j = i + 1; j < d; ++j) {
            const double dn = evals[i] - evals[j];
            if (std::abs(dn) < 1e-12) {
                // removable singularity: both eigenvalues threshold identically
                pairs += evals[i] > thresh ? 1.0 / sigma_hat : 0.0;
            } else {
                pairs += (den[i] - den[j]) / dn;
            }
        }
    }
    return (2.0 / d) * (first + pairs);
}

std::pair<MatrixEstimate, GampTrace> gamp_matrix(const Dataset& data, double lambda,
                                                 const GampOptions& opts,
                                                 const QuadraticTarget* target) {
    if (data.model != Model::Quadratic || !data.sensing)
        throw SpecError("gamp_matrix: quadratic dataset required");
    if (!(lambda > 0)) throw SpecError("gamp_matrix: lambda must be > 0");
    const auto& a_op = *data.sensing;
    const int d = a_op.d();
    const std::int64_t n = a_op.n();
    const Eigen::VectorXd& y = data.labels;
    // trace penalty weight in the network-normalized field
    const double thresh = 2.0 * lambda / d;

    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(d, d);
    Eigen::VectorXd omega = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(d, d);
    double sigma_hat = 1.0;
    double damp = opts.damping;

    GampTrace trace;
    double prev_res = std::numeric_limits<double>::infinity();
    int rising = 0;
    int it = 0;
    for (; it < opts.max_iter; ++it) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b);
        Eigen::VectorXd den = spectral_denoise(es.eigenvalues(), thresh, sigma_hat);
        Eigen::MatrixXd s_new = es.eigenvectors() * den.asDiagonal() * es.eigenvectors().transpose();
        const double div = spectral_divergence_sum(es.eigenvalues(), thresh, sigma_hat);
        const double v = (4.0 / d) * div;

        Eigen::VectorXd omega_new = a_op.apply(s_new) - v * g;
        omega = it == 0 ? omega_new : (damp * omega_new + (1.0 - damp) * omega).eval();
        g = (y - omega) / (1.0 + v);
        sigma_hat = (8.0 * n / (double(d) * d)) / (1.0 + v);
        Eigen::MatrixXd b_new = (4.0 / d) * a_op.adjoint(g) + sigma_hat * s_new;
        b = it == 0 ? b_new : (damp * b_new + (1.0 - damp) * b).eval();

        const double q = s_new.squaredNorm() / d;
        trace.q.push_back(q);
        trace.v.push_back(v);
        trace.onsager_a.push_back(sigma_hat);
        trace.m.push_back(target ? s_new.cwiseProduct(target->s_star).sum() / d
                                 : std::numeric_limits<double>::quiet_NaN());
        if (q > opts.q_divergence || !std::isfinite(q)) {
            trace.diverged = true;
            break;
        }
        const double res = (s_new - s).norm() / std::max(1.0, s_new.norm());
        s = std::move(s_new);
        if (it > 2 && res <= opts.tol) {
            trace.converged = true;
            break;
        }
        if (res > prev_res) {
            if (++rising >= 2) {
                damp = std::max(0.05, damp * 0.5);
                rising = 0;
            }
        } else {
            rising = 0;
        }
        prev_res = res;
    }
    trace.iterations = it;

    MatrixEstimate est;
    est.s_hat = s;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
    est.eigvals_hat = es.eigenvalues().cwiseMax(0.0).reverse();
    est.objective = (y - a_op.apply(s)).squaredNorm() + lambda * s.trace();
    est.opt_residual = matrix_opt_residual(a_op, y, s, lambda);
    est.iterations = it;
    est.rank = static_cast<int>((est.eigvals_hat.array() > 1e-9 * std::max(1.0, est.eigvals_hat[0])).count());
    est.converged = trace.converged;
    if (trace.diverged) throw NumericsError("gamp_matrix: diverged (q exceeded bound)");
    return {std::move(est), std::move(trace)};
}

}  // namespace slab
