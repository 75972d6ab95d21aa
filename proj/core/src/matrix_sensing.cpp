#include "scalinglab/matrix_sensing.hpp"

#include <cmath>

namespace slab {

namespace {

void eig_sym(const Eigen::MatrixXd& m, Eigen::VectorXd& evals, Eigen::MatrixXd& evecs) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    evals = es.eigenvalues();
    evecs = es.eigenvectors();
}

}  // namespace

Eigen::MatrixXd psd_nuclear_prox(const Eigen::MatrixXd& m, double tau) {
    if (tau < 0) throw SpecError("psd_nuclear_prox: tau must be >= 0");
    Eigen::VectorXd w;
    Eigen::MatrixXd v;
    eig_sym(0.5 * (m + m.transpose().eval()), w, v);
    Eigen::VectorXd shrunk = (w.array() - tau).cwiseMax(0.0);
    // roundoff negatives are clipped before reassembly
    for (int i = 0; i < shrunk.size(); ++i)
        if (shrunk[i] < 1e-12 && shrunk[i] > -1e-12) shrunk[i] = std::max(shrunk[i], 0.0);
    Eigen::MatrixXd out = v * shrunk.asDiagonal() * v.transpose();
    return 0.5 * (out + out.transpose().eval());
}

MatrixEstimate solve_matrix_sensing(const Dataset& data, double lambda,
                                    const MatrixSensingOptions& opts) {
    if (data.model != Model::Quadratic || !data.sensing)
        throw SpecError("solve_matrix_sensing: quadratic dataset required");
    if (lambda < 0) throw SpecError("solve_matrix_sensing: lambda must be >= 0");
    const auto& a = *data.sensing;
    const Eigen::VectorXd& y = data.labels;
    const int d = a.d();

    // Lipschitz constant of the gradient 2 A^T A by power iteration, with a
    // small safety factor; backtracking below guards underestimates.
    Eigen::MatrixXd p = Eigen::MatrixXd::Identity(d, d) / d;
    double nrm = 1.0;
    for (int it = 0; it < 40; ++it) {
        p = a.adjoint(a.apply(p));
        nrm = p.norm();
        if (nrm <= 0) break;
        p /= nrm;
    }
    double lip = 2.0 * nrm * 1.05;

    auto objective = [&](const Eigen::MatrixXd& s) {
        return (y - a.apply(s)).squaredNorm() + lambda * s.trace();
    };

    Eigen::MatrixXd s = opts.warm_start.size() > 0 ? opts.warm_start
                                                   : Eigen::MatrixXd::Zero(d, d);
    Eigen::MatrixXd z = s;
    double t = 1.0;
    double obj = objective(s);
    double best_obj = obj;
    Eigen::MatrixXd best = s;

    MatrixEstimate out;
    double kkt = std::numeric_limits<double>::infinity();
    int iter = 0;
    for (; iter < opts.max_iter; ++iter) {
        Eigen::VectorXd rz = y - a.apply(z);
        Eigen::MatrixXd grad_step = z + (2.0 / lip) * a.adjoint(rz);
        Eigen::MatrixXd s_new = psd_nuclear_prox(grad_step, lambda / lip);
        double obj_new = objective(s_new);
        if (obj_new > obj + 1e-12 * std::max(1.0, std::abs(obj))) {
            // monotone restart; if it keeps failing the Lipschitz estimate was low
            z = s;
            t = 1.0;
            lip *= 1.5;
            continue;
        }
        const double t_new = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        z = s_new + ((t - 1.0) / t_new) * (s_new - s);
        const double step = (s_new - s).norm();
        s = std::move(s_new);
        t = t_new;
        obj = obj_new;
        if (obj < best_obj) {
            best_obj = obj;
            best = s;
        }
        if ((iter + 1) % opts.check_every == 0 || step == 0.0) {
            // spectral certificate
            Eigen::VectorXd r = y - a.apply(s);
            Eigen::MatrixXd g = 2.0 * a.adjoint(r);
            Eigen::VectorXd ws, gw;
            Eigen::MatrixXd vs;
            eig_sym(s, ws, vs);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eg(g);
            const double gmax = eg.eigenvalues().maxCoeff();
            double act = 0.0;
            const double thresh = 1e-8 * std::max(1.0, ws.maxCoeff());
            for (int i = 0; i < d; ++i) {
                if (ws[i] > thresh) {
                    const double gv = vs.col(i).dot(g * vs.col(i));
                    act = std::max(act, std::abs(gv - lambda));
                }
            }
            kkt = std::max(act, std::max(gmax - lambda, 0.0));
            if (kkt <= opts.tol) break;
        }
    }

    Eigen::VectorXd w;
    Eigen::MatrixXd v;
    eig_sym(s, w, v);
    Eigen::VectorXd w_clipped = w.cwiseMax(0.0);
    out.s_hat = s;
    out.eigvals_hat = w_clipped.reverse();
    out.objective = obj;
    out.opt_residual = kkt;
    out.iterations = iter;
    out.rank = static_cast<int>((w_clipped.array() > 1e-9 * std::max(1.0, w_clipped.maxCoeff())).count());
    out.converged = kkt <= opts.tol;
    return out;
}

MatrixEstimate prune(const MatrixEstimate& estimate, double delta_se, double eps_se, double lambda) {
    const double cut = 2.0 * delta_se - lambda * eps_se;
    if (!(lambda * eps_se < 2.0 * delta_se))
        throw RegimeError("prune: requires lambda*eps < 2*delta (under-regularized regime)");
    Eigen::VectorXd w;
    Eigen::MatrixXd v;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(estimate.s_hat);
    w = es.eigenvalues();
    v = es.eigenvectors();
    Eigen::VectorXd shrunk = (w.array() - cut).cwiseMax(0.0);
    MatrixEstimate out = estimate;
    out.s_hat = v * shrunk.asDiagonal() * v.transpose();
    out.s_hat = 0.5 * (out.s_hat + out.s_hat.transpose().eval());
    out.eigvals_hat = shrunk.reverse();
    out.rank = static_cast<int>((shrunk.array() > 0.0).count());
    return out;
}

}  // namespace slab
