#include "scalinglab/two_layer.hpp"

#include <cmath>

#include "scalinglab/rng.hpp"

namespace slab {

namespace {

// Gradient descent with Barzilai-Borwein steps and an Armijo backtracking
// safeguard. Good enough for these small smooth nonconvex objectives.
template <typename Vec, typename ObjGrad>
double minimize_bb(Vec& x, const ObjGrad& fg, int max_iter, double grad_tol, int* iters_out) {
    Vec g = x, g_prev = x, x_prev = x;
    g.setZero();
    double f = fg(x, g);
    double step = 1e-3 / std::max(1.0, g.norm());
    int it = 0;
    for (; it < max_iter; ++it) {
        const double gnorm = g.norm();
        if (gnorm <= grad_tol * std::max(1.0, std::abs(f))) break;
        x_prev = x;
        g_prev = g;
        // Armijo backtracking from the BB guess
        double s = step;
        bool moved = false;
        for (int bt = 0; bt < 60; ++bt) {
            Vec cand = x_prev - s * g_prev;
            Vec gc = cand;
            gc.setZero();
            const double fc = fg(cand, gc);
            if (fc <= f - 1e-4 * s * gnorm * gnorm) {
                x = std::move(cand);
                g = std::move(gc);
                f = fc;
                moved = true;
                break;
            }
            s *= 0.5;
        }
        if (!moved) break;
        const Vec dx = x - x_prev;
        const Vec dg = g - g_prev;
        const double dxdg = dx.cwiseProduct(dg).sum();
        step = dxdg > 0 ? dx.squaredNorm() / dxdg : s * 2.0;
        if (!(step > 0) || !std::isfinite(step)) step = s;
    }
    if (iters_out) *iters_out = it;
    return f;
}

}  // namespace

VectorEstimate diagonal_net_erm(const Dataset& data, double lambda, const TwoLayerOptions& opts) {
    if (data.model != Model::Diagonal) throw SpecError("diagonal_net_erm: diagonal dataset required");
    const int d = data.d();
    Eigen::MatrixXd m = data.design / std::sqrt(double(d));
    const Eigen::VectorXd& y = data.labels;

    auto fg = [&](const Eigen::VectorXd& uw, Eigen::VectorXd& g) {
        const auto u = uw.head(d);
        const auto w = uw.tail(d);
        Eigen::VectorXd theta = u.cwiseProduct(w);
        Eigen::VectorXd r = y - m * theta;
        Eigen::VectorXd mt_r = m.transpose() * r;
        g.head(d) = -mt_r.cwiseProduct(w) + lambda * u;
        g.tail(d) = -mt_r.cwiseProduct(u) + lambda * w;
        return 0.5 * r.squaredNorm() + 0.5 * lambda * (u.squaredNorm() + w.squaredNorm());
    };

    double best_f = std::numeric_limits<double>::infinity();
    Eigen::VectorXd best_uw;
    int used_iters = 0;
    const int restarts = opts.init_theta ? 1 : std::max(1, opts.restarts);
    for (int rs = 0; rs < restarts; ++rs) {
        Eigen::VectorXd uw(2 * d);
        if (opts.init_theta) {
            // canonical factorization u_i = sign(t) sqrt|t|, w_i = sqrt|t|
            for (int i = 0; i < d; ++i) {
                const double t = (*opts.init_theta)[i];
                const double rt = std::sqrt(std::abs(t));
                uw[i] = t >= 0 ? rt : -rt;
                uw[d + i] = rt;
            }
        } else {
            Rng rng(opts.init_seed + rs, "diag_net_init");
            uw = opts.init_std * rng.normal_vector(2 * d);
        }
        int iters = 0;
        const double f = minimize_bb(uw, fg, opts.max_iter, opts.grad_tol, &iters);
        if (f < best_f) {
            best_f = f;
            best_uw = uw;
            used_iters = iters;
        }
    }

    VectorEstimate out;
    out.theta_hat = best_uw.head(d).cwiseProduct(best_uw.tail(d));
    out.objective = best_f;
    out.iterations = used_iters;
    out.support_size = static_cast<int>((out.theta_hat.array().abs() > 1e-12).count());
    Eigen::VectorXd g(2 * d);
    fg(best_uw, g);
    out.kkt_residual = g.norm();
    out.converged = out.kkt_residual <= 1e2 * opts.grad_tol * std::max(1.0, best_f) + 1e-8;
    return out;
}

MatrixEstimate quadratic_net_erm(const Dataset& data, double lambda, int p,
                                 const TwoLayerOptions& opts) {
    if (data.model != Model::Quadratic || !data.sensing)
        throw SpecError("quadratic_net_erm: quadratic dataset required");
    const int d = data.d();
    if (p < d) throw SpecError("quadratic_net_erm: requires p >= d (overparameterized)");
    const auto& a = *data.sensing;
    const Eigen::VectorXd& y = data.labels;
    const double scale = 1.0 / std::sqrt(double(p) * d);  // S = W^T W * scale

    using Mat = Eigen::MatrixXd;
    auto fg = [&](const Mat& w, Mat& g) {
        Mat s = scale * (w.transpose() * w);
        Eigen::VectorXd r = y - a.apply(s);
        // d/dW of sum r^2: -2 * 2 scale W A^T(r) ; of lambda Tr S: 2 lambda scale W
        Mat at_r = a.adjoint(r);
        g = scale * (-4.0 * (w * at_r) + 2.0 * lambda * w);
        return r.squaredNorm() + lambda * s.trace();
    };

    double best_f = std::numeric_limits<double>::infinity();
    Mat best_w;
    int used_iters = 0;
    const int restarts = opts.init_w ? 1 : std::max(1, opts.restarts);
    for (int rs = 0; rs < restarts; ++rs) {
        Mat w;
        if (opts.init_w) {
            w = *opts.init_w;
        } else {
            Rng rng(opts.init_seed + rs, "quad_net_init");
            w = opts.init_std * rng.normal_matrix(p, d);
        }
        int iters = 0;
        const double f = minimize_bb(w, fg, opts.max_iter, opts.grad_tol, &iters);
        if (f < best_f) {
            best_f = f;
            best_w = std::move(w);
            used_iters = iters;
        }
    }

    MatrixEstimate out;
    out.s_hat = scale * (best_w.transpose() * best_w);
    out.s_hat = 0.5 * (out.s_hat + out.s_hat.transpose().eval());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(out.s_hat);
    out.eigvals_hat = es.eigenvalues().cwiseMax(0.0).reverse();
    out.objective = best_f;
    out.iterations = used_iters;
    out.rank = static_cast<int>((out.eigvals_hat.array() > 1e-9 * std::max(1.0, out.eigvals_hat[0])).count());
    Mat g;
    fg(best_w, g);
    out.opt_residual = g.norm();
    out.converged = true;
    return out;
}

}  // namespace slab
