#include "scalinglab/state_evolution.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "scalinglab/density.hpp"
#include "scalinglab/parallel.hpp"
#include "scalinglab/rng.hpp"

namespace slab {

namespace {

constexpr double kSqrtPi = 1.7724538509055160273;
constexpr double kErfcxSwitch = 6.0;

// Scaled complementary error function erfcx(x) = exp(x^2) erfc(x), for x >= 6,
// via the Laplace continued fraction (backward evaluation).
double erfcx_large(double x) {
    double f = 0.0;
    for (int k = 40; k >= 1; --k) f = (0.5 * k) / (x + f);
    return 1.0 / (kSqrtPi * (x + f));
}

// One term of the R sum, stable for large nu/q:
//   s2 erf(z) + (Dhat + 2 nu^2) erfc(z) - (2 nu/sqrt(pi)) q exp(-z^2),  z = nu/q.
double risk_term(double s2, double dhat, double nu, double q) {
    const double z = nu / q;
    if (z < kErfcxSwitch) {
        return s2 * std::erf(z) + (dhat + 2.0 * nu * nu) * std::erfc(z) -
               (2.0 * nu / kSqrtPi) * q * std::exp(-z * z);
    }
    const double tail = std::exp(-z * z) *
                        ((dhat + 2.0 * nu * nu - s2) * erfcx_large(z) - (2.0 * nu / kSqrtPi) * q);
    return s2 + tail;
}

struct DiagSums {
    double erfc_sum;  // sum_i erfc(nu/sqrt(s2_i + Dhat))
    double risk_sum;  // sum_i risk_term(...)
};

// Evaluates both sums with constant-tail grouping: s2 is sorted nonincreasing,
// entries below tail_eps*Dhat are treated as zero (their term is s2-independent).
class DiagEvaluator {
  public:
    DiagEvaluator(Eigen::VectorXd s2_sorted, std::int64_t d, bool group)
        : s2_(std::move(s2_sorted)), d_(d), group_(group) {}

    std::int64_t head_size(double dhat) const {
        if (!group_) return s2_.size();
        const double cut = 1e-7 * dhat;
        // first index with s2 <= cut (s2 sorted descending)
        std::int64_t lo = 0, hi = s2_.size();
        while (lo < hi) {
            const std::int64_t mid = (lo + hi) / 2;
            if (s2_[mid] <= cut) hi = mid;
            else lo = mid + 1;
        }
        return lo;
    }

    double erfc_sum(double nu, double dhat, std::int64_t head) const {
        double acc = 0.0;
        for (std::int64_t i = 0; i < head; ++i) acc += std::erfc(nu / std::sqrt(s2_[i] + dhat));
        acc += double(d_ - head) * std::erfc(nu / std::sqrt(dhat));
        return acc;
    }

    double risk_sum(double nu, double dhat, std::int64_t head) const {
        double acc = 0.0;
        for (std::int64_t i = 0; i < head; ++i)
            acc += risk_term(s2_[i], dhat, nu, std::sqrt(s2_[i] + dhat));
        acc += double(d_ - head) * risk_term(0.0, dhat, nu, std::sqrt(dhat));
        return acc;
    }

  private:
    Eigen::VectorXd s2_;
    std::int64_t d_;
    bool group_;
};

}  // namespace

DiagSEOutput se_lasso(const ProblemSpec& spec, const Eigen::VectorXd& lambda_diag) {
    spec.validate();
    const std::int64_t d = lambda_diag.size();
    const double n = double(spec.n);
    const double lambda = spec.lambda;
    const double aspect = n / d;

    Eigen::VectorXd s2 = (lambda_diag * (n / d)).eval();
    std::sort(s2.data(), s2.data() + s2.size(), std::greater<double>());
    DiagEvaluator ev(std::move(s2), d, d > 200000);

    if (lambda == 0.0 && spec.n >= d)
        throw RegimeError("se_lasso: no positive nu solution for lambda = 0 with n >= d");

    const double q_star_val = lambda_diag.sum() / d;
    double risk = q_star_val;
    double nu = 1.0;
    DiagSEOutput out;
    const double tol = 1e-12;
    int it = 0;
    for (; it < 600; ++it) {
        const double dhat = spec.delta + risk;
        const std::int64_t head = ev.head_size(dhat);
        auto nu_eq = [&](double v) {
            double lhs = ev.erfc_sum(v, dhat, head) / d - aspect;
            if (lambda > 0) lhs += (lambda / v) * std::sqrt(n / (2.0 * d));
            return lhs;  // strictly decreasing in v
        };
        double lo = 1e-14, hi = std::max(1.0, nu);
        while (nu_eq(hi) > 0) {
            hi *= 2.0;
            if (hi > 1e30) throw NumericsError("se_lasso: nu bracket failed");
        }
        if (nu_eq(lo) < 0) throw RegimeError("se_lasso: no positive nu solution in this regime");
        for (int b = 0; b < 200 && (hi - lo) > 1e-15 * hi; ++b) {
            const double mid = std::sqrt(lo * hi);
            (nu_eq(mid) > 0 ? lo : hi) = mid;
        }
        nu = std::sqrt(lo * hi);
        const double risk_new = ev.risk_sum(nu, dhat, head) / n;
        const double change = std::abs(risk_new - risk) / std::max(1.0, std::abs(risk));
        risk = 0.5 * risk + 0.5 * risk_new;
        if (change < tol) {
            risk = risk_new;
            break;
        }
    }
    const double dhat = spec.delta + risk;
    const std::int64_t head = ev.head_size(dhat);
    double nu_resid = ev.erfc_sum(nu, dhat, head) / d - aspect;
    if (lambda > 0) nu_resid += (lambda / nu) * std::sqrt(n / (2.0 * d));
    const double r_resid = std::abs(ev.risk_sum(nu, dhat, head) / n - risk) / std::max(1.0, risk);

    out.nu = nu;
    out.risk = risk;
    out.delta_hat = dhat;
    out.iterations = it;
    out.residual = std::max(std::abs(nu_resid) / aspect, r_resid);
    out.converged = out.residual <= 1e-10;
    return out;
}

DiagSEOutput se_lasso(const ProblemSpec& spec) {
    return se_lasso(spec, power_law_variances(spec.d, spec.gamma));
}

BayesSEOutput se_bayes_diagonal(const ProblemSpec& spec, const Eigen::VectorXd& lambda_diag) {
    // n = 0 is meaningful here (prior-only risk), so do not insist on n >= 1
    if (!(spec.gamma > 0.5)) throw SpecError("se_bayes_diagonal: gamma must exceed 1/2");
    if (spec.delta < 0 || spec.n < 0) throw SpecError("se_bayes_diagonal: bad spec");
    const std::int64_t d = lambda_diag.size();
    if (spec.delta == 0.0 && spec.n >= d)
        throw RegimeError("se_bayes_diagonal: Delta = 0 requires n < d");
    const double trl = lambda_diag.sum() / d;
    auto f = [&](double r) {
        const double qh = spec.n / (spec.delta + r);
        double acc = 0.0;
        for (std::int64_t i = 0; i < d; ++i) acc += 1.0 / (1.0 / lambda_diag[i] + qh / d);
        return acc / d - r;
    };
    double lo = 0.0, hi = trl;
    int it = 0;
    for (; it < 200 && (hi - lo) > 1e-15 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) > 0 ? lo : hi) = mid;
    }
    BayesSEOutput out;
    out.risk = 0.5 * (lo + hi);
    out.q_hat = spec.n / (spec.delta + out.risk);
    out.residual = std::abs(f(out.risk));
    out.iterations = it;
    out.converged = out.residual <= 1e-9 * std::max(1.0, out.risk);
    return out;
}

BayesSEOutput se_bayes_diagonal(const ProblemSpec& spec) {
    return se_bayes_diagonal(spec, power_law_variances(spec.d, spec.gamma));
}

namespace {

// Cached per-draw eigendecompositions of S* + delta Z along the delta search.
class QuadJCache {
  public:
    QuadJCache(const Eigen::VectorXd& target_eigs, const MCConfig& mc)
        : s_(target_eigs), mc_(mc) {
        const int d = static_cast<int>(s_.size());
        zs_.reserve(mc.draws);
        Rng rng(mc.seed, "quad_se_draws");
        for (int k = 0; k < mc.draws; ++k) zs_.push_back(sample_goe(d, rng));
    }

    struct Draw {
        Eigen::VectorXd evals;
        Eigen::VectorXd dv;  // v_i^T Z v_i per eigenvector
    };

    const std::vector<Draw>& at(double delta) {
        auto it = cache_.find(delta);
        if (it != cache_.end()) return it->second;
        const int d = static_cast<int>(s_.size());
        std::vector<Draw> draws(zs_.size());
        parallel_chunks(static_cast<std::int64_t>(zs_.size()), mc_.workers,
                        static_cast<int>(zs_.size()),
                        [&](int, std::int64_t lo, std::int64_t hi) {
                            for (std::int64_t k = lo; k < hi; ++k) {
                                Eigen::MatrixXd m = delta * zs_[k];
                                m.diagonal() += s_;
                                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
                                draws[k].evals = es.eigenvalues();
                                Eigen::MatrixXd zv = zs_[k] * es.eigenvectors();
                                draws[k].dv.resize(d);
                                for (int i = 0; i < d; ++i)
                                    draws[k].dv[i] = es.eigenvectors().col(i).dot(zv.col(i));
                            }
                        });
        if (cache_.size() > 250) cache_.clear();
        return cache_.emplace(delta, std::move(draws)).first->second;
    }

    struct JP {
        double j, d1, d2;
        std::vector<double> per_draw;  // delta*d1_k - j_k + b*d2_k contributions need parts
        std::vector<double> j_k, d1_k, d2_k;
    };

    JP jp(double delta, double b) {
        const auto& draws = at(delta);
        const int d = static_cast<int>(s_.size());
        JP out;
        out.j = out.d1 = out.d2 = 0.0;
        for (const auto& dr : draws) {
            double j = 0, d1 = 0, d2 = 0;
            for (int i = 0; i < d; ++i) {
                const double r = dr.evals[i] - b;
                if (r > 0) {
                    j += r * r;
                    d1 += r * dr.dv[i];
                    d2 += r;
                }
            }
            j /= d;
            d1 *= 2.0 / d;
            d2 *= -2.0 / d;
            out.j_k.push_back(j);
            out.d1_k.push_back(d1);
            out.d2_k.push_back(d2);
            out.j += j;
            out.d1 += d1;
            out.d2 += d2;
        }
        const double m = double(draws.size());
        out.j /= m;
        out.d1 /= m;
        out.d2 /= m;
        return out;
    }

  private:
    Eigen::VectorXd s_;
    MCConfig mc_;
    std::vector<Eigen::MatrixXd> zs_;
    std::map<double, std::vector<Draw>> cache_;
};

}  // namespace

QuadSEOutput se_quadratic_erm(const ProblemSpec& spec, const QuadraticTarget& target,
                              const MCConfig& mc) {
    spec.validate();
    if (!(spec.lambda > 0)) throw SpecError("se_quadratic_erm: lambda must be > 0");
    const int d = static_cast<int>(target.eigvals.size());
    const double alpha = double(spec.n) / (double(d) * d);
    const double lambda = spec.lambda;
    const double q = q_star(d, spec.gamma);
    QuadJCache cache(target.eigvals, mc);

    int evals = 0;
    // Inner solve of eq.(1) for eps at fixed delta; F1 is increasing in eps.
    auto eps_of = [&](double de) -> double {
        auto f1 = [&](double ep) {
            ++evals;
            return 4.0 * alpha * de - de / ep - cache.jp(de, lambda * ep).d1;
        };
        double lo = 1e-12, hi = 1.0;
        int grow = 0;
        while (f1(hi) < 0 && grow++ < 50) hi *= 4.0;
        if (f1(hi) < 0) return -1.0;
        for (int b = 0; b < 90 && (hi - lo) > 1e-9 * hi; ++b) {
            const double mid = std::sqrt(lo * hi);
            (f1(mid) < 0 ? lo : hi) = mid;
        }
        return std::sqrt(lo * hi);
    };
    auto g_of = [&](double de) -> double {
        const double ep = eps_of(de);
        if (ep <= 0) return std::numeric_limits<double>::quiet_NaN();
        const auto jp = cache.jp(de, lambda * ep);
        return q + spec.delta / 2.0 + 2.0 * alpha * de * de - de * de / ep -
               (jp.j - lambda * ep * jp.d2);
    };

    // Scan downward from above the trivial-phase delta for the first sign
    // change of eq.(2)'s residual; this keeps the branch connected to the
    // large-lambda solution.
    const double de_top = 1.25 * std::sqrt((q + spec.delta / 2.0) / (2.0 * alpha));
    const int scan = std::max(8, mc.scan_points);
    double lo = -1.0, hi = -1.0, prev_de = 0.0, prev_g = std::numeric_limits<double>::quiet_NaN();
    bool have_prev = false;
    for (int i = 0; i < scan; ++i) {
        const double de = de_top * std::pow(1e-5, double(i) / (scan - 1));
        const double g = g_of(de);
        if (std::isnan(g)) continue;
        if (have_prev && prev_g <= 0.0 && g > 0.0) {
            lo = de;
            hi = prev_de;
            break;
        }
        prev_de = de;
        prev_g = g;
        have_prev = true;
    }
    QuadSEOutput out;
    double de;
    if (lo < 0) {
        de = de_top / 1.25;  // no crossing found: trivial-branch fallback
        out.converged = false;
    } else {
        for (int b = 0; b < 80 && (hi - lo) > mc.tol * hi; ++b) {
            const double mid = std::sqrt(lo * hi);
            const double g = g_of(mid);
            ((std::isnan(g) || g > 0) ? lo : hi) = mid;
        }
        de = std::sqrt(lo * hi);
        out.converged = true;
    }
    const double ep = eps_of(de);
    if (ep <= 0) throw NumericsError("se_quadratic_erm: eps solve failed at converged delta");
    const auto jp = cache.jp(de, lambda * ep);
    out.delta = de;
    out.eps = ep;
    out.risk = 2.0 * alpha * de * de - spec.delta / 2.0;
    out.iterations = evals;
    // risk = Q* + delta d1J - J + lambda eps d2J at the fixed point; spread of
    // the per-draw values of that combination gives the MC error bar
    if (jp.j_k.size() > 1) {
        double mean = 0.0, var = 0.0;
        std::vector<double> c(jp.j_k.size());
        for (std::size_t k = 0; k < c.size(); ++k) {
            c[k] = de * jp.d1_k[k] - jp.j_k[k] + lambda * ep * jp.d2_k[k];
            mean += c[k];
        }
        mean /= c.size();
        for (double v : c) var += (v - mean) * (v - mean);
        var /= (c.size() - 1);
        out.mc_stderr = std::sqrt(var / c.size());
    }
    return out;
}

namespace {

double cubic_integral_at(const Eigen::VectorXd& scaled_spikes, const std::vector<Eigen::MatrixXd>& zs,
                         int workers) {
    const int d = static_cast<int>(scaled_spikes.size());
    std::vector<std::vector<double>> per(zs.size());
    parallel_chunks(static_cast<std::int64_t>(zs.size()), workers, static_cast<int>(zs.size()),
                    [&](int, std::int64_t lo, std::int64_t hi) {
                        for (std::int64_t k = lo; k < hi; ++k) {
                            Eigen::MatrixXd m = zs[k];
                            m.diagonal() += scaled_spikes;
                            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
                            per[k].assign(es.eigenvalues().data(), es.eigenvalues().data() + d);
                        }
                    });
    std::vector<double> pooled;
    pooled.reserve(zs.size() * d);
    for (const auto& v : per) pooled.insert(pooled.end(), v.begin(), v.end());
    return (4.0 * M_PI * M_PI / 3.0) * kde_cube_integral(pooled);
}

}  // namespace

BayesSEOutput se_quadratic_bayes(const ProblemSpec& spec, const QuadraticTarget& target,
                                 const MCConfig& mc) {
    spec.validate();
    if (!(spec.delta > 0)) throw SpecError("se_quadratic_bayes: requires Delta > 0");
    const int d = static_cast<int>(target.eigvals.size());
    const double alpha = double(spec.n) / (double(d) * d);
    const double q_max = q_star(d, spec.gamma);

    std::vector<Eigen::MatrixXd> zs;
    Rng rng(mc.seed, "quad_bayes_draws");
    for (int k = 0; k < mc.draws; ++k) zs.push_back(sample_goe(d, rng));

    // The same KDE pipeline on pure GOE gives the smoothing-bias calibration
    // factor (exact value 1).
    std::vector<Eigen::MatrixXd> zs_cal;
    Rng crng(mc.seed + 0x9e3779b9U, "quad_bayes_cal");
    for (int k = 0; k < mc.draws; ++k) zs_cal.push_back(sample_goe(d, crng));
    const double cal = cubic_integral_at(Eigen::VectorXd::Zero(d), zs_cal, mc.workers);
    if (cal < 0.8 || cal > 1.2)
        throw NumericsError("se_quadratic_bayes: KDE calibration outside [0.8, 1.2]");

    auto g_of = [&](double qv) {
        const double qh = 4.0 * alpha / (spec.delta + 2.0 * (q_max - qv));
        Eigen::VectorXd spikes = std::sqrt(qh) * target.eigvals;
        const double integral = cubic_integral_at(spikes, zs, mc.workers) / cal;
        if (integral < 0.0 || integral > 1.5)
            throw NumericsError("se_quadratic_bayes: cubic density integral outside [0, 1.5]");
        return 1.0 - 2.0 * alpha + spec.delta * qh / 2.0 - integral;
    };

    const int scan = 33;
    double lo = -1.0, hi = -1.0, prev_q = 0.0, prev_g = 0.0;
    bool have_prev = false, found = false;
    for (int i = 0; i < scan; ++i) {
        const double qv = q_max * (1.0 - 1e-9) * i / (scan - 1);
        const double g = g_of(qv);
        if (have_prev && prev_g <= 0.0 && g > 0.0) {
            lo = prev_q;
            hi = qv;
            found = true;
            break;
        }
        prev_q = qv;
        prev_g = g;
        have_prev = true;
    }
    BayesSEOutput out;
    double qv;
    int it = scan;
    if (!found) {
        // G one-signed: either no information was learned (risk = Q*) or the
        // equation saturates at q -> Q*.
        qv = (prev_g <= 0.0) ? q_max * (1.0 - 1e-9) : 0.0;
        out.converged = false;
    } else {
        for (int b = 0; b < 60 && (hi - lo) > mc.tol * std::max(1e-6, hi); ++b, ++it) {
            const double mid = 0.5 * (lo + hi);
            (g_of(mid) <= 0 ? lo : hi) = mid;
        }
        qv = 0.5 * (lo + hi);
        out.converged = true;
    }
    out.q_hat = 4.0 * alpha / (spec.delta + 2.0 * (q_max - qv));
    out.risk = q_max - qv;
    out.residual = std::abs(g_of(qv));
    out.iterations = it;
    return out;
}

JEstimate estimate_j(const Eigen::VectorXd& target_eigs, double delta, double b, int draws,
                     std::uint64_t seed, bool finite_difference_d1) {
    const int d = static_cast<int>(target_eigs.size());
    Rng rng(seed, "estimate_j");
    JEstimate out;
    const double h = 1e-4 * std::max(delta, 1e-8);
    for (int k = 0; k < draws; ++k) {
        Eigen::MatrixXd z = sample_goe(d, rng);
        Eigen::MatrixXd m = delta * z;
        m.diagonal() += target_eigs;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
        double j = 0, d1 = 0, d2 = 0;
        for (int i = 0; i < d; ++i) {
            const double r = es.eigenvalues()[i] - b;
            if (r > 0) {
                j += r * r;
                d2 += r;
                if (!finite_difference_d1)
                    d1 += r * es.eigenvectors().col(i).dot(z * es.eigenvectors().col(i));
            }
        }
        if (finite_difference_d1) {
            // common-random-number two-sided difference
            double jp = 0, jm = 0;
            Eigen::MatrixXd mp = (delta + h) * z;
            mp.diagonal() += target_eigs;
            Eigen::MatrixXd mm = (delta - h) * z;
            mm.diagonal() += target_eigs;
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ep(mp, Eigen::EigenvaluesOnly);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> em(mm, Eigen::EigenvaluesOnly);
            for (int i = 0; i < d; ++i) {
                const double rp = ep.eigenvalues()[i] - b;
                const double rm = em.eigenvalues()[i] - b;
                if (rp > 0) jp += rp * rp;
                if (rm > 0) jm += rm * rm;
            }
            d1 = (jp - jm) / (2.0 * h * d);
        }
        out.j += j / d;
        out.d1 += finite_difference_d1 ? d1 : 2.0 * d1 / d;
        out.d2 += -2.0 * d2 / d;
    }
    out.j /= draws;
    out.d1 /= draws;
    out.d2 /= draws;
    return out;
}

}  // namespace slab
