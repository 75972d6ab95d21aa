// Command-line front end: generation, solvers, state evolution, spectra,
// rates, sweeps and plot-data emission.

#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "scalinglab/gamp.hpp"
#include "scalinglab/parallel.hpp"
#include "scalinglab/harness/plotdata.hpp"
#include "scalinglab/harness/sweep.hpp"
#include "scalinglab/lasso.hpp"
#include "scalinglab/matrix_sensing.hpp"
#include "scalinglab/rates.hpp"
#include "scalinglab/spectra.hpp"
#include "scalinglab/state_evolution.hpp"
#include "scalinglab/two_layer.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerics = 3;
constexpr int kExitPartial = 4;

struct SpecFlags {
    std::string model = "diagonal";
    int d = 100;
    std::int64_t n = 200;
    double gamma = 1.0;
    double delta = 0.5;
    double lambda = 1.0;
    std::uint64_t seed = 0;
    std::string config;

    void attach(CLI::App* app) {
        app->add_option("--model", model, "diagonal|quadratic");
        app->add_option("--d", d);
        app->add_option("--n", n);
        app->add_option("--gamma", gamma);
        app->add_option("--delta", delta);
        app->add_option("--lambda", lambda, "theory-units regularization");
        app->add_option("--seed", seed);
        app->add_option("--config", config, "config file overriding the flags");
    }

    slab::ProblemSpec spec() const {
        slab::ProblemSpec s;
        if (!config.empty()) {
            auto cfg = slab::harness::ConfigFile::parse_file(config);
            const std::string m = cfg.get_string("base", "model", model);
            s.model = m == "quadratic" ? slab::Model::Quadratic : slab::Model::Diagonal;
            s.d = int(cfg.get_number("base", "d", d));
            s.n = std::int64_t(cfg.get_number("base", "n", double(n)));
            s.gamma = cfg.get_number("base", "gamma", gamma);
            s.delta = cfg.get_number("base", "delta", delta);
            s.lambda = cfg.get_number("base", "lambda", lambda);
            s.seed = std::uint64_t(cfg.get_number("base", "seed", double(seed)));
        } else {
            s.model = model == "quadratic" ? slab::Model::Quadratic : slab::Model::Diagonal;
            s.d = d;
            s.n = n;
            s.gamma = gamma;
            s.delta = delta;
            s.lambda = lambda;
            s.seed = seed;
        }
        s.validate();
        return s;
    }
};

void write_out(const json& j, const std::string& out) {
    if (out.empty()) {
        std::cout << j.dump(2) << std::endl;
    } else {
        std::ofstream f(out);
        f << j.dump(2) << "\n";
    }
}

json estimate_summary(const slab::VectorEstimate& est) {
    return json{{"objective", est.objective},
                {"kkt_residual", est.kkt_residual},
                {"iterations", est.iterations},
                {"support_size", est.support_size},
                {"converged", est.converged}};
}

json estimate_summary(const slab::MatrixEstimate& est) {
    return json{{"objective", est.objective},
                {"opt_residual", est.opt_residual},
                {"iterations", est.iterations},
                {"rank", est.rank},
                {"converged", est.converged}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"scaling-law laboratory for diagonal and quadratic networks"};
    app.require_subcommand(1);

    SpecFlags flags;
    std::string out, format = "jsonl";
    int workers = 0;
    app.add_option("--out", out, "output path (default: stdout)");
    app.add_option("--workers", workers, "worker threads (env SCALINGLAB_WORKERS, then hardware)");
    app.add_option("--format", format)->check(CLI::IsMember({"jsonl", "csv"}));

    auto* c_gen = app.add_subcommand("gen", "generate a teacher/dataset and print summary stats");
    auto* c_solve = app.add_subcommand("solve", "run the convex solver (lasso or matrix sensing)");
    auto* c_gamp = app.add_subcommand("gamp", "run the message-passing solver");
    auto* c_se = app.add_subcommand("se", "state-evolution risk prediction");
    auto* c_bayes = app.add_subcommand("bayes", "Bayes-optimal risk (exact posterior or SE)");
    auto* c_spectra = app.add_subcommand("spectra", "predicted vs empirical spectrum");
    auto* c_decomp = app.add_subcommand("decompose", "risk decomposition at the SE point");
    auto* c_rates = app.add_subcommand("rates", "phase classification and rate formulas");
    auto* c_sweep = app.add_subcommand("sweep", "run a config-driven sweep");
    auto* c_plot = app.add_subcommand("plotdata", "tidy CSV from sweep records");

    for (auto* c : {c_gen, c_solve, c_gamp, c_se, c_bayes, c_spectra, c_decomp, c_rates})
        flags.attach(c);

    int mc_draws = 10;
    std::uint64_t mc_seed = 1;
    for (auto* c : {c_se, c_bayes, c_spectra, c_decomp}) {
        c->add_option("--mc-draws", mc_draws);
        c->add_option("--mc-seed", mc_seed);
    }

    std::string sweep_config;
    c_sweep->add_option("--config", sweep_config, "sweep config file")->required();
    c_sweep->add_option("--workers", workers);

    std::string plot_kind = "risk_vs_n", plot_in;
    c_plot->add_option("--kind", plot_kind);
    c_plot->add_option("--records", plot_in, "JSONL records path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        slab::MCConfig mc;
        mc.draws = mc_draws;
        mc.seed = mc_seed;
        mc.workers = slab::default_workers(workers);

        if (c_gen->parsed()) {
            const auto spec = flags.spec();
            json j{{"model", slab::to_string(spec.model)}, {"d", spec.d}, {"n", spec.n},
                   {"gamma", spec.gamma}, {"delta", spec.delta}, {"lambda", spec.lambda},
                   {"seed", spec.seed}};
            if (spec.model == slab::Model::Diagonal) {
                auto t = slab::gen_diagonal_target(spec);
                auto data = slab::gen_dataset(spec, t);
                j["theta_norm2_over_d"] = t.theta_star.squaredNorm() / spec.d;
                j["label_variance"] = (data.labels.array() - data.labels.mean()).square().sum() / spec.n;
            } else {
                auto t = slab::gen_quadratic_target(spec);
                auto data = slab::gen_dataset(spec, t);
                j["q_star"] = slab::q_star(spec.d, spec.gamma);
                j["top_eig"] = t.eigvals[0];
                j["label_variance"] = (data.labels.array() - data.labels.mean()).square().sum() / spec.n;
            }
            write_out(j, out);
        } else if (c_solve->parsed() || c_gamp->parsed()) {
            const auto spec = flags.spec();
            const bool use_gamp = c_gamp->parsed();
            json j;
            if (spec.model == slab::Model::Diagonal) {
                auto t = slab::gen_diagonal_target(spec);
                auto data = slab::gen_dataset(spec, t);
                slab::VectorEstimate est = use_gamp ? slab::gamp_lasso(data, spec.lambda).first
                                                    : slab::solve_lasso(data, spec.lambda);
                j = estimate_summary(est);
                j["risk"] = slab::excess_risk(est.theta_hat, t);
                if (!est.converged) {
                    write_out(j, out);
                    return kExitNumerics;
                }
            } else {
                auto t = slab::gen_quadratic_target(spec);
                auto data = slab::gen_dataset(spec, t);
                const double lam = spec.matrix_lambda();
                slab::MatrixEstimate est;
                if (use_gamp) {
                    est = slab::gamp_matrix(data, lam).first;
                } else {
                    slab::MatrixSensingOptions o;
                    o.tol = 1e-6;
                    est = slab::solve_matrix_sensing(data, lam, o);
                }
                j = estimate_summary(est);
                j["risk"] = slab::excess_risk(est.s_hat, t);
                j["lambda_objective"] = lam;
                if (!est.converged) {
                    write_out(j, out);
                    return kExitNumerics;
                }
            }
            write_out(j, out);
        } else if (c_se->parsed()) {
            const auto spec = flags.spec();
            json j;
            if (spec.model == slab::Model::Diagonal) {
                auto se = slab::se_lasso(spec);
                j = {{"nu", se.nu}, {"delta_hat", se.delta_hat}, {"risk", se.risk},
                     {"residual", se.residual}, {"iterations", se.iterations},
                     {"converged", se.converged}};
                if (!se.converged) {
                    write_out(j, out);
                    return kExitNumerics;
                }
            } else {
                auto t = slab::gen_quadratic_target(spec);
                auto se = slab::se_quadratic_erm(spec, t, mc);
                j = {{"delta", se.delta}, {"eps", se.eps}, {"risk", se.risk},
                     {"risk_excess_units", se.excess_risk_units()}, {"mc_stderr", se.mc_stderr},
                     {"iterations", se.iterations}, {"converged", se.converged}};
                if (!se.converged) {
                    write_out(j, out);
                    return kExitNumerics;
                }
            }
            write_out(j, out);
        } else if (c_bayes->parsed()) {
            const auto spec = flags.spec();
            json j;
            if (spec.model == slab::Model::Diagonal) {
                auto se = slab::se_bayes_diagonal(spec);
                j = {{"risk_se", se.risk}, {"q_hat", se.q_hat}};
                auto t = slab::gen_diagonal_target(spec);
                auto data = slab::gen_dataset(spec, t);
                auto est = slab::bayes_posterior_mean(data, t.lambda_diag, spec.delta);
                j["posterior_risk"] = est.posterior_risk;
                j["risk_sim"] = slab::excess_risk(est.theta_hat, t);
            } else {
                auto t = slab::gen_quadratic_target(spec);
                auto se = slab::se_quadratic_bayes(spec, t, mc);
                j = {{"risk_se", se.risk}, {"risk_excess_units", 2.0 * se.risk},
                     {"q_hat", se.q_hat}, {"converged", se.converged}};
            }
            write_out(j, out);
        } else if (c_spectra->parsed()) {
            const auto spec = flags.spec();
            const std::string base = out.empty() ? "spectrum" : out;
            slab::SpectrumOptions sopt;
            sopt.seed = mc_seed;
            json j;
            if (spec.model == slab::Model::Diagonal) {
                auto t = slab::gen_diagonal_target(spec);
                auto data = slab::gen_dataset(spec, t);
                auto se = slab::se_lasso(spec);
                auto pred = slab::predict_spectrum_diagonal(se, t, spec, sopt);
                auto est = slab::solve_lasso(data, spec.lambda);
                auto emp = slab::empirical_spectrum(est.theta_hat, pred.sampled.edges.tail(1)[0]);
                slab::write_spectrum_csv(base + "_pred.csv", pred.sampled);
                slab::write_spectrum_csv(base + "_emp.csv", emp);
                slab::write_spectrum_sidecar(base + ".json", pred);
                j = {{"ks", slab::spectrum_ks(pred, est.theta_hat)},
                     {"zero_mass_pred", pred.zero_mass}, {"zero_mass_emp", emp.zero_mass}};
            } else {
                auto t = slab::gen_quadratic_target(spec);
                auto data = slab::gen_dataset(spec, t);
                auto se = slab::se_quadratic_erm(spec, t, mc);
                auto pred = slab::predict_spectrum_quadratic(se, t, spec, sopt);
                slab::MatrixSensingOptions o;
                o.tol = 1e-6;
                auto est = slab::solve_matrix_sensing(data, spec.matrix_lambda(), o);
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(est.s_hat, Eigen::EigenvaluesOnly);
                auto emp = slab::empirical_spectrum(es.eigenvalues(), pred.sampled.edges.tail(1)[0]);
                slab::write_spectrum_csv(base + "_pred.csv", pred.sampled);
                slab::write_spectrum_csv(base + "_emp.csv", emp);
                slab::write_spectrum_sidecar(base + ".json", pred);
                j = {{"ks", slab::spectrum_ks(pred, es.eigenvalues())},
                     {"zero_mass_pred", pred.zero_mass}, {"zero_mass_emp", emp.zero_mass}};
            }
            std::cout << j.dump(2) << std::endl;
        } else if (c_decomp->parsed()) {
            const auto spec = flags.spec();
            if (spec.model != slab::Model::Quadratic)
                throw slab::SpecError("decompose: quadratic model only");
            auto t = slab::gen_quadratic_target(spec);
            auto se = slab::se_quadratic_erm(spec, t, mc);
            auto dec = slab::decompose_error(se, t, spec);
            json j{{"overfitting", dec.overfitting},
                   {"underfitting", dec.underfitting},
                   {"approximation", dec.approximation},
                   {"cutoff_k", dec.cutoff_k},
                   {"regime", dec.regime == slab::Regime::UnderRegularized ? "under" : "over"},
                   {"total", dec.total()},
                   {"se_risk", se.risk}};
            write_out(j, out);
        } else if (c_rates->parsed()) {
            const auto spec = flags.spec();
            auto rep = slab::classify(spec);
            auto bo = slab::bo_rate(spec);
            auto lo = slab::lambda_opt(spec);
            json j{{"phase", slab::to_string(rep.phase)},
                   {"n_eff", rep.n_eff},
                   {"rate_formula", rep.rate_formula},
                   {"rate_exponents", rep.rate_exponents},
                   {"constant_source", rep.constant_source},
                   {"n_cross", slab::n_cross(spec)},
                   {"lambda_opt", lo.value},
                   {"lambda_opt_up_to_logs", lo.up_to_logs},
                   {"bo_phase", slab::to_string(bo.phase)},
                   {"bo_formula", bo.rate_formula}};
            if (std::isfinite(rep.predicted_risk)) j["predicted_risk"] = rep.predicted_risk;
            write_out(j, out);
        } else if (c_sweep->parsed()) {
            auto cfg = slab::harness::SweepConfig::from_config(
                slab::harness::ConfigFile::parse_file(sweep_config));
            if (workers > 0) cfg.workers = workers;
            auto sum = slab::harness::run_sweep(cfg);
            json j{{"completed", sum.completed}, {"failed", sum.failed}, {"skipped", sum.skipped},
                   {"outputs", cfg.outputs}};
            std::cout << j.dump(2) << std::endl;
            if (sum.failed > 0) return kExitPartial;
        } else if (c_plot->parsed()) {
            auto records = slab::harness::read_jsonl(plot_in);
            const std::string dest = out.empty() ? "plot.csv" : out;
            slab::harness::emit_plotdata(records, slab::harness::parse_plot_kind(plot_kind), dest);
            std::cout << json{{"rows_in", records.size()}, {"out", dest}}.dump(2) << std::endl;
        }
    } catch (const slab::SpecError& e) {
        std::cerr << "config error: " << e.what() << std::endl;
        return kExitConfig;
    } catch (const slab::RegimeError& e) {
        std::cerr << "regime error: " << e.what() << std::endl;
        return kExitConfig;
    } catch (const slab::NumericsError& e) {
        std::cerr << "numerical error: " << e.what() << std::endl;
        return kExitNumerics;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return kExitConfig;
    }
    return kExitOk;
}
