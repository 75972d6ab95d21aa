#include "scalinglab/harness/sweep.hpp"

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstring>
#include <map>
#include <mutex>
#include <thread>

#include "scalinglab/gamp.hpp"
#include "scalinglab/lasso.hpp"
#include "scalinglab/matrix_sensing.hpp"
#include "scalinglab/parallel.hpp"
#include "scalinglab/rates.hpp"
#include "scalinglab/rng.hpp"
#include "scalinglab/state_evolution.hpp"

namespace slab::harness {

namespace {

std::uint64_t hash_double(double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    return mix64(bits);
}

std::uint64_t hash_vector(const double* data, std::int64_t size) {
    std::uint64_t h = 0x2545f4914f6cdd1dULL;
    for (std::int64_t i = 0; i < size; ++i) h = hash_combine(h, hash_double(data[i]));
    return h;
}

struct Task {
    std::int64_t index;
    ProblemSpec spec;
    std::string solver;
    std::uint64_t replicate;
    std::uint64_t hash;
};

struct SEKey {
    int d;
    std::int64_t n;
    double lambda, gamma, delta;
    bool operator<(const SEKey& o) const {
        return std::tie(d, n, lambda, gamma, delta) < std::tie(o.d, o.n, o.lambda, o.gamma, o.delta);
    }
};

}  // namespace

std::uint64_t task_seed(std::uint64_t base_seed, int d, std::int64_t n, double lambda, double gamma,
                        double delta, std::uint64_t replicate) {
    std::uint64_t h = mix64(base_seed);
    h = hash_combine(h, mix64(std::uint64_t(d)));
    h = hash_combine(h, mix64(std::uint64_t(n)));
    h = hash_combine(h, hash_double(lambda));
    h = hash_combine(h, hash_double(gamma));
    h = hash_combine(h, hash_double(delta));
    h = hash_combine(h, mix64(replicate));
    return h;
}

SweepConfig SweepConfig::from_config(const ConfigFile& cfg) {
    SweepConfig sc;
    const std::string model = cfg.get_string("base", "model", std::string("diagonal"));
    if (model == "diagonal") sc.base.model = Model::Diagonal;
    else if (model == "quadratic") sc.base.model = Model::Quadratic;
    else throw std::runtime_error("sweep config: unknown model '" + model + "'");
    sc.base.d = static_cast<int>(cfg.get_number("base", "d", 100));
    sc.base.n = static_cast<std::int64_t>(cfg.get_number("base", "n", 100));
    sc.base.gamma = cfg.get_number("base", "gamma", 1.0);
    sc.base.delta = cfg.get_number("base", "delta", 0.5);
    sc.base.lambda = cfg.get_number("base", "lambda", 1.0);
    sc.base.seed = static_cast<std::uint64_t>(cfg.get_number("base", "seed", 0));

    for (double v : cfg.get_number_list("grid", "n")) sc.n_grid.push_back(std::int64_t(v));
    for (double v : cfg.get_number_list("grid", "d")) sc.d_grid.push_back(int(v));
    sc.lambda_grid = cfg.get_number_list("grid", "lambda");
    sc.gamma_grid = cfg.get_number_list("grid", "gamma");
    sc.delta_grid = cfg.get_number_list("grid", "delta");

    for (double v : cfg.get_number_list("sweep", "seeds")) sc.seeds.push_back(std::uint64_t(v));
    if (sc.seeds.empty() && cfg.has("sweep", "n_seeds")) {
        const int k = int(cfg.get_number("sweep", "n_seeds", 0));
        for (int i = 0; i < k; ++i) sc.seeds.push_back(i);
    }
    sc.solvers = cfg.get_list("sweep", "solvers");
    sc.se = cfg.get_list("sweep", "se");
    sc.outputs = cfg.get_string("sweep", "outputs", std::string("results.jsonl"));
    sc.workers = int(cfg.get_number("sweep", "workers", 0));

    sc.mc.draws = int(cfg.get_number("mc", "draws", 10));
    sc.mc.seed = std::uint64_t(cfg.get_number("mc", "seed", 1));
    sc.mc.tol = cfg.get_number("mc", "tol", 1e-4);
    return sc;
}

void SweepConfig::validate() const {
    const bool diag = base.model == Model::Diagonal;
    for (const auto& s : solvers) {
        const bool vector_solver = s == "lasso" || s == "gamp_lasso" || s == "bayes_exact";
        const bool matrix_solver = s == "matrix" || s == "gamp_matrix";
        if (!vector_solver && !matrix_solver)
            throw std::runtime_error("sweep config: unknown solver '" + s + "'");
        if (diag && matrix_solver)
            throw std::runtime_error("sweep config: solver '" + s + "' incompatible with diagonal model");
        if (!diag && vector_solver)
            throw std::runtime_error("sweep config: solver '" + s + "' incompatible with quadratic model");
    }
    for (const auto& s : se) {
        if (s != "lasso" && s != "bayes_diag" && s != "quad_erm" && s != "quad_bayes")
            throw std::runtime_error("sweep config: unknown se entry '" + s + "'");
        if (diag && (s == "quad_erm" || s == "quad_bayes"))
            throw std::runtime_error("sweep config: se '" + s + "' incompatible with diagonal model");
        if (!diag && (s == "lasso" || s == "bayes_diag"))
            throw std::runtime_error("sweep config: se '" + s + "' incompatible with quadratic model");
    }
}

namespace {

struct SEValues {
    double risk_se = -1.0;
    double risk_bo = -1.0;
};

SEValues compute_se(const ProblemSpec& spec, const std::vector<std::string>& se_list,
                    const MCConfig& mc) {
    SEValues out;
    for (const auto& kind : se_list) {
        if (kind == "lasso") {
            out.risk_se = se_lasso(spec).risk;
        } else if (kind == "bayes_diag") {
            out.risk_bo = se_bayes_diagonal(spec).risk;
        } else if (kind == "quad_erm") {
            QuadraticTarget t = gen_quadratic_target(spec);
            out.risk_se = se_quadratic_erm(spec, t, mc).excess_risk_units();
        } else if (kind == "quad_bayes") {
            QuadraticTarget t = gen_quadratic_target(spec);
            out.risk_bo = 2.0 * se_quadratic_bayes(spec, t, mc).risk;
        }
    }
    return out;
}

ResultRecord run_task(const Task& task, const SweepConfig& cfg, const SEValues& se_vals) {
    const auto t0 = std::chrono::steady_clock::now();
    ResultRecord rec;
    rec.task_hash = task.hash;
    rec.model = to_string(task.spec.model);
    rec.d = task.spec.d;
    rec.n = task.spec.n;
    rec.gamma = task.spec.gamma;
    rec.delta = task.spec.delta;
    rec.lambda = task.spec.lambda;
    rec.solver = task.solver;
    rec.seed = task.replicate;
    rec.task_seed = task.spec.seed;
    rec.risk_se = se_vals.risk_se;
    rec.risk_bo = se_vals.risk_bo;

    try {
        const PhaseReport phase = classify(task.spec);
        rec.phase = to_string(phase.phase);
        const auto it = phase.rate_exponents.find("n_eff");
        rec.rate_exponent = it == phase.rate_exponents.end() ? 0.0 : it->second;
    } catch (const RegimeError&) {
    }

    if (task.spec.model == Model::Diagonal) {
        DiagonalTarget target = gen_diagonal_target(task.spec);
        Dataset data = gen_dataset(task.spec, target);
        VectorEstimate est;
        if (task.solver == "lasso") {
            est = solve_lasso(data, task.spec.lambda);
        } else if (task.solver == "gamp_lasso") {
            est = gamp_lasso(data, task.spec.lambda).first;
        } else {  // bayes_exact
            est = bayes_posterior_mean(data, target.lambda_diag, task.spec.delta);
        }
        rec.risk_sim = excess_risk(est.theta_hat, target);
        rec.kkt_residual = est.kkt_residual;
        rec.estimate_hash = hash_vector(est.theta_hat.data(), est.theta_hat.size());
        if (!est.converged && task.solver != "bayes_exact") rec.error = "non-convergence";
    } else {
        QuadraticTarget target = gen_quadratic_target(task.spec);
        Dataset data = gen_dataset(task.spec, target);
        const double lam_obj = task.spec.matrix_lambda();
        MatrixEstimate est;
        if (task.solver == "matrix") {
            MatrixSensingOptions o;
            o.tol = 1e-6;
            est = solve_matrix_sensing(data, lam_obj, o);
        } else {  // gamp_matrix
            est = gamp_matrix(data, lam_obj).first;
        }
        rec.risk_sim = excess_risk(est.s_hat, target);
        rec.kkt_residual = est.opt_residual;
        rec.estimate_hash = hash_vector(est.s_hat.data(), est.s_hat.size());
        if (!est.converged) rec.error = "non-convergence";
    }

    rec.wall_time_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return rec;
}

}  // namespace

SweepSummary run_sweep(const SweepConfig& cfg) {
    cfg.validate();
    auto or_base = [](auto grid, auto base) {
        if (grid.empty()) grid.push_back(base);
        return grid;
    };
    const auto d_grid = or_base(cfg.d_grid, cfg.base.d);
    const auto n_grid = or_base(cfg.n_grid, cfg.base.n);
    const auto l_grid = or_base(cfg.lambda_grid, cfg.base.lambda);
    const auto g_grid = or_base(cfg.gamma_grid, cfg.base.gamma);
    const auto de_grid = or_base(cfg.delta_grid, cfg.base.delta);

    // resume: collect hashes already in the output
    std::set<std::uint64_t> done;
    for (const auto& rec : read_jsonl(cfg.outputs))
        if (rec.error.empty()) done.insert(rec.task_hash);

    std::vector<Task> tasks;
    std::int64_t index = 0;
    SweepSummary summary;
    for (int d : d_grid)
        for (std::int64_t n : n_grid)
            for (double lam : l_grid)
                for (double g : g_grid)
                    for (double delta : de_grid)
                        for (std::uint64_t rep : cfg.seeds)
                            for (const auto& solver : cfg.solvers) {
                                Task t;
                                t.index = index++;
                                t.spec = cfg.base;
                                t.spec.d = d;
                                t.spec.n = n;
                                t.spec.lambda = lam;
                                t.spec.gamma = g;
                                t.spec.delta = delta;
                                t.spec.seed = task_seed(cfg.base.seed, d, n, lam, g, delta, rep);
                                t.solver = solver;
                                t.replicate = rep;
                                t.hash = hash_combine(t.spec.seed, hash_string(solver));
                                if (done.count(t.hash)) {
                                    ++summary.skipped;
                                    continue;
                                }
                                tasks.push_back(std::move(t));
                            }

    if (tasks.empty()) return summary;

    // SE solutions are seed- and solver-independent; compute once per grid point
    std::map<SEKey, SEValues> se_cache;
    std::mutex se_mutex;
    auto se_for = [&](const ProblemSpec& spec) {
        const SEKey key{spec.d, spec.n, spec.lambda, spec.gamma, spec.delta};
        {
            std::lock_guard<std::mutex> lock(se_mutex);
            const auto it = se_cache.find(key);
            if (it != se_cache.end()) return it->second;
        }
        SEValues vals;
        try {
            vals = compute_se(spec, cfg.se, cfg.mc);
        } catch (const std::exception&) {
            // SE failures leave the sentinel values; solver results still recorded
        }
        std::lock_guard<std::mutex> lock(se_mutex);
        se_cache[key] = vals;
        return vals;
    };

    // ordered writer: results are appended strictly in task order so identical
    // configs produce byte-identical files regardless of worker count
    std::mutex write_mutex;
    std::condition_variable write_cv;
    std::map<std::int64_t, ResultRecord> pending;
    std::size_t next_to_write = 0;
    std::vector<std::int64_t> order(tasks.size());
    for (std::size_t i = 0; i < tasks.size(); ++i) order[i] = tasks[i].index;

    std::atomic<std::size_t> cursor{0};
    std::atomic<std::int64_t> failed{0};
    const int workers = default_workers(cfg.workers);
    auto worker = [&] {
        for (;;) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= tasks.size()) return;
            const Task& task = tasks[i];
            ResultRecord rec;
            try {
                const SEValues se_vals = se_for(task.spec);
                rec = run_task(task, cfg, se_vals);
            } catch (const std::exception& e) {
                rec.task_hash = task.hash;
                rec.model = to_string(task.spec.model);
                rec.d = task.spec.d;
                rec.n = task.spec.n;
                rec.gamma = task.spec.gamma;
                rec.delta = task.spec.delta;
                rec.lambda = task.spec.lambda;
                rec.solver = task.solver;
                rec.seed = task.replicate;
                rec.task_seed = task.spec.seed;
                rec.error = e.what();
            }
            if (!rec.error.empty()) failed.fetch_add(1);
            std::unique_lock<std::mutex> lock(write_mutex);
            pending[static_cast<std::int64_t>(i)] = std::move(rec);
            while (!pending.empty() && pending.begin()->first == static_cast<std::int64_t>(next_to_write)) {
                append_jsonl(cfg.outputs, pending.begin()->second.to_json());
                pending.erase(pending.begin());
                ++next_to_write;
            }
            write_cv.notify_all();
        }
    };

    std::vector<std::thread> pool;
    for (int t = 1; t < workers; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    summary.completed = static_cast<std::int64_t>(tasks.size()) - failed.load();
    summary.failed = failed.load();
    return summary;
}

}  // namespace slab::harness
