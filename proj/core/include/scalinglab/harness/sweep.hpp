#pragma once

#include <set>

#include "scalinglab/harness/config.hpp"
#include "scalinglab/harness/records.hpp"
#include "scalinglab/types.hpp"

namespace slab::harness {

struct SweepConfig {
    ProblemSpec base;
    std::vector<std::int64_t> n_grid;
    std::vector<int> d_grid;
    std::vector<double> lambda_grid;
    std::vector<double> gamma_grid;
    std::vector<double> delta_grid;
    std::vector<std::uint64_t> seeds;
    std::vector<std::string> solvers;  // lasso | matrix | gamp_lasso | gamp_matrix | bayes_exact
    std::vector<std::string> se;       // lasso | bayes_diag | quad_erm | quad_bayes
    std::string outputs = "results.jsonl";
    int workers = 0;
    MCConfig mc;

    static SweepConfig from_config(const ConfigFile& cfg);
    void validate() const;
};

struct SweepSummary {
    std::int64_t completed = 0;
    std::int64_t failed = 0;
    std::int64_t skipped = 0;  // resume hits
};

/// Executes grid x seeds x solvers tasks on a worker pool, appending one
/// record per task to the JSONL output in deterministic task order. Tasks
/// whose hash already appears in the output file are skipped (idempotent
/// resume); per-task failures become error records and the sweep continues.
SweepSummary run_sweep(const SweepConfig& cfg);

/// Deterministic instance seed for a grid task.
std::uint64_t task_seed(std::uint64_t base_seed, int d, std::int64_t n, double lambda, double gamma,
                        double delta, std::uint64_t replicate);

}  // namespace slab::harness
