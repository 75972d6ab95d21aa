#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "scalinglab/harness/plotdata.hpp"
#include "scalinglab/harness/sweep.hpp"

using namespace slab;
using namespace slab::harness;

namespace {

std::string tmp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

SweepConfig small_sweep(const std::string& out) {
    SweepConfig cfg;
    cfg.base.model = Model::Diagonal;
    cfg.base.d = 24;
    cfg.base.gamma = 1.0;
    cfg.base.delta = 0.5;
    cfg.base.seed = 5;
    cfg.n_grid = {40, 80};
    cfg.lambda_grid = {0.5, 1.0};
    cfg.seeds = {0, 1};
    cfg.solvers = {"lasso"};
    cfg.se = {"lasso", "bayes_diag"};
    cfg.outputs = out;
    cfg.workers = 2;
    return cfg;
}

}  // namespace

TEST_CASE("config parser handles sections, lists, comments") {
    const auto cfg = ConfigFile::parse_string(R"(
# sweep definition
[base]
model = quadratic
d = 100
lambda = 0.5

[grid]
n = [10, 20, 30]

[sweep]
solvers = [matrix]
outputs = "runs/out.jsonl"
resume = true
)");
    CHECK(cfg.get_string("base", "model") == "quadratic");
    CHECK(cfg.get_number("base", "d") == 100);
    CHECK(cfg.get_number_list("grid", "n") == std::vector<double>{10, 20, 30});
    CHECK(cfg.get_string("sweep", "outputs") == "runs/out.jsonl");
    CHECK(cfg.get_bool("sweep", "resume", false));
    CHECK_FALSE(cfg.has("sweep", "workers"));
    CHECK_THROWS(cfg.get_number("base", "model"));
}

TEST_CASE("empty seed list produces zero records and succeeds") {
    const std::string out = tmp_path("slab_empty.jsonl");
    std::remove(out.c_str());
    auto cfg = small_sweep(out);
    cfg.seeds.clear();
    const auto sum = run_sweep(cfg);
    CHECK(sum.completed == 0);
    CHECK(sum.failed == 0);
    CHECK(read_jsonl(out).empty());
}

TEST_CASE("sweep is idempotent under reruns (hash resume)") {
    const std::string out = tmp_path("slab_resume.jsonl");
    std::remove(out.c_str());
    auto cfg = small_sweep(out);
    const auto first = run_sweep(cfg);
    CHECK(first.completed == 8);
    const auto again = run_sweep(cfg);
    CHECK(again.skipped == 8);
    CHECK(again.completed == 0);
    CHECK(read_jsonl(out).size() == 8);
}

TEST_CASE("records are independent of the worker count") {
    const std::string out1 = tmp_path("slab_w1.jsonl");
    const std::string out4 = tmp_path("slab_w4.jsonl");
    std::remove(out1.c_str());
    std::remove(out4.c_str());
    auto cfg1 = small_sweep(out1);
    cfg1.workers = 1;
    auto cfg4 = small_sweep(out4);
    cfg4.workers = 4;
    run_sweep(cfg1);
    run_sweep(cfg4);
    const auto a = read_jsonl(out1);
    const auto b = read_jsonl(out4);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].task_hash == b[i].task_hash);  // same order, same tasks
        CHECK(a[i].risk_sim == b[i].risk_sim);
        CHECK(a[i].risk_se == b[i].risk_se);
        CHECK(a[i].estimate_hash == b[i].estimate_hash);
    }
}

TEST_CASE("schema major is enforced on read") {
    const std::string out = tmp_path("slab_schema.jsonl");
    {
        std::ofstream f(out);
        f << R"({"schema_version":"2.0","task_hash":1})" << "\n";
    }
    CHECK_THROWS(read_jsonl(out));
}

TEST_CASE("incompatible solver/model pairs are rejected") {
    auto cfg = small_sweep(tmp_path("slab_bad.jsonl"));
    cfg.solvers = {"matrix"};
    CHECK_THROWS(run_sweep(cfg));
    cfg.solvers = {"nonsense"};
    CHECK_THROWS(run_sweep(cfg));
}

TEST_CASE("plotdata: empty records give a header-only CSV") {
    const std::string out = tmp_path("slab_plot_empty.csv");
    emit_plotdata({}, PlotKind::RiskVsN, out);
    std::ifstream f(out);
    std::string line;
    REQUIRE(std::getline(f, line));
    CHECK(line.find("series,x") == 0);
    CHECK_FALSE(std::getline(f, line));
    CHECK_THROWS(parse_plot_kind("nope"));
}

TEST_CASE("plotdata aggregates seeds per series point") {
    const std::string out = tmp_path("slab_sw_plot.jsonl");
    std::remove(out.c_str());
    auto cfg = small_sweep(out);
    run_sweep(cfg);
    const std::string csv = tmp_path("slab_plot.csv");
    emit_plotdata(read_jsonl(out), PlotKind::RiskVsN, csv);
    std::ifstream f(csv);
    std::string line;
    int rows = 0;
    while (std::getline(f, line)) ++rows;
    CHECK(rows == 1 + 4);  // header + 2 n-points x 2 lambda series
}
