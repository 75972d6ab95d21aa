#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "scalinglab/types.hpp"

namespace slab::harness {

inline constexpr int kSchemaMajor = 1;
inline constexpr const char* kSchemaVersion = "1.0";

/// One sweep task result; self-describing, nothing external needed to re-plot.
struct ResultRecord {
    std::string schema_version = kSchemaVersion;
    std::uint64_t task_hash = 0;
    // flattened config
    std::string model;
    int d = 0;
    std::int64_t n = 0;
    double gamma = 0.0;
    double delta = 0.0;
    double lambda = 0.0;
    std::string solver;
    std::uint64_t seed = 0;        // replicate seed index
    std::uint64_t task_seed = 0;   // derived instance seed
    // outcomes
    double risk_sim = -1.0;
    double risk_se = -1.0;         // excess-risk units (quadratic SE risk doubled)
    double risk_bo = -1.0;
    std::string phase;
    double rate_exponent = 0.0;
    double kkt_residual = -1.0;
    double wall_time_ms = 0.0;
    std::uint64_t estimate_hash = 0;
    std::string error;             // non-empty for failed tasks
    // optional embedded spectrum rows (bin_left, bin_right, mass)
    std::vector<std::array<double, 3>> spectrum;

    nlohmann::json to_json() const;
    static ResultRecord from_json(const nlohmann::json& j);
};

void append_jsonl(const std::string& path, const nlohmann::json& j);
std::vector<ResultRecord> read_jsonl(const std::string& path);  // rejects unknown schema majors

}  // namespace slab::harness
