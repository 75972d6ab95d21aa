#include "scalinglab/harness/records.hpp"

#include <fstream>

namespace slab::harness {

nlohmann::json ResultRecord::to_json() const {
    nlohmann::json j;
    j["schema_version"] = schema_version;
    j["task_hash"] = task_hash;
    j["model"] = model;
    j["d"] = d;
    j["n"] = n;
    j["gamma"] = gamma;
    j["delta"] = delta;
    j["lambda"] = lambda;
    j["solver"] = solver;
    j["seed"] = seed;
    j["task_seed"] = task_seed;
    j["risk_sim"] = risk_sim;
    j["risk_se"] = risk_se;
    j["risk_bo"] = risk_bo;
    j["phase"] = phase;
    j["rate_exponent"] = rate_exponent;
    j["kkt_residual"] = kkt_residual;
    j["wall_time_ms"] = wall_time_ms;
    j["estimate_hash"] = estimate_hash;
    if (!error.empty()) j["error"] = error;
    if (!spectrum.empty()) {
        auto& s = j["spectrum"] = nlohmann::json::array();
        for (const auto& row : spectrum) s.push_back({row[0], row[1], row[2]});
    }
    return j;
}

ResultRecord ResultRecord::from_json(const nlohmann::json& j) {
    ResultRecord r;
    r.schema_version = j.value("schema_version", "0.0");
    const int major = std::atoi(r.schema_version.c_str());
    if (major != kSchemaMajor)
        throw std::runtime_error("records: unknown schema major in '" + r.schema_version + "'");
    r.task_hash = j.value("task_hash", 0ULL);
    r.model = j.value("model", "");
    r.d = j.value("d", 0);
    r.n = j.value("n", std::int64_t(0));
    r.gamma = j.value("gamma", 0.0);
    r.delta = j.value("delta", 0.0);
    r.lambda = j.value("lambda", 0.0);
    r.solver = j.value("solver", "");
    r.seed = j.value("seed", 0ULL);
    r.task_seed = j.value("task_seed", 0ULL);
    r.risk_sim = j.value("risk_sim", -1.0);
    r.risk_se = j.value("risk_se", -1.0);
    r.risk_bo = j.value("risk_bo", -1.0);
    r.phase = j.value("phase", "");
    r.rate_exponent = j.value("rate_exponent", 0.0);
    r.kkt_residual = j.value("kkt_residual", -1.0);
    r.wall_time_ms = j.value("wall_time_ms", 0.0);
    r.estimate_hash = j.value("estimate_hash", 0ULL);
    r.error = j.value("error", "");
    if (j.contains("spectrum")) {
        for (const auto& row : j["spectrum"])
            r.spectrum.push_back({row[0].get<double>(), row[1].get<double>(), row[2].get<double>()});
    }
    return r;
}

void append_jsonl(const std::string& path, const nlohmann::json& j) {
    std::ofstream f(path, std::ios::app);
    if (!f) throw std::runtime_error("records: cannot open " + path);
    f << j.dump() << "\n";
}

std::vector<ResultRecord> read_jsonl(const std::string& path) {
    std::vector<ResultRecord> out;
    std::ifstream f(path);
    if (!f) return out;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        out.push_back(ResultRecord::from_json(nlohmann::json::parse(line)));
    }
    return out;
}

}  // namespace slab::harness
