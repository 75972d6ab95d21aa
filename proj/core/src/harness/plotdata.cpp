#include "scalinglab/harness/plotdata.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

namespace slab::harness {

PlotKind parse_plot_kind(const std::string& s) {
    if (s == "risk_vs_n") return PlotKind::RiskVsN;
    if (s == "risk_vs_lambda") return PlotKind::RiskVsLambda;
    if (s == "spectrum") return PlotKind::Spectrum;
    throw std::runtime_error("plotdata: unknown kind '" + s + "'");
}

namespace {

struct Agg {
    std::vector<double> risks;
    double risk_se = -1.0;
    double risk_bo = -1.0;
    std::string phase;
    double rate_exponent = 0.0;
};

double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / v.size();
}

double stderr_of(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean(v);
    double acc = 0.0;
    for (double x : v) acc += (x - m) * (x - m);
    return std::sqrt(acc / (v.size() - 1) / v.size());
}

}  // namespace

void emit_plotdata(const std::vector<ResultRecord>& records, PlotKind kind,
                   const std::string& out_csv) {
    std::ofstream f(out_csv);
    if (!f) throw std::runtime_error("plotdata: cannot open " + out_csv);

    if (kind == PlotKind::Spectrum) {
        f << "series,bin_left,bin_right,mass\n";
        for (const auto& r : records) {
            if (r.spectrum.empty()) continue;
            const std::string series = r.model + "/d=" + std::to_string(r.d) +
                                       "/n=" + std::to_string(r.n) + "/" + r.solver;
            for (const auto& row : r.spectrum)
                f << series << "," << row[0] << "," << row[1] << "," << row[2] << "\n";
        }
        return;
    }

    f << "series,x,risk_sim,risk_sim_stderr,risk_se,risk_bo,phase,rate_exponent,rate_guide\n";
    // series key: everything except the x variable and the seed
    std::map<std::string, std::map<double, Agg>> table;
    for (const auto& r : records) {
        if (!r.error.empty() || r.risk_sim < 0) continue;
        const double neff = r.model == "quadratic" ? double(r.n) / r.d : double(r.n);
        const double x = kind == PlotKind::RiskVsN ? neff : r.lambda;
        std::string series = r.model + "/" + r.solver + "/d=" + std::to_string(r.d) +
                             "/g=" + std::to_string(r.gamma);
        if (kind == PlotKind::RiskVsN)
            series += "/lam=" + std::to_string(r.lambda);
        else
            series += "/n=" + std::to_string(r.n);
        Agg& a = table[series][x];
        a.risks.push_back(r.risk_sim);
        a.risk_se = r.risk_se;
        a.risk_bo = r.risk_bo;
        a.phase = r.phase;
        a.rate_exponent = r.rate_exponent;
    }
    for (const auto& [series, pts] : table) {
        double anchor_x = 0.0, anchor_y = 0.0;
        bool have_anchor = false;
        for (const auto& [x, a] : pts) {
            if (!have_anchor && !a.risks.empty()) {
                anchor_x = x;
                anchor_y = mean(a.risks);
                have_anchor = true;
            }
            // Rate guide: anchored power law with the phase exponent; only x
            // exponents make sense per-kind.
            double guide = std::numeric_limits<double>::quiet_NaN();
            if (have_anchor && kind == PlotKind::RiskVsN && a.rate_exponent != 0.0)
                guide = anchor_y * std::pow(x / anchor_x, a.rate_exponent);
            f << series << "," << x << "," << mean(a.risks) << "," << stderr_of(a.risks) << ","
              << a.risk_se << "," << a.risk_bo << "," << a.phase << "," << a.rate_exponent << ","
              << guide << "\n";
        }
    }
}

}  // namespace slab::harness
