#pragma once

#include <string>
#include <vector>

#include "scalinglab/harness/records.hpp"

namespace slab::harness {

enum class PlotKind { RiskVsN, RiskVsLambda, Spectrum };

PlotKind parse_plot_kind(const std::string& s);  // risk_vs_n | risk_vs_lambda | spectrum

/// Tidy CSV: one row per (x, series) point, seeds averaged, plus a rate-guide
/// column from the phase classifier (power law anchored at the first point of
/// each series).
void emit_plotdata(const std::vector<ResultRecord>& records, PlotKind kind,
                   const std::string& out_csv);

}  // namespace slab::harness
