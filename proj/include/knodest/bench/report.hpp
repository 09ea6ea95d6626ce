#pragma once

#include "knodest/bench/experiment.hpp"
#include "knodest/bench/metrics.hpp"

namespace knodest::bench {

/// Deterministic per-run rows (schema "knodest-summary v1").
void write_summary_csv(const std::string& path, const std::vector<RunResult>& results);
std::vector<RunResult> read_summary_csv(const std::string& path);

/// Wall-clock rows, kept out of the summary so report files stay
/// bit-reproducible (schema "knodest-timings v1").
void write_timings_csv(const std::string& path, const std::vector<RunResult>& results);

struct AggregateRow {
    std::string scenario_id;
    std::string method;
    int runs = 0;      // non-diverged runs aggregated
    int diverged = 0;  // excluded from the statistics, reported here
    AggregateStats stats;
};

/// Groups per-run rows by (scenario, method) in canonical method order;
/// diverged runs are excluded from the statistics but counted.
std::vector<AggregateRow> aggregate_results(const std::vector<RunResult>& results);

/// Schema "knodest-aggregate v1".
void write_aggregate_csv(const std::string& path, const std::vector<AggregateRow>& rows);

/// Reads every summary CSV under <dir>/summary.
std::vector<RunResult> read_summary_dir(const std::string& dir);

/// Renders one MSE bar chart (mean +/- std, log scale) and one box plot per
/// scenario as deterministic SVG files under <out_dir>/plots. Medians are
/// embedded as machine-readable comments. Throws on empty input.
void emit_plots(const std::vector<RunResult>& results, const std::string& out_dir);

}  // namespace knodest::bench
