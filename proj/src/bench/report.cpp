#include "knodest/bench/report.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace knodest::bench {

namespace fs = std::filesystem;

namespace {

constexpr const char* kSummaryMagic = "# knodest-summary v1";
constexpr const char* kSummaryHeader = "scenario,method,seed,mse,steps,diverged,stalled_steps";
constexpr const char* kTimingsMagic = "# knodest-timings v1 (wall-clock; not reproducible)";
constexpr const char* kTimingsHeader =
    "scenario,method,seed,wall_ms,max_step_ms,budget_exceeded";
constexpr const char* kAggregateMagic = "# knodest-aggregate v1";
constexpr const char* kAggregateHeader =
    "scenario,method,runs,diverged,mse_mean,mse_std,mse_median";

int method_rank(const std::string& name) {
    const auto& methods = all_methods();
    for (std::size_t i = 0; i < methods.size(); ++i) {
        if (methods[i].name == name) return static_cast<int>(i);
    }
    return static_cast<int>(methods.size());
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    return cells;
}

}  // namespace

void write_summary_csv(const std::string& path, const std::vector<RunResult>& results) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw Error("write_summary_csv: cannot open " + path);
    std::fprintf(f, "%s\n%s\n", kSummaryMagic, kSummaryHeader);
    for (const auto& r : results) {
        std::fprintf(f, "%s,%s,%" PRIu64 ",%.17g,%d,%d,%d\n", r.scenario_id.c_str(),
                     r.method.c_str(), r.seed, r.mse, r.steps, r.diverged ? 1 : 0,
                     r.stalled_steps);
    }
    std::fclose(f);
}

std::vector<RunResult> read_summary_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("read_summary_csv: cannot open " + path);
    std::string line;
    int line_no = 0;
    if (!std::getline(in, line) || line != kSummaryMagic) {
        throw ParseError(path + ":1: not a summary file (bad magic)");
    }
    ++line_no;
    if (!std::getline(in, line) || line != kSummaryHeader) {
        throw ParseError(path + ":2: unexpected summary schema: " + line);
    }
    ++line_no;

    std::vector<RunResult> out;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto cells = split_csv(line);
        if (cells.size() != 7) {
            throw ParseError(path + ":" + std::to_string(line_no) + ": expected 7 columns, got " +
                             std::to_string(cells.size()));
        }
        RunResult r;
        r.scenario_id = cells[0];
        r.method = cells[1];
        try {
            r.seed = std::stoull(cells[2]);
            r.mse = std::stod(cells[3]);
            r.steps = std::stoi(cells[4]);
            r.diverged = std::stoi(cells[5]) != 0;
            r.stalled_steps = std::stoi(cells[6]);
        } catch (const std::exception&) {
            throw ParseError(path + ":" + std::to_string(line_no) + ": malformed numeric field");
        }
        out.push_back(std::move(r));
    }
    return out;
}

void write_timings_csv(const std::string& path, const std::vector<RunResult>& results) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw Error("write_timings_csv: cannot open " + path);
    std::fprintf(f, "%s\n%s\n", kTimingsMagic, kTimingsHeader);
    for (const auto& r : results) {
        std::fprintf(f, "%s,%s,%" PRIu64 ",%.3f,%.3f,%d\n", r.scenario_id.c_str(),
                     r.method.c_str(), r.seed, r.wall_ms, r.max_step_ms,
                     r.budget_exceeded ? 1 : 0);
    }
    std::fclose(f);
}

std::vector<AggregateRow> aggregate_results(const std::vector<RunResult>& results) {
    std::map<std::pair<std::string, std::string>, std::vector<const RunResult*>> groups;
    for (const auto& r : results) groups[{r.scenario_id, r.method}].push_back(&r);

    std::vector<AggregateRow> rows;
    rows.reserve(groups.size());
    for (const auto& [key, runs] : groups) {
        AggregateRow row;
        row.scenario_id = key.first;
        row.method = key.second;
        std::vector<double> mses;
        for (const RunResult* r : runs) {
            if (r->diverged) {
                ++row.diverged;
            } else {
                mses.push_back(r->mse);
            }
        }
        row.runs = static_cast<int>(mses.size());
        row.stats = aggregate(std::move(mses));
        rows.push_back(std::move(row));
    }
    std::sort(rows.begin(), rows.end(), [](const AggregateRow& a, const AggregateRow& b) {
        if (a.scenario_id != b.scenario_id) return a.scenario_id < b.scenario_id;
        return method_rank(a.method) < method_rank(b.method);
    });
    return rows;
}

void write_aggregate_csv(const std::string& path, const std::vector<AggregateRow>& rows) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw Error("write_aggregate_csv: cannot open " + path);
    std::fprintf(f, "%s\n%s\n", kAggregateMagic, kAggregateHeader);
    for (const auto& row : rows) {
        std::fprintf(f, "%s,%s,%d,%d,%.17g,%.17g,%.17g\n", row.scenario_id.c_str(),
                     row.method.c_str(), row.runs, row.diverged, row.stats.mean,
                     row.stats.stddev, row.stats.median);
    }
    std::fclose(f);
}

std::vector<RunResult> read_summary_dir(const std::string& dir) {
    const fs::path base = fs::path(dir) / "summary";
    if (!fs::is_directory(base)) {
        throw Error("read_summary_dir: no summary directory under " + dir);
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(base)) {
        if (entry.is_regular_file() && entry.path().extension() == ".csv") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    std::vector<RunResult> out;
    for (const auto& file : files) {
        const auto rows = read_summary_csv(file.string());
        out.insert(out.end(), rows.begin(), rows.end());
    }
    if (out.empty()) throw Error("read_summary_dir: no summary rows under " + dir);
    return out;
}

}  // namespace knodest::bench
