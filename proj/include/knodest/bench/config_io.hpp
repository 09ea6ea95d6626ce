#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "knodest/core.hpp"

namespace knodest::bench {

/// Full benchmark matrix configuration (the `all` command). Serializes to a
/// human-readable JSON file; unknown keys are rejected.
struct BenchConfig {
    std::vector<std::string> scenarios = {"cartpole", "ground_robot"};
    std::vector<std::string> methods;  // empty -> all eight variants
    std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15};
    std::uint64_t train_seed = 1000;
    std::string out_dir = "runs";
    int horizon = 10;
    double arrival_scale = 10.0;
    int burn_in = 50;
    double step_budget_ms = 250.0;
    double learning_rate = 0.01;
    int train_epochs = 0;  // 0 -> per-scenario default
    int hidden = 0;        // 0 -> per-scenario default
    int train_burn_in_skip = 0;
    bool plots = true;
    bool traces = false;
};

std::string to_json(const BenchConfig& config);
BenchConfig bench_config_from_json(const std::string& text);
BenchConfig load_bench_config(const std::string& path);

/// Runs the full matrix: trains each needed artifact once per scenario,
/// evaluates every (scenario, method, seed), and writes summary, timings,
/// aggregate, and plot files under config.out_dir.
void run_all(const BenchConfig& config);

}  // namespace knodest::bench
