#include "knodest/bench/config_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include <json.hpp>

#include "knodest/bench/report.hpp"
#include "knodest/knode/model_io.hpp"

namespace knodest::bench {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string to_json(const BenchConfig& c) {
    json j;
    j["scenarios"] = c.scenarios;
    j["methods"] = c.methods;
    j["seeds"] = c.seeds;
    j["train_seed"] = c.train_seed;
    j["out_dir"] = c.out_dir;
    j["horizon"] = c.horizon;
    j["arrival_scale"] = c.arrival_scale;
    j["burn_in"] = c.burn_in;
    j["step_budget_ms"] = c.step_budget_ms;
    j["learning_rate"] = c.learning_rate;
    j["train_epochs"] = c.train_epochs;
    j["hidden"] = c.hidden;
    j["train_burn_in_skip"] = c.train_burn_in_skip;
    j["plots"] = c.plots;
    j["traces"] = c.traces;
    return j.dump(2) + "\n";
}

BenchConfig bench_config_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("config: ") + e.what());
    }
    if (!j.is_object()) throw ParseError("config: top level must be an object");

    static const std::set<std::string> known = {
        "scenarios",   "methods",        "seeds",       "train_seed",
        "out_dir",     "horizon",        "arrival_scale", "burn_in",
        "step_budget_ms", "learning_rate", "train_epochs", "hidden",
        "train_burn_in_skip", "plots",   "traces"};
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (!known.count(key)) throw ParseError("config: unknown key \"" + key + "\"");
    }

    BenchConfig c;
    try {
        if (j.contains("scenarios")) c.scenarios = j["scenarios"].get<std::vector<std::string>>();
        if (j.contains("methods")) c.methods = j["methods"].get<std::vector<std::string>>();
        if (j.contains("seeds")) c.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
        if (j.contains("train_seed")) c.train_seed = j["train_seed"].get<std::uint64_t>();
        if (j.contains("out_dir")) c.out_dir = j["out_dir"].get<std::string>();
        if (j.contains("horizon")) c.horizon = j["horizon"].get<int>();
        if (j.contains("arrival_scale")) c.arrival_scale = j["arrival_scale"].get<double>();
        if (j.contains("burn_in")) c.burn_in = j["burn_in"].get<int>();
        if (j.contains("step_budget_ms")) c.step_budget_ms = j["step_budget_ms"].get<double>();
        if (j.contains("learning_rate")) c.learning_rate = j["learning_rate"].get<double>();
        if (j.contains("train_epochs")) c.train_epochs = j["train_epochs"].get<int>();
        if (j.contains("hidden")) c.hidden = j["hidden"].get<int>();
        if (j.contains("train_burn_in_skip")) {
            c.train_burn_in_skip = j["train_burn_in_skip"].get<int>();
        }
        if (j.contains("plots")) c.plots = j["plots"].get<bool>();
        if (j.contains("traces")) c.traces = j["traces"].get<bool>();
    } catch (const json::exception& e) {
        throw ParseError(std::string("config: ") + e.what());
    }
    return c;
}

BenchConfig load_bench_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("load_bench_config: cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return bench_config_from_json(text);
}

void run_all(const BenchConfig& config) {
    if (config.seeds.empty()) throw Error("run_all: empty seed list");
    std::vector<Method> methods;
    if (config.methods.empty()) {
        methods = all_methods();
    } else {
        for (const auto& name : config.methods) methods.push_back(parse_method(name));
    }

    std::vector<RunResult> everything;
    for (const auto& scenario_id : config.scenarios) {
        const sim::Scenario scenario = sim::make_scenario(scenario_id);

        ExperimentConfig base;
        base.scenario_id = scenario_id;
        base.seeds = config.seeds;
        base.train_seed = config.train_seed;
        base.out_dir = config.out_dir;
        base.dataset_dir = (fs::path(config.out_dir) / "datasets").string();
        base.horizon = config.horizon;
        base.arrival_scale = config.arrival_scale;
        base.burn_in = config.burn_in;
        base.step_budget_ms = config.step_budget_ms;
        base.learning_rate = config.learning_rate;
        base.train_epochs = config.train_epochs;
        base.hidden = config.hidden;
        base.train_burn_in_skip = config.train_burn_in_skip;
        base.write_traces = config.traces;

        // Train each needed artifact once; the estimate runs then share it.
        bool need_partial = false, need_fullstate = false;
        for (const auto& m : methods) {
            need_partial |= m.variant == ModelVariant::kKnode;
            need_fullstate |= m.variant == ModelVariant::kKnodeFullstate;
        }
        std::string partial_file, fullstate_file;
        if (need_partial || need_fullstate) {
            fs::create_directories(fs::path(config.out_dir) / "models");
            const sim::Dataset train_ds = sim::simulate_truth(scenario, config.train_seed);
            if (need_partial) {
                std::printf("[%s] training residual model (observer states)\n",
                            scenario_id.c_str());
                const auto art = train_model(scenario, train_ds, false, base);
                partial_file = (fs::path(config.out_dir) / "models" /
                                (scenario_id + "__partial.txt"))
                                   .string();
                knode::save_model(art, partial_file);
            }
            if (need_fullstate) {
                std::printf("[%s] training residual model (true states)\n", scenario_id.c_str());
                const auto art = train_model(scenario, train_ds, true, base);
                fullstate_file = (fs::path(config.out_dir) / "models" /
                                  (scenario_id + "__fullstate.txt"))
                                     .string();
                knode::save_model(art, fullstate_file);
            }
        }

        for (const auto& m : methods) {
            ExperimentConfig ec = base;
            ec.method = m.name;
            if (m.variant == ModelVariant::kKnode) ec.model_file = partial_file;
            if (m.variant == ModelVariant::kKnodeFullstate) ec.model_file = fullstate_file;
            const auto results = run_experiment(ec);
            const auto agg = aggregate_results(results);
            for (const auto& row : agg) {
                std::printf("[%s] %-22s runs=%d diverged=%d mean=%.6g std=%.6g median=%.6g\n",
                            row.scenario_id.c_str(), row.method.c_str(), row.runs, row.diverged,
                            row.stats.mean, row.stats.stddev, row.stats.median);
            }
            everything.insert(everything.end(), results.begin(), results.end());
        }
    }

    write_aggregate_csv((fs::path(config.out_dir) / "aggregate.csv").string(),
                        aggregate_results(everything));
    if (config.plots) emit_plots(everything, config.out_dir);
}

}  // namespace knodest::bench
