#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "knodest/bench/config_io.hpp"
#include "knodest/bench/report.hpp"
#include "knodest/knode/model_io.hpp"
#include "knodest/sim/dataset.hpp"

namespace fs = std::filesystem;
using namespace knodest;

namespace {

void print_aggregates(const std::vector<bench::RunResult>& results) {
    for (const auto& row : bench::aggregate_results(results)) {
        std::printf("[%s] %-22s runs=%d diverged=%d mean=%.6g std=%.6g median=%.6g\n",
                    row.scenario_id.c_str(), row.method.c_str(), row.runs, row.diverged,
                    row.stats.mean, row.stats.stddev, row.stats.median);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hybrid-model state estimation benchmarks (MHE / UKF with learned residuals)"};
    app.require_subcommand(1);

    // simulate
    auto* sim_cmd = app.add_subcommand("simulate", "Generate a ground-truth dataset");
    std::string sim_scenario = "cartpole";
    std::uint64_t sim_seed = 1;
    std::string sim_out = "runs/datasets";
    sim_cmd->add_option("--scenario", sim_scenario, "cartpole | ground_robot | linear_translational")
        ->required();
    sim_cmd->add_option("--seed", sim_seed, "noise seed");
    sim_cmd->add_option("--out", sim_out, "output directory")->required();

    // train
    auto* train_cmd = app.add_subcommand("train", "Train the residual model on a dataset");
    std::string tr_scenario = "cartpole", tr_dataset, tr_out = "model.txt";
    bool tr_fullstate = false;
    int tr_epochs = 0, tr_hidden = 0, tr_skip = 0;
    double tr_lr = 0.01;
    train_cmd->add_option("--scenario", tr_scenario)->required();
    train_cmd->add_option("--dataset", tr_dataset, "dataset file from `simulate`")->required();
    train_cmd->add_option("--fullstate", tr_fullstate,
                          "train on true states instead of observer output");
    train_cmd->add_option("--out", tr_out, "model artifact file")->required();
    train_cmd->add_option("--epochs", tr_epochs, "override scenario default");
    train_cmd->add_option("--hidden", tr_hidden, "override scenario default");
    train_cmd->add_option("--lr", tr_lr, "learning rate");
    train_cmd->add_option("--burn-in-skip", tr_skip, "observer samples dropped before training");

    // estimate
    auto* est_cmd = app.add_subcommand("estimate", "Run one estimator variant over seeds");
    bench::ExperimentConfig ec;
    est_cmd->add_option("--method", ec.method,
                        "MHE | KNODE-MHE | KNODE-MHE-fullstate | MHE-true | UKF | KNODE-UKF | "
                        "KNODE-UKF-fullstate | UKF-true")
        ->required();
    est_cmd->add_option("--scenario", ec.scenario_id)->required();
    est_cmd->add_option("--model", ec.model_file, "trained model artifact (KNODE variants)");
    est_cmd->add_option("--seeds", ec.seeds, "evaluation seeds")->delimiter(',');
    est_cmd->add_option("--out", ec.out_dir, "output directory")->required();
    est_cmd->add_option("--train-seed", ec.train_seed, "seed for on-demand training");
    est_cmd->add_option("--dataset-dir", ec.dataset_dir, "dataset cache directory");
    est_cmd->add_option("--horizon", ec.horizon, "MHE window size N");
    est_cmd->add_option("--arrival-scale", ec.arrival_scale);
    est_cmd->add_option("--burn-in", ec.burn_in, "samples excluded from the MSE");
    est_cmd->add_option("--budget-ms", ec.step_budget_ms, "per-step wall budget");
    est_cmd->add_option("--epochs", ec.train_epochs, "override scenario default");
    est_cmd->add_option("--hidden", ec.hidden, "override scenario default");
    est_cmd->add_option("--lr", ec.learning_rate);
    est_cmd->add_option("--train-burn-in-skip", ec.train_burn_in_skip);
    est_cmd->add_flag("--traces", ec.write_traces, "write per-run estimate traces");

    // report
    auto* rep_cmd = app.add_subcommand("report", "Aggregate summaries and render plots");
    std::string rep_in = "runs";
    bool rep_plots = true;
    rep_cmd->add_option("--in", rep_in, "directory with summary/ from estimate runs")->required();
    rep_cmd->add_option("--plots", rep_plots, "emit SVG plots");

    // all
    auto* all_cmd = app.add_subcommand("all", "Run the full benchmark matrix");
    std::string all_config;
    bool print_config = false;
    all_cmd->add_option("--config", all_config, "JSON config file (defaults when omitted)");
    all_cmd->add_flag("--print-config", print_config, "print the effective config and exit");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim_cmd->parsed()) {
            const sim::Scenario sc = sim::make_scenario(sim_scenario);
            const sim::Dataset ds = sim::simulate_truth(sc, sim_seed);
            fs::create_directories(sim_out);
            const fs::path path =
                fs::path(sim_out) / (sim_scenario + "_seed" + std::to_string(sim_seed) + ".csv");
            sim::save_dataset(ds, path.string());
            std::printf("wrote %s (%d samples)\n", path.string().c_str(), ds.count());
        } else if (train_cmd->parsed()) {
            const sim::Scenario sc = sim::make_scenario(tr_scenario);
            const sim::Dataset ds = sim::load_dataset(tr_dataset, sc.fingerprint());
            bench::ExperimentConfig tc;
            tc.train_epochs = tr_epochs;
            tc.hidden = tr_hidden;
            tc.learning_rate = tr_lr;
            tc.train_burn_in_skip = tr_skip;
            const auto art = bench::train_model(sc, ds, tr_fullstate, tc);
            if (const fs::path dir = fs::path(tr_out).parent_path(); !dir.empty()) {
                fs::create_directories(dir);
            }
            knode::save_model(art, tr_out);
            std::printf("wrote %s (best loss %.6g)\n", tr_out.c_str(), art.best_loss);
        } else if (est_cmd->parsed()) {
            print_aggregates(bench::run_experiment(ec));
        } else if (rep_cmd->parsed()) {
            const auto results = bench::read_summary_dir(rep_in);
            const auto rows = bench::aggregate_results(results);
            bench::write_aggregate_csv((fs::path(rep_in) / "aggregate.csv").string(), rows);
            if (rep_plots) bench::emit_plots(results, rep_in);
            print_aggregates(results);
        } else if (all_cmd->parsed()) {
            bench::BenchConfig bc;
            if (!all_config.empty()) bc = bench::load_bench_config(all_config);
            if (print_config) {
                std::fputs(bench::to_json(bc).c_str(), stdout);
                return 0;
            }
            bench::run_all(bc);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
