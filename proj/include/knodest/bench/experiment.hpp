#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "knodest/knode/model_io.hpp"
#include "knodest/sim/dataset.hpp"

namespace knodest::bench {

enum class EstimatorFamily { kMhe, kUkf };

enum class ModelVariant {
    kNominal,         // imperfect prior only
    kKnode,           // prior + residual trained on observer output
    kKnodeFullstate,  // prior + residual trained on ground-truth states
    kTrue,            // true dynamics (upper bound)
};

struct Method {
    std::string name;
    EstimatorFamily family = EstimatorFamily::kMhe;
    ModelVariant variant = ModelVariant::kNominal;

    bool needs_training() const {
        return variant == ModelVariant::kKnode || variant == ModelVariant::kKnodeFullstate;
    }
};

/// The eight benchmarked variants in canonical report order.
const std::vector<Method>& all_methods();
Method parse_method(const std::string& name);

struct ExperimentConfig {
    std::string scenario_id = "cartpole";
    std::string method = "MHE";
    std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15};
    std::uint64_t train_seed = 1000;  // must stay disjoint from evaluation seeds
    std::string out_dir = "runs";
    std::string model_file;    // pre-trained artifact; empty -> train on demand
    std::string dataset_dir;   // cache directory; empty -> simulate in memory
    int horizon = 10;
    double arrival_scale = 10.0;  // arrival weight = scale x mean process weight
    int burn_in = 50;             // samples excluded from the MSE
    double step_budget_ms = 250.0;
    int train_epochs = 0;  // 0 -> scenario default
    int hidden = 0;        // 0 -> scenario default
    double learning_rate = 0.01;
    int train_burn_in_skip = 0;
    bool write_traces = false;
};

struct RunResult {
    std::string scenario_id;
    std::string method;
    std::uint64_t seed = 0;
    double mse = 0.0;
    int steps = 0;  // estimates scored (dataset length minus burn-in)
    bool diverged = false;
    int divergence_step = -1;
    int stalled_steps = 0;
    double wall_ms = 0.0;
    double max_step_ms = 0.0;
    bool budget_exceeded = false;
};

/// Builds the training observations for a scenario: the pre-training
/// observer output, or the dataset's true states for fullstate variants.
knode::ObservationSet make_training_observations(const sim::Scenario& scenario,
                                                 const sim::Dataset& ds, bool fullstate);

/// Phase-1 training on the given dataset; returns a reusable artifact.
knode::ModelArtifact train_model(const sim::Scenario& scenario, const sim::Dataset& ds,
                                 bool fullstate, const ExperimentConfig& config);

/// Runs one (scenario, method) over all evaluation seeds: resolves or trains
/// the model, drives the estimator over each dataset, writes summary /
/// timings CSVs (and traces when requested) under config.out_dir, and
/// returns the per-run results.
std::vector<RunResult> run_experiment(const ExperimentConfig& config);

}  // namespace knodest::bench
