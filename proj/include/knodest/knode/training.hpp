#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "knodest/knode/hybrid.hpp"

namespace knodest::knode {

/// State observations used for one-step training pairs.
struct ObservationSet {
    std::vector<double> times;
    std::vector<Vec> states;  // zeta_i
    std::vector<Vec> inputs;  // u_i applied over [t_i, t_{i+1}]

    int count() const { return static_cast<int>(states.size()); }
    void validate() const;  // equal lengths, strictly increasing times
};

struct TrainConfig {
    int epochs = 250;
    int hidden = 8;
    double learning_rate = 0.01;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    double dt = 0.0;        // nominal sample interval (informational; times drive the steps)
    std::uint64_t seed = 0;
    int burn_in_skip = 0;   // observer samples dropped from the front before training
};

/// Mean squared one-step prediction error over the M-1 consecutive pairs:
/// L = 1/(M-1) * sum_i |rk4(prior+mlp, zeta_i, u_i, dt_i) - zeta_{i+1}|^2.
double training_loss(const MlpParams& params, const models::VectorField& prior,
                     const ObservationSet& obs);

/// Exact gradient of training_loss by reverse accumulation through the four
/// RK4 stages and both affine layers. Returns the loss; grad must have the
/// same shapes as params and is overwritten.
double loss_gradient(const MlpParams& params, const models::VectorField& prior,
                     const ObservationSet& obs, MlpParams& grad);

struct AdamState {
    Vec m;
    Vec v;
};

/// Standard Adam update with bias correction, t being the 1-based iteration.
void adam_step(Vec& theta, const Vec& grad, AdamState& moments, const TrainConfig& config, int t);

struct TrainResult {
    HybridModel model;               // prior + best-loss parameters seen
    std::vector<double> loss_trace;  // loss at epoch boundaries (epochs + 1 entries)
    double best_loss = 0.0;
    int best_epoch = 0;              // update count after which the best loss was observed
};

/// Full-batch Adam for config.epochs epochs, deterministic per seed.
TrainResult train(const ObservationSet& obs, std::shared_ptr<const models::VectorField> prior,
                  const TrainConfig& config);

}  // namespace knodest::knode
