#pragma once

#include "knodest/sim/scenario.hpp"

namespace knodest::sim {

struct Dataset {
    std::string scenario_id;
    std::string fingerprint;
    std::uint64_t seed = 0;
    double dt = 0.0;
    std::vector<double> times;
    std::vector<Vec> measurements;
    std::vector<Vec> inputs;
    std::vector<Vec> true_states;  // retained for evaluation only

    int count() const { return static_cast<int>(times.size()); }
};

/// Integrates the true field sample-to-sample with the adaptive RK45
/// integrator under zero-order-hold inputs, injecting per-step state noise
/// and measurement noise from scenario.noise. Fully determined by
/// (scenario, seed).
Dataset simulate_truth(const Scenario& scenario);
Dataset simulate_truth(const Scenario& scenario, std::uint64_t seed_override);

/// Plain-text delimited format: comment preamble (scenario id, fingerprint,
/// seed, dt, M), a header row naming columns t, y_*, u_*, x_*, then one row
/// per sample with 17 significant digits. Round trips losslessly.
void save_dataset(const Dataset& ds, const std::string& path);
Dataset load_dataset(const std::string& path);
/// Additionally rejects datasets whose fingerprint differs.
Dataset load_dataset(const std::string& path, const std::string& expected_fingerprint);

}  // namespace knodest::sim
