#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "knodest/models/vector_field.hpp"

namespace knodest::sim {

using knodest::Mat;
using knodest::Vec;

/// Per-step additive Gaussian noise (discrete-time injection).
struct NoiseSpec {
    Vec state_sigmas;
    Vec meas_sigmas;
    std::uint64_t seed = 0;
};

/// Everything needed to simulate and estimate one benchmark task: the true
/// field (residual included), the deliberately imperfect prior, the
/// measurement map, sampling, noise, and the defaults the experiments use.
struct Scenario {
    std::string id;
    std::shared_ptr<const models::VectorField> true_field;
    std::shared_ptr<const models::VectorField> prior_field;
    std::shared_ptr<const models::MeasurementModel> measurement;
    std::vector<Eigen::Vector2d> sensors;  // robot only
    double dt = 0.0;
    double duration = 0.0;
    int sample_count = 0;
    std::string control_profile_id;
    NoiseSpec noise;
    Vec initial_state;
    std::vector<int> angle_state_indices;
    std::vector<int> angle_meas_indices;
    int mlp_hidden = 8;
    int train_epochs = 250;
    double init_estimate_sigma = 0.0;  // std of the estimators' initial-mean error

    int state_dim() const { return true_field->state_dim(); }
    int input_dim() const { return true_field->input_dim(); }
    int meas_dim() const { return measurement->meas_dim(); }

    /// Identity string for dataset/model compatibility checks (seed-free).
    std::string fingerprint() const;
};

/// Deterministic excitation profiles; returns the input vector at time t.
Vec control_profile(const Scenario& scenario, double t);

/// Factory for "cartpole", "ground_robot", "linear_translational".
Scenario make_scenario(const std::string& id);

const std::vector<std::string>& scenario_ids();

}  // namespace knodest::sim
