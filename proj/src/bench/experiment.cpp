#include "knodest/bench/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <random>

#include "knodest/bench/metrics.hpp"
#include "knodest/bench/report.hpp"
#include "knodest/estimators/mhe.hpp"
#include "knodest/estimators/ukf.hpp"
#include "knodest/knode/observers.hpp"
#include "knodest/models/ground_robot.hpp"
#include "knodest/models/linear_model.hpp"

namespace knodest::bench {

namespace fs = std::filesystem;
using clock_type = std::chrono::steady_clock;

const std::vector<Method>& all_methods() {
    static const std::vector<Method> methods = {
        {"MHE", EstimatorFamily::kMhe, ModelVariant::kNominal},
        {"KNODE-MHE", EstimatorFamily::kMhe, ModelVariant::kKnode},
        {"KNODE-MHE-fullstate", EstimatorFamily::kMhe, ModelVariant::kKnodeFullstate},
        {"MHE-true", EstimatorFamily::kMhe, ModelVariant::kTrue},
        {"UKF", EstimatorFamily::kUkf, ModelVariant::kNominal},
        {"KNODE-UKF", EstimatorFamily::kUkf, ModelVariant::kKnode},
        {"KNODE-UKF-fullstate", EstimatorFamily::kUkf, ModelVariant::kKnodeFullstate},
        {"UKF-true", EstimatorFamily::kUkf, ModelVariant::kTrue},
    };
    return methods;
}

Method parse_method(const std::string& name) {
    for (const auto& m : all_methods()) {
        if (m.name == name) return m;
    }
    throw Error("unknown method " + name + " (see `estimate --help` for the list)");
}

knode::ObservationSet make_training_observations(const sim::Scenario& scenario,
                                                 const sim::Dataset& ds, bool fullstate) {
    if (fullstate) {
        knode::ObservationSet obs;
        obs.times = ds.times;
        obs.states = ds.true_states;
        obs.inputs = ds.inputs;
        return obs;
    }
    knode::PretrainObserverConfig ocfg;
    ocfg.state_sigmas = scenario.noise.state_sigmas;
    ocfg.meas_sigmas = scenario.noise.meas_sigmas;
    ocfg.init_state = scenario.initial_state;
    if (scenario.id == "cartpole") {
        return knode::pretrain_observe_cartpole(ds.measurements, ds.inputs, scenario.dt, ocfg);
    }
    if (scenario.id == "ground_robot") {
        models::GroundRobotParams prior_p;
        prior_p.drag_enabled = false;
        ocfg.accel_sigma = 1.0;  // the robot manoeuvres far more gently than the pole
        return knode::pretrain_observe_robot(ds.measurements, ds.inputs, scenario.dt,
                                             scenario.sensors, prior_p, ocfg);
    }
    if (scenario.id == "linear_translational") {
        const auto* field = dynamic_cast<const models::LinearField*>(scenario.prior_field.get());
        const auto* meas =
            dynamic_cast<const models::LinearMeasurement*>(scenario.measurement.get());
        if (!field || !meas) throw Error("linear scenario with non-linear prior/measurement");
        return knode::pretrain_observe_linear(ds.measurements, ds.inputs, scenario.dt, field->A(),
                                              meas->C(), ocfg);
    }
    throw Error("no pre-training observer for scenario " + scenario.id);
}

knode::ModelArtifact train_model(const sim::Scenario& scenario, const sim::Dataset& ds,
                                 bool fullstate, const ExperimentConfig& config) {
    knode::TrainConfig tc;
    tc.epochs = config.train_epochs > 0 ? config.train_epochs : scenario.train_epochs;
    tc.hidden = config.hidden > 0 ? config.hidden : scenario.mlp_hidden;
    tc.learning_rate = config.learning_rate;
    tc.dt = scenario.dt;
    tc.seed = ds.seed;
    tc.burn_in_skip = config.train_burn_in_skip;

    const knode::ObservationSet obs = make_training_observations(scenario, ds, fullstate);
    const knode::TrainResult result = knode::train(obs, scenario.prior_field, tc);

    knode::ModelArtifact art;
    art.prior_id = scenario.id;
    art.params = result.model.residual();
    art.train_config = tc;
    art.dataset_fingerprint = ds.fingerprint;
    art.best_loss = result.best_loss;
    return art;
}

namespace {

struct DriveResult {
    std::vector<Vec> estimates;  // one per sample
    int stalled_steps = 0;
    bool diverged = false;
    int divergence_step = -1;
    double max_step_ms = 0.0;
};

Vec initial_mean(const sim::Scenario& scenario, std::uint64_t seed) {
    Vec mean = scenario.initial_state;
    if (scenario.init_estimate_sigma > 0.0) {
        // Estimator starts from a perturbed state; stream separated from the
        // simulation noise by a fixed offset.
        std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
        std::normal_distribution<double> gauss(0.0, scenario.init_estimate_sigma);
        for (Eigen::Index i = 0; i < mean.size(); ++i) mean(i) += gauss(rng);
    }
    return mean;
}

Mat initial_cov(const sim::Scenario& scenario) {
    const int n = scenario.state_dim();
    if (scenario.init_estimate_sigma > 0.0) {
        return scenario.init_estimate_sigma * scenario.init_estimate_sigma *
               Mat::Identity(n, n);
    }
    return scenario.noise.state_sigmas.array().square().matrix().asDiagonal();
}

DriveResult drive_ukf(const sim::Dataset& ds, const sim::Scenario& scenario,
                      const estimators::DiscreteModel& model, const Vec& init_mean) {
    estimators::UkfConfig cfg;
    cfg.Q = scenario.noise.state_sigmas.array().square().matrix().asDiagonal();
    cfg.R = scenario.noise.meas_sigmas.array().square().matrix().asDiagonal();
    cfg.angle_meas_indices = scenario.angle_meas_indices;

    estimators::UkfState st;
    st.mean = init_mean;
    st.cov = initial_cov(scenario);

    DriveResult out;
    out.estimates.reserve(ds.count());
    for (int i = 0; i < ds.count(); ++i) {
        const auto t0 = clock_type::now();
        try {
            if (i == 0) {
                st = ukf_update_only(st, *scenario.measurement, ds.inputs[0], ds.measurements[0],
                                     cfg);
            } else {
                st = ukf_step(st, model, *scenario.measurement, ds.inputs[i - 1],
                              ds.measurements[i], cfg);
            }
        } catch (const Error&) {
            out.diverged = true;
            out.divergence_step = i;
        }
        const std::chrono::duration<double, std::milli> elapsed = clock_type::now() - t0;
        out.max_step_ms = std::max(out.max_step_ms, elapsed.count());
        if (out.diverged) break;
        out.estimates.push_back(st.mean);
    }
    // keep trace lengths fixed for reporting: pad with the last finite mean
    while (static_cast<int>(out.estimates.size()) < ds.count()) {
        out.estimates.push_back(out.estimates.empty() ? init_mean : out.estimates.back());
    }
    return out;
}

DriveResult drive_mhe(const sim::Dataset& ds, const sim::Scenario& scenario,
                      const estimators::DiscreteModel& model, const Vec& init_mean,
                      const ExperimentConfig& config) {
    estimators::MheConfig cfg;
    cfg.horizon = config.horizon;
    cfg.Q = scenario.noise.state_sigmas.array().square().inverse().matrix().asDiagonal();
    cfg.R = scenario.noise.meas_sigmas.array().square().inverse().matrix().asDiagonal();
    cfg.P = config.arrival_scale * cfg.Q.diagonal().mean() *
            Mat::Identity(scenario.state_dim(), scenario.state_dim());
    cfg.angle_state_indices = scenario.angle_state_indices;
    cfg.angle_meas_indices = scenario.angle_meas_indices;

    estimators::MheWindow window;
    window.arrival_estimate = init_mean;

    DriveResult out;
    out.estimates.reserve(ds.count());
    for (int i = 0; i < ds.count(); ++i) {
        const auto t0 = clock_type::now();
        try {
            const auto step =
                estimators::mhe_step(window, ds.measurements[i], ds.inputs[i], model,
                                     *scenario.measurement, cfg);
            if (step.solution.stalled) ++out.stalled_steps;
            if (!step.estimate.allFinite()) throw DivergenceError("non-finite estimate");
            out.estimates.push_back(step.estimate);
        } catch (const Error&) {
            out.diverged = true;
            out.divergence_step = i;
        }
        const std::chrono::duration<double, std::milli> elapsed = clock_type::now() - t0;
        out.max_step_ms = std::max(out.max_step_ms, elapsed.count());
        if (out.diverged) break;
    }
    while (static_cast<int>(out.estimates.size()) < ds.count()) {
        out.estimates.push_back(out.estimates.empty() ? init_mean : out.estimates.back());
    }
    return out;
}

void write_trace(const std::string& path, const sim::Dataset& ds,
                 const std::vector<Vec>& estimates) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw Error("write_trace: cannot open " + path);
    const int n = static_cast<int>(ds.true_states[0].size());
    std::fprintf(f, "# knodest-trace v1\n");
    std::fprintf(f, "t");
    for (int j = 0; j < n; ++j) std::fprintf(f, ",xhat_%d", j + 1);
    for (int j = 0; j < n; ++j) std::fprintf(f, ",x_%d", j + 1);
    std::fprintf(f, "\n");
    for (int i = 0; i < ds.count(); ++i) {
        std::fprintf(f, "%.17g", ds.times[i]);
        for (int j = 0; j < n; ++j) std::fprintf(f, ",%.17g", estimates[i](j));
        for (int j = 0; j < n; ++j) std::fprintf(f, ",%.17g", ds.true_states[i](j));
        std::fprintf(f, "\n");
    }
    std::fclose(f);
}

std::string sanitize(const std::string& name) {
    std::string out = name;
    for (char& c : out) {
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') c = '_';
    }
    return out;
}

}  // namespace

std::vector<RunResult> run_experiment(const ExperimentConfig& config) {
    const sim::Scenario scenario = sim::make_scenario(config.scenario_id);
    const Method method = parse_method(config.method);
    if (config.seeds.empty()) throw Error("run_experiment: empty seed list");
    for (std::uint64_t s : config.seeds) {
        if (s == config.train_seed) {
            throw Error("run_experiment: evaluation seed " + std::to_string(s) +
                        " collides with the training seed");
        }
    }

    // Resolve the dynamics model used inside the estimator.
    std::shared_ptr<const models::VectorField> field;
    switch (method.variant) {
        case ModelVariant::kNominal:
            field = scenario.prior_field;
            break;
        case ModelVariant::kTrue:
            field = scenario.true_field;
            break;
        default: {
            knode::ModelArtifact art;
            if (!config.model_file.empty()) {
                art = knode::load_model(config.model_file);
                if (art.prior_id != scenario.id) {
                    throw Error("model artifact " + config.model_file + " was trained for " +
                                art.prior_id + ", not " + scenario.id);
                }
                if (art.dataset_fingerprint != scenario.fingerprint()) {
                    throw Error("model artifact " + config.model_file +
                                " fingerprint does not match scenario: " +
                                art.dataset_fingerprint);
                }
            } else {
                const bool fullstate = method.variant == ModelVariant::kKnodeFullstate;
                const sim::Dataset train_ds = sim::simulate_truth(scenario, config.train_seed);
                art = train_model(scenario, train_ds, fullstate, config);
                fs::create_directories(fs::path(config.out_dir) / "models");
                knode::save_model(art, (fs::path(config.out_dir) / "models" /
                                        (scenario.id +
                                         (fullstate ? "__fullstate.txt" : "__partial.txt")))
                                           .string());
            }
            field = std::make_shared<knode::HybridModel>(scenario.prior_field, art.params);
            break;
        }
    }
    const estimators::DiscreteModel model{field, scenario.dt};

    fs::create_directories(fs::path(config.out_dir) / "summary");
    fs::create_directories(fs::path(config.out_dir) / "timings");
    if (config.write_traces) fs::create_directories(fs::path(config.out_dir) / "traces");

    std::vector<RunResult> results;
    results.reserve(config.seeds.size());
    for (std::uint64_t seed : config.seeds) {
        sim::Dataset ds;
        if (!config.dataset_dir.empty()) {
            const fs::path cache = fs::path(config.dataset_dir) /
                                   (scenario.id + "_seed" + std::to_string(seed) + ".csv");
            if (fs::exists(cache)) {
                ds = sim::load_dataset(cache.string(), scenario.fingerprint());
            } else {
                fs::create_directories(config.dataset_dir);
                ds = sim::simulate_truth(scenario, seed);
                sim::save_dataset(ds, cache.string());
            }
        } else {
            ds = sim::simulate_truth(scenario, seed);
        }

        const Vec init = initial_mean(scenario, seed);
        const auto run_t0 = clock_type::now();
        DriveResult drive = method.family == EstimatorFamily::kUkf
                                ? drive_ukf(ds, scenario, model, init)
                                : drive_mhe(ds, scenario, model, init, config);
        const std::chrono::duration<double, std::milli> run_elapsed =
            clock_type::now() - run_t0;

        if (config.burn_in < 0 || config.burn_in >= ds.count()) {
            throw Error("run_experiment: burn-in outside dataset length");
        }
        RunResult rr;
        rr.scenario_id = scenario.id;
        rr.method = method.name;
        rr.seed = seed;
        rr.steps = ds.count() - config.burn_in;
        rr.diverged = drive.diverged;
        rr.divergence_step = drive.divergence_step;
        rr.stalled_steps = drive.stalled_steps;
        rr.wall_ms = run_elapsed.count();
        rr.max_step_ms = drive.max_step_ms;
        rr.budget_exceeded = drive.max_step_ms > config.step_budget_ms;
        const std::vector<Vec> est(drive.estimates.begin() + config.burn_in,
                                   drive.estimates.end());
        const std::vector<Vec> tru(ds.true_states.begin() + config.burn_in,
                                   ds.true_states.end());
        rr.mse = mse(est, tru);
        results.push_back(rr);

        if (config.write_traces) {
            const fs::path tp = fs::path(config.out_dir) / "traces" /
                                (scenario.id + "__" + sanitize(method.name) + "__seed" +
                                 std::to_string(seed) + ".csv");
            write_trace(tp.string(), ds, drive.estimates);
        }
    }

    const std::string stem = scenario.id + "__" + sanitize(method.name) + ".csv";
    write_summary_csv((fs::path(config.out_dir) / "summary" / stem).string(), results);
    write_timings_csv((fs::path(config.out_dir) / "timings" / stem).string(), results);
    write_aggregate_csv((fs::path(config.out_dir) / ("aggregate_" + stem)).string(),
                        aggregate_results(results));
    return results;
}

}  // namespace knodest::bench
