#include "knodest/sim/scenario.hpp"

#include <cmath>
#include <cstdio>

#include "knodest/models/cartpole.hpp"
#include "knodest/models/ground_robot.hpp"
#include "knodest/models/linear_model.hpp"
#include "knodest/models/range_sensors.hpp"

namespace knodest::sim {

namespace {

constexpr double kPi = M_PI;
constexpr double kDeg = M_PI / 180.0;

Scenario make_cartpole() {
    Scenario sc;
    sc.id = "cartpole";
    models::CartpoleParams true_p;
    true_p.m_c = 1.5;  // the prior deliberately underestimates the cart mass
    models::CartpoleParams prior_p;
    prior_p.m_c = 1.0;
    sc.true_field = std::make_shared<models::CartpoleField>(true_p);
    sc.prior_field = std::make_shared<models::CartpoleField>(prior_p);
    Mat c = Mat::Zero(2, 4);
    c(0, 0) = 1.0;  // cart position
    c(1, 2) = 1.0;  // pole angle
    sc.measurement = std::make_shared<models::LinearMeasurement>(c);
    sc.dt = 0.002;
    sc.sample_count = 5000;
    sc.duration = 10.0;
    sc.control_profile_id = "cartpole_sine";
    // State noise std 0.01 is a continuous-time diffusion intensity (per √s);
    // the per-step injection scales by √dt so the disturbance energy over a
    // fixed horizon does not depend on the sampling rate.
    sc.noise.state_sigmas = Vec::Constant(4, 0.01 * std::sqrt(sc.dt));
    sc.noise.meas_sigmas = Vec::Constant(2, 0.01);
    // 0.1 rad perturbation from the stable (hanging) equilibrium; keeps the
    // undamped pole in a smooth oscillatory regime instead of tumbling.
    sc.initial_state = (Vec(4) << 0.0, 0.0, kPi + 0.1, 0.0).finished();
    sc.angle_state_indices = {2};
    sc.angle_meas_indices = {1};
    sc.mlp_hidden = 8;
    sc.train_epochs = 250;
    return sc;
}

Scenario make_ground_robot() {
    Scenario sc;
    sc.id = "ground_robot";
    models::GroundRobotParams true_p;
    true_p.drag_enabled = true;  // the prior is the drag-free kinematic model
    models::GroundRobotParams prior_p;
    prior_p.drag_enabled = false;
    sc.true_field = std::make_shared<models::GroundRobotField>(true_p);
    sc.prior_field = std::make_shared<models::GroundRobotField>(prior_p);
    sc.sensors = {{10.0, 10.0}, {10.0, -10.0}, {-10.0, 10.0}, {-10.0, -10.0}};
    sc.measurement = std::make_shared<models::RangeHeadingMeasurement>(sc.sensors);
    sc.dt = 0.01;
    sc.sample_count = 2500;
    sc.duration = 25.0;
    sc.control_profile_id = "robot_sine";
    // Same convention as the cartpole: published stds act as diffusion
    // intensities, injected per step scaled by √dt.
    sc.noise.state_sigmas =
        (Vec(4) << 0.005, 0.005, 0.005, 0.1 * kDeg).finished() * std::sqrt(sc.dt);
    sc.noise.meas_sigmas = (Vec(5) << 0.05, 0.05, 0.05, 0.05, 1.0 * kDeg).finished();
    sc.initial_state = (Vec(4) << 0.0, 0.0, 1.0, 0.0).finished();
    sc.angle_state_indices = {3};
    sc.angle_meas_indices = {4};
    sc.mlp_hidden = 8;
    sc.train_epochs = 10000;
    return sc;
}

Scenario make_linear_translational() {
    Scenario sc;
    sc.id = "linear_translational";
    // Triple integrator per axis, x = [p; v; a] stacked by derivative order.
    const int n = 9;
    Mat a = Mat::Zero(n, n);
    a.block(0, 3, 3, 3) = Mat::Identity(3, 3);
    a.block(3, 6, 3, 3) = Mat::Identity(3, 3);
    // Synthetic residual: velocity-proportional drag on the acceleration rows.
    Mat a_true = a;
    a_true.block(3, 3, 3, 3) -= 0.1 * Mat::Identity(3, 3);
    sc.true_field = std::make_shared<models::LinearField>(a_true, 0);
    sc.prior_field = std::make_shared<models::LinearField>(a, 0);
    Mat c = Mat::Zero(6, n);
    c.block(0, 0, 3, 3) = Mat::Identity(3, 3);  // positions
    c.block(3, 6, 3, 3) = Mat::Identity(3, 3);  // accelerations
    sc.measurement = std::make_shared<models::LinearMeasurement>(c);
    sc.dt = 0.01;
    sc.sample_count = 1400;
    sc.duration = 14.0;
    sc.control_profile_id = "none";
    sc.noise.state_sigmas = Vec::Constant(n, 0.01 * std::sqrt(sc.dt));
    sc.noise.meas_sigmas = Vec::Constant(6, 0.01);
    sc.initial_state = Vec::Zero(n);
    sc.mlp_hidden = 16;
    sc.train_epochs = 150;
    sc.init_estimate_sigma = 1.0;
    return sc;
}

}  // namespace

std::string Scenario::fingerprint() const {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "scenario=%s n=%d m=%d p=%d dt=%.17g M=%d", id.c_str(),
                  state_dim(), meas_dim(), input_dim(), dt, sample_count);
    return buf;
}

Vec control_profile(const Scenario& scenario, double t) {
    if (t < 0.0 || t > scenario.duration + scenario.dt) {
        throw Error("control_profile: time outside scenario duration");
    }
    if (scenario.control_profile_id == "cartpole_sine") {
        // Two-tone excitation with 5/1.5 == 3/0.9: the impulse integral has zero
        // mean, so the cart oscillates instead of drifting away, and the pair of
        // incommensurate-in-practice phases sweeps the (angle, rate, force)
        // envelope that single-tone forcing leaves uncovered.
        return Vec::Constant(1, 5.0 * std::sin(1.5 * t) - 3.0 * std::sin(0.9 * t));
    }
    if (scenario.control_profile_id == "robot_sine") {
        // The 0.1 m/s² bias offsets the mean quadratic drag so the commanded
        // speed stays well above zero through the deceleration half-periods
        // (the speed observer reports |v| and would fold negative excursions).
        return (Vec(2) << 0.3 * std::sin(0.4 * t) + 0.1, 0.25 * std::sin(0.2 * t)).finished();
    }
    if (scenario.control_profile_id == "none") {
        return Vec(0);
    }
    throw Error("control_profile: unknown profile " + scenario.control_profile_id);
}

Scenario make_scenario(const std::string& id) {
    if (id == "cartpole") return make_cartpole();
    if (id == "ground_robot") return make_ground_robot();
    if (id == "linear_translational") return make_linear_translational();
    throw Error("make_scenario: unknown scenario id " + id);
}

const std::vector<std::string>& scenario_ids() {
    static const std::vector<std::string> ids = {"cartpole", "ground_robot",
                                                 "linear_translational"};
    return ids;
}

}  // namespace knodest::sim
