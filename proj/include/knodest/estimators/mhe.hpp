#pragma once

#include <deque>

#include "knodest/estimators/discrete_model.hpp"

namespace knodest::estimators {

/// Weights and solver settings for the moving-horizon least-squares problem
///
///   min  |x_0 - xbar|^2_P + sum_i |x_{i+1} - f(x_i, u_i)|^2_Q
///                         + sum_i |y_i - h(x_i, u_i)|^2_R
///
/// Q, R, P are direct penalty weights (recommended: inverse noise
/// covariances, arrival weight scaled from Q).
struct MheConfig {
    int horizon = 10;  // N: window spans N+1 samples once full
    Mat Q;
    Mat R;
    Mat P;
    int max_iterations = 50;
    double gradient_tol = 1e-8;
    double initial_damping = 1e-3;
    std::vector<int> angle_state_indices;
    std::vector<int> angle_meas_indices;
};

/// Sliding window of measurements/inputs plus the arrival estimate and the
/// previous solution used for warm starting. u[i] is the input applied over
/// [t_i, t_{i+1}]; the newest input is carried but not yet constrained.
struct MheWindow {
    std::deque<Vec> measurements;
    std::deque<Vec> inputs;
    Vec arrival_estimate;           // xbar anchoring the first window state
    std::vector<Vec> warm_start;    // previous optimal state sequence

    int length() const { return static_cast<int>(measurements.size()); }
};

/// Stacked weighted residual [P^T/2 (x_0 - xbar); Q^T/2 w_i; R^T/2 v_i]
/// whose squared norm equals the window objective. Angle-flagged state and
/// measurement residual components are wrapped.
Vec mhe_residuals(const std::vector<Vec>& states, const MheWindow& window,
                  const DiscreteModel& model, const models::MeasurementModel& meas,
                  const MheConfig& config);

struct MheSolution {
    std::vector<Vec> states;
    double objective = 0.0;
    int iterations = 0;
    bool converged = false;  // gradient tolerance reached
    bool stalled = false;    // damping escalation exhausted
};

/// Damped Gauss-Newton (Levenberg-Marquardt) minimization of the window
/// objective starting from window.warm_start. The objective never increases
/// across accepted iterations; on stall the best iterate is returned with
/// the flag set.
MheSolution mhe_solve(const MheWindow& window, const DiscreteModel& model,
                      const models::MeasurementModel& meas, const MheConfig& config);

struct MheStepResult {
    Vec estimate;
    MheSolution solution;
};

/// Appends (y, u), maintains the horizon (full-information growth until N+1
/// samples, then sliding with the arrival estimate taken from the previous
/// solution's second state), solves, and returns the newest optimal state.
MheStepResult mhe_step(MheWindow& window, const Vec& y, const Vec& u, const DiscreteModel& model,
                       const models::MeasurementModel& meas, const MheConfig& config);

}  // namespace knodest::estimators
