#pragma once

#include <vector>

#include "knodest/knode/training.hpp"
#include "knodest/models/ground_robot.hpp"

namespace knodest::knode {

/// Noise settings for the pre-training observers. Measurement noise defaults
/// to the true measurement variance. Model-based observers (robot stage 1,
/// linear) take process noise as 10x the injected state-noise variance; the
/// constant-velocity channels instead use a white-acceleration kernel
/// sigma_a^2 * [[dt^4/4, dt^3/2], [dt^3/2, dt^2]], since their dominant error
/// is the unmodeled acceleration, not the injected diffusion.
struct PretrainObserverConfig {
    Vec state_sigmas;           // per-component injected state-noise std
    Vec meas_sigmas;            // per-component measurement-noise std
    Vec init_state;             // initial observer mean (empty: from first sample)
    double process_scale = 10.0;
    double accel_sigma = 10.0;  // white-acceleration intensity of CV channels
    double init_var = 1.0;
};

/// Two decoupled constant-velocity Kalman filters (cart position from y(0),
/// pole angle from y(1)) assembling zeta = [p, p_dot, alpha, alpha_dot].
ObservationSet pretrain_observe_cartpole(const std::vector<Vec>& ys, const std::vector<Vec>& us,
                                         double dt, const PretrainObserverConfig& config);

/// Stage 1: UKF with the drag-free kinematic prior and range+heading
/// measurements extracts (x, y, psi). Stage 2: a constant-velocity KF on the
/// (x, y) track extracts the speed v = |(x_dot, y_dot)|. Assembles
/// zeta = [x, y, v, psi].
ObservationSet pretrain_observe_robot(const std::vector<Vec>& ys, const std::vector<Vec>& us,
                                      double dt, const std::vector<Eigen::Vector2d>& sensors,
                                      const models::GroundRobotParams& prior_params,
                                      const PretrainObserverConfig& config);

/// Plain Kalman filter with the RK4-discretized prior dynamics x_dot = A x
/// and measurement y = C x; used for the linear benchmark scenario.
ObservationSet pretrain_observe_linear(const std::vector<Vec>& ys, const std::vector<Vec>& us,
                                       double dt, const Mat& A, const Mat& C,
                                       const PretrainObserverConfig& config);

}  // namespace knodest::knode
