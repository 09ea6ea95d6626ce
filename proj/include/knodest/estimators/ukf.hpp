#pragma once

#include "knodest/estimators/discrete_model.hpp"

namespace knodest::estimators {

/// Unscented transform scalars plus the noise covariances of the augmented
/// vector z = [x; w; v]. The augmented dimension is L = n + q + r with
/// q = rows(Q) and r = rows(R).
struct UkfConfig {
    double alpha = 1.0;
    double beta = 2.0;
    double kappa = 0.0;
    Mat Q;
    Mat R;
    std::vector<int> angle_meas_indices;

    double lambda(int L) const { return alpha * alpha * (L + kappa) - L; }
};

struct UkfState {
    Vec mean;
    Mat cov;
};

struct SigmaPoints {
    Mat points;  // L x (2L+1), column 0 is the mean
    Vec w_mean;
    Vec w_cov;
};

/// Sigma vectors [z, z +/- sqrt((L+lambda) Pz)] via lower-triangular Cholesky
/// columns, with the standard unscented-transform weights (sum of w_mean is
/// exactly 1). A jitter ladder from 1e-12 to 1e-6 is added to the diagonal
/// before a ConditioningError is raised.
SigmaPoints sigma_points(const Vec& z_hat, const Mat& P_z, const UkfConfig& config);

/// Outputs of the augmented-vector time update.
struct UkfTimeUpdate {
    Vec x_pred;       // predicted state mean
    Mat P_pred;       // predicted state covariance
    Vec y_pred;       // predicted measurement mean
    Mat X_prop;       // propagated state sigma columns, n x (2L+1)
    Mat Y_sig;        // measurement sigma columns, m x (2L+1)
    Vec w_mean, w_cov;
};

/// Propagates the augmented sigma set through the dynamics (process-noise
/// columns added to the propagated state) and the propagated columns through
/// the measurement map (measurement-noise columns added).
UkfTimeUpdate ukf_time_update(const UkfState& state, const DiscreteModel& model,
                              const models::MeasurementModel& meas, const Vec& u,
                              const UkfConfig& config);

/// Cross-covariance/Kalman-gain measurement update. Innovation components
/// flagged in config.angle_meas_indices are wrapped to (-pi, pi].
UkfState ukf_measurement_update(const UkfTimeUpdate& tu, const Vec& y, const UkfConfig& config);

/// Time update followed by measurement update.
UkfState ukf_step(const UkfState& state, const DiscreteModel& model,
                  const models::MeasurementModel& meas, const Vec& u, const Vec& y,
                  const UkfConfig& config);

/// Measurement update without propagation (augmented vector [x; v] only).
/// Used to fold in the measurement at the first sample, where no input has
/// been applied yet.
UkfState ukf_update_only(const UkfState& state, const models::MeasurementModel& meas,
                         const Vec& u, const Vec& y, const UkfConfig& config);

}  // namespace knodest::estimators
