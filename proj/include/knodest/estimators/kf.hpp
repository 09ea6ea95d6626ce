#pragma once

#include "knodest/core.hpp"

namespace knodest::estimators {

/// Discrete-time linear Gaussian model x+ = A x + B u + w, y = C x + v.
/// B may be empty (0 columns) for autonomous systems.
struct LinearKfModel {
    Mat A;
    Mat B;  // n x p, or 0x0 when there is no input
    Mat C;
    Mat Q;  // process noise covariance
    Mat R;  // measurement noise covariance
};

struct KfState {
    Vec mean;
    Mat cov;
};

/// One predict-then-update cycle with a Joseph-form covariance update.
/// angle_meas_indices flags innovation components wrapped to (-pi, pi].
KfState kf_step(const KfState& state, const LinearKfModel& model, const Vec& u, const Vec& y,
                const std::vector<int>& angle_meas_indices = {});

}  // namespace knodest::estimators
