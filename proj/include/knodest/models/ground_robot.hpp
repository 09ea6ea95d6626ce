#pragma once

#include "knodest/models/vector_field.hpp"

namespace knodest::models {

/// Kinematic bicycle model geometry plus an aggregated quadratic drag term.
/// drag_coeff collects 0.5*S*C_D/m into a single coefficient with units 1/m.
struct GroundRobotParams {
    double l_f = 0.5;          // front axle to CoG [m]
    double l_r = 0.5;          // rear axle to CoG [m]
    double drag_coeff = 0.05;  // [1/m]
    bool drag_enabled = false;

    bool valid() const { return l_f + l_r > 0.0 && drag_coeff >= 0.0; }
};

/// Time derivative of the robot state [x, y, v, psi] under input [a, delta].
/// Throws if |delta| >= pi/2 (steering tangent singularity).
Vec ground_robot_deriv(const Vec& state, const Vec& input, const GroundRobotParams& params);

/// d(ground_robot_deriv)/d(state), analytic.
Mat ground_robot_jac_state(const Vec& state, const Vec& input, const GroundRobotParams& params);

class GroundRobotField final : public VectorField {
public:
    explicit GroundRobotField(GroundRobotParams params) : params_(params) {}

    int state_dim() const override { return 4; }
    int input_dim() const override { return 2; }

    Vec eval(const Vec& x, const Vec& u) const override { return ground_robot_deriv(x, u, params_); }
    Mat jac_state(const Vec& x, const Vec& u) const override { return ground_robot_jac_state(x, u, params_); }

    const GroundRobotParams& params() const { return params_; }

private:
    GroundRobotParams params_;
};

}  // namespace knodest::models
