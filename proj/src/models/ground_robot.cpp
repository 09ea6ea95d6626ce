#include "knodest/models/ground_robot.hpp"

#include <cassert>

namespace knodest::models {

Vec ground_robot_deriv(const Vec& state, const Vec& input, const GroundRobotParams& params) {
    assert(state.size() == 4);
    assert(input.size() == 2);
    assert(params.valid());

    const double v = state[2];
    const double psi = state[3];
    const double accel = input[0];
    const double delta = input[1];
    if (std::abs(delta) >= M_PI / 2.0) {
        throw Error("ground_robot_deriv: steering angle magnitude must be below pi/2");
    }

    const double wheelbase = params.l_f + params.l_r;
    const double beta = std::atan(params.l_r * std::tan(delta) / wheelbase);
    const double drag = params.drag_enabled ? params.drag_coeff * v * v : 0.0;

    Vec out(4);
    out << v * std::cos(psi + beta),
        v * std::sin(psi + beta),
        accel - drag,
        v * std::cos(beta) * std::tan(delta) / wheelbase;
    return out;
}

Mat ground_robot_jac_state(const Vec& state, const Vec& input, const GroundRobotParams& params) {
    assert(state.size() == 4);
    const double v = state[2];
    const double psi = state[3];
    const double delta = input[1];
    if (std::abs(delta) >= M_PI / 2.0) {
        throw Error("ground_robot_jac_state: steering angle magnitude must be below pi/2");
    }

    const double wheelbase = params.l_f + params.l_r;
    const double beta = std::atan(params.l_r * std::tan(delta) / wheelbase);
    const double heading = psi + beta;

    Mat jac = Mat::Zero(4, 4);
    jac(0, 2) = std::cos(heading);
    jac(0, 3) = -v * std::sin(heading);
    jac(1, 2) = std::sin(heading);
    jac(1, 3) = v * std::cos(heading);
    if (params.drag_enabled) jac(2, 2) = -2.0 * params.drag_coeff * v;
    jac(3, 2) = std::cos(beta) * std::tan(delta) / wheelbase;
    return jac;
}

}  // namespace knodest::models
