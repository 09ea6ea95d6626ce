#include "knodest/models/cartpole.hpp"

#include <cassert>

namespace knodest::models {

// Pole-angle acceleration followed by cart acceleration; the cart term
// depends on the already-computed angular acceleration.
Vec cartpole_deriv(const Vec& state, double force, const CartpoleParams& params) {
    assert(state.size() == 4);
    assert(params.valid());

    const double alpha = state[2];
    const double alpha_dot = state[3];
    const double s = std::sin(alpha);
    const double c = std::cos(alpha);
    const double total_mass = params.m_c + params.m_p;

    const double denom = params.l * (4.0 / 3.0 - params.m_p * c * c / total_mass);
    assert(denom > 0.0);

    const double alpha_dd =
        (params.g * s - c * (force + params.m_p * params.l * alpha_dot * alpha_dot * s) / total_mass) / denom;
    const double p_dd =
        (force + params.m_p * params.l * (alpha_dot * alpha_dot * s - alpha_dd * c)) / total_mass;

    Vec out(4);
    out << state[1], p_dd, alpha_dot, alpha_dd;
    return out;
}

Mat cartpole_jac_state(const Vec& state, double force, const CartpoleParams& params) {
    assert(state.size() == 4);

    const double alpha = state[2];
    const double ad = state[3];
    const double s = std::sin(alpha);
    const double c = std::cos(alpha);
    const double M = params.m_c + params.m_p;
    const double ml = params.m_p * params.l;

    const double D = params.l * (4.0 / 3.0 - params.m_p * c * c / M);
    const double N = params.g * s - c * (force + ml * ad * ad * s) / M;
    const double alpha_dd = N / D;

    const double dN_da = params.g * c + s * (force + ml * ad * ad * s) / M - c * (ml * ad * ad * c) / M;
    const double dN_dad = -c * (2.0 * ml * ad * s) / M;
    const double dD_da = params.l * (2.0 * params.m_p * c * s / M);

    const double dadd_da = (dN_da - alpha_dd * dD_da) / D;
    const double dadd_dad = dN_dad / D;

    const double dpdd_da = ml * (ad * ad * c - dadd_da * c + alpha_dd * s) / M;
    const double dpdd_dad = ml * (2.0 * ad * s - c * dadd_dad) / M;

    Mat jac = Mat::Zero(4, 4);
    jac(0, 1) = 1.0;
    jac(1, 2) = dpdd_da;
    jac(1, 3) = dpdd_dad;
    jac(2, 3) = 1.0;
    jac(3, 2) = dadd_da;
    jac(3, 3) = dadd_dad;
    return jac;
}

}  // namespace knodest::models
