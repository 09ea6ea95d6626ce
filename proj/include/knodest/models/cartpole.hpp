#pragma once

#include "knodest/models/vector_field.hpp"

namespace knodest::models {

/// Cartpole constants. l is the half-length of the pole.
struct CartpoleParams {
    double m_c = 1.0;   // cart mass [kg]
    double m_p = 0.1;   // pole mass [kg]
    double l = 0.5;     // pole half-length [m]
    double g = 9.81;    // gravity [m/s^2]

    bool valid() const { return m_c > 0.0 && m_p > 0.0 && l > 0.0 && g > 0.0; }
};

/// Time derivative of the cartpole state [p, pdot, alpha, alphadot] under
/// a horizontal force F on the cart. alpha is measured from the upright
/// vertical. The angular acceleration is computed first; the cart
/// acceleration depends on it.
Vec cartpole_deriv(const Vec& state, double force, const CartpoleParams& params);

/// d(cartpole_deriv)/d(state), analytic.
Mat cartpole_jac_state(const Vec& state, double force, const CartpoleParams& params);

class CartpoleField final : public VectorField {
public:
    explicit CartpoleField(CartpoleParams params) : params_(params) {}

    int state_dim() const override { return 4; }
    int input_dim() const override { return 1; }

    Vec eval(const Vec& x, const Vec& u) const override { return cartpole_deriv(x, u[0], params_); }
    Mat jac_state(const Vec& x, const Vec& u) const override { return cartpole_jac_state(x, u[0], params_); }

    const CartpoleParams& params() const { return params_; }

private:
    CartpoleParams params_;
};

}  // namespace knodest::models
