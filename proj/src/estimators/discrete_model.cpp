#include "knodest/estimators/discrete_model.hpp"

namespace knodest::estimators {

Mat dynamics_jacobian(const DiscreteModel& model, const Vec& x, const Vec& u) {
    const auto& f = *model.field;
    const double dt = model.dt;
    const int n = f.state_dim();

    const Vec k1 = f.eval(x, u);
    const Vec s2 = x + 0.5 * dt * k1;
    const Vec k2 = f.eval(s2, u);
    const Vec s3 = x + 0.5 * dt * k2;
    const Vec k3 = f.eval(s3, u);
    const Vec s4 = x + dt * k3;

    const Mat eye = Mat::Identity(n, n);
    const Mat d1 = f.jac_state(x, u);
    const Mat d2 = f.jac_state(s2, u) * (eye + 0.5 * dt * d1);
    const Mat d3 = f.jac_state(s3, u) * (eye + 0.5 * dt * d2);
    const Mat d4 = f.jac_state(s4, u) * (eye + dt * d3);
    return eye + (dt / 6.0) * (d1 + 2.0 * d2 + 2.0 * d3 + d4);
}

}  // namespace knodest::estimators
