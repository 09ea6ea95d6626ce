#pragma once

#include <memory>

#include "knodest/models/integrators.hpp"
#include "knodest/models/vector_field.hpp"

namespace knodest::estimators {

/// Discrete-time transition x+ = step(x, u), realized as one RK4 step of a
/// continuous-time field at the scenario sample interval.
struct DiscreteModel {
    std::shared_ptr<const models::VectorField> field;
    double dt = 0.0;

    Vec step(const Vec& x, const Vec& u) const { return models::rk4_step(*field, x, u, dt); }
    int state_dim() const { return field->state_dim(); }
};

/// Exact d step / d x, by forward sensitivity through the four RK4 stages.
Mat dynamics_jacobian(const DiscreteModel& model, const Vec& x, const Vec& u);

}  // namespace knodest::estimators
