#pragma once

#include <functional>

#include "knodest/models/vector_field.hpp"

namespace knodest::models {

/// One classical RK4 step with the input held constant over the step.
Vec rk4_step(const VectorField& field, const Vec& state, const Vec& input, double dt);

/// Adaptive Dormand-Prince (RK45) integration from t0 to t1.
///
/// input_fn supplies the control input as a function of time; pass a
/// constant lambda for zero-order hold. Throws IntegrationError when the
/// step size underflows before reaching t1.
Vec rk45_integrate(const VectorField& field, const Vec& state,
                   const std::function<Vec(double)>& input_fn, double t0, double t1,
                   double rel_tol, double abs_tol = 1e-12);

}  // namespace knodest::models
