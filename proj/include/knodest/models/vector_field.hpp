#pragma once

#include "knodest/core.hpp"

namespace knodest::models {

/// Continuous-time dynamics xdot = f(x, u).
///
/// Implementations must be deterministic and side-effect free; eval and
/// jac_state are safe to call concurrently. jac_state returns the exact
/// analytic Jacobian d f / d x, which the discrete-time sensitivity
/// propagation and the MHE solver rely on.
class VectorField {
public:
    virtual ~VectorField() = default;

    virtual int state_dim() const = 0;
    virtual int input_dim() const = 0;

    virtual Vec eval(const Vec& x, const Vec& u) const = 0;
    virtual Mat jac_state(const Vec& x, const Vec& u) const = 0;
};

/// Measurement map y = h(x, u). Noise enters additively outside this map.
class MeasurementModel {
public:
    virtual ~MeasurementModel() = default;

    virtual int meas_dim() const = 0;

    virtual Vec eval(const Vec& x, const Vec& u) const = 0;
    virtual Mat jac_state(const Vec& x, const Vec& u) const = 0;
};

}  // namespace knodest::models
