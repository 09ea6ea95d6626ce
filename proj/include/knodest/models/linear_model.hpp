#pragma once

#include "knodest/models/vector_field.hpp"

namespace knodest::models {

/// Linear state map xdot = A x with output y = C x.
struct LinearModelParams {
    Mat A;
    Mat C;
};

/// Returns A * state.
Vec linear_deriv(const Vec& state, const LinearModelParams& params);

/// Selects cart position and pole angle, y = [x_1, x_3], realizing the
/// partial cartpole measurement as a 2x4 row selector.
Vec selector_measurement(const Vec& state);

class LinearField final : public VectorField {
public:
    explicit LinearField(Mat A, int input_dim = 0) : A_(std::move(A)), input_dim_(input_dim) {}

    int state_dim() const override { return static_cast<int>(A_.rows()); }
    int input_dim() const override { return input_dim_; }

    Vec eval(const Vec& x, const Vec&) const override { return A_ * x; }
    Mat jac_state(const Vec&, const Vec&) const override { return A_; }

    const Mat& A() const { return A_; }

private:
    Mat A_;
    int input_dim_;
};

/// y = C x for a fixed selector/output matrix C.
class LinearMeasurement final : public MeasurementModel {
public:
    explicit LinearMeasurement(Mat C) : C_(std::move(C)) {}

    int meas_dim() const override { return static_cast<int>(C_.rows()); }

    Vec eval(const Vec& x, const Vec&) const override { return C_ * x; }
    Mat jac_state(const Vec&, const Vec&) const override { return C_; }

    const Mat& C() const { return C_; }

private:
    Mat C_;
};

}  // namespace knodest::models
