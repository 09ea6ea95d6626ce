#pragma once

#include "knodest/models/vector_field.hpp"

namespace knodest::models {

/// Ranges from fixed beacons plus the onboard heading reading, for the
/// ground robot state [x, y, v, psi]:
///   y = [r_1, ..., r_K, psi],  r_i = hypot(x - p_ix, y - p_iy).
Vec range_heading_measurement(const Vec& state, const std::vector<Eigen::Vector2d>& sensors);

class RangeHeadingMeasurement final : public MeasurementModel {
public:
    explicit RangeHeadingMeasurement(std::vector<Eigen::Vector2d> sensors);

    int meas_dim() const override { return static_cast<int>(sensors_.size()) + 1; }

    Vec eval(const Vec& x, const Vec&) const override { return range_heading_measurement(x, sensors_); }
    Mat jac_state(const Vec& x, const Vec& u) const override;

    const std::vector<Eigen::Vector2d>& sensors() const { return sensors_; }

private:
    std::vector<Eigen::Vector2d> sensors_;
};

}  // namespace knodest::models
