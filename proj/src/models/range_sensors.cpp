#include "knodest/models/range_sensors.hpp"

#include <cassert>

namespace knodest::models {

Vec range_heading_measurement(const Vec& state, const std::vector<Eigen::Vector2d>& sensors) {
    assert(state.size() == 4);
    assert(!sensors.empty());

    const int num_sensors = static_cast<int>(sensors.size());
    Vec y(num_sensors + 1);
    for (int i = 0; i < num_sensors; ++i) {
        y[i] = std::hypot(state[0] - sensors[i][0], state[1] - sensors[i][1]);
    }
    y[num_sensors] = state[3];
    return y;
}

RangeHeadingMeasurement::RangeHeadingMeasurement(std::vector<Eigen::Vector2d> sensors)
    : sensors_(std::move(sensors)) {
    if (sensors_.empty()) throw Error("RangeHeadingMeasurement: at least one sensor required");
}

Mat RangeHeadingMeasurement::jac_state(const Vec& x, const Vec&) const {
    const int num_sensors = static_cast<int>(sensors_.size());
    Mat jac = Mat::Zero(num_sensors + 1, 4);
    for (int i = 0; i < num_sensors; ++i) {
        const double dx = x[0] - sensors_[i][0];
        const double dy = x[1] - sensors_[i][1];
        const double r = std::hypot(dx, dy);
        if (r > 0.0) {
            jac(i, 0) = dx / r;
            jac(i, 1) = dy / r;
        }
    }
    jac(num_sensors, 3) = 1.0;
    return jac;
}

}  // namespace knodest::models
