#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace knodest {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Base class for all toolkit errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Adaptive integration could not reach the requested time.
struct IntegrationError : Error {
    using Error::Error;
};

/// A covariance or normal-equations matrix could not be factorized.
struct ConditioningError : Error {
    using Error::Error;
};

/// Non-finite values appeared during estimation or training.
struct DivergenceError : Error {
    using Error::Error;
};

/// Malformed file content.
struct ParseError : Error {
    using Error::Error;
};

/// Wraps an angle to the interval (-pi, pi].
inline double wrap_angle(double a) {
    a = std::fmod(a + M_PI, 2.0 * M_PI);
    if (a <= 0.0) a += 2.0 * M_PI;
    return a - M_PI;
}

/// Wraps the flagged components of a residual/innovation vector in place.
inline void wrap_angles(Vec& v, const std::vector<int>& angle_indices) {
    for (int idx : angle_indices) v[idx] = wrap_angle(v[idx]);
}

}  // namespace knodest
