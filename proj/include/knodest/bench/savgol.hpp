#pragma once

#include <vector>

#include "knodest/core.hpp"

namespace knodest::bench {

struct SavgolResult {
    std::vector<double> value;
    std::vector<double> deriv1;
    std::vector<double> deriv2;
};

/// Savitzky-Golay smoothing: least-squares polynomial fit of the given order
/// over a sliding window, returning the fitted value and its first two
/// derivatives (scaled by the sample interval dt). Boundary samples are
/// served by evaluating the first/last full-window fit at the corresponding
/// offset. window must be odd and > order; series length must be >= window.
SavgolResult savgol_smooth(const std::vector<double>& series, int window, int order, double dt);

}  // namespace knodest::bench
