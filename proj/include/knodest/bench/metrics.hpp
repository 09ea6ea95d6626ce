#pragma once

#include <vector>

#include "knodest/core.hpp"

namespace knodest::bench {

/// Mean over time steps and state components of the squared estimate error.
double mse(const std::vector<Vec>& estimates, const std::vector<Vec>& truth);

struct AggregateStats {
    double mean = 0.0;
    double stddev = 0.0;  // Bessel-corrected sample standard deviation
    double median = 0.0;
    int count = 0;
};

/// Sample statistics of per-run MSEs (order-independent).
AggregateStats aggregate(std::vector<double> values);

}  // namespace knodest::bench
