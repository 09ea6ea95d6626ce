#include "knodest/bench/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace knodest::bench {

double mse(const std::vector<Vec>& estimates, const std::vector<Vec>& truth) {
    if (estimates.empty() || estimates.size() != truth.size()) {
        throw Error("mse: empty or mismatched trajectories");
    }
    double total = 0.0;
    std::size_t components = 0;
    for (std::size_t i = 0; i < estimates.size(); ++i) {
        if (estimates[i].size() != truth[i].size()) {
            throw Error("mse: state dimension mismatch at step " + std::to_string(i));
        }
        total += (estimates[i] - truth[i]).squaredNorm();
        components += static_cast<std::size_t>(estimates[i].size());
    }
    return total / static_cast<double>(components);
}

AggregateStats aggregate(std::vector<double> values) {
    AggregateStats out;
    out.count = static_cast<int>(values.size());
    if (values.empty()) return out;

    // Sorting first makes the statistics independent of run ordering down to
    // the last bit.
    std::sort(values.begin(), values.end());

    double sum = 0.0;
    for (double v : values) sum += v;
    out.mean = sum / out.count;

    if (out.count > 1 && values.front() != values.back()) {
        double ss = 0.0;
        for (double v : values) ss += (v - out.mean) * (v - out.mean);
        out.stddev = std::sqrt(ss / (out.count - 1));
    }

    const int mid = out.count / 2;
    out.median = out.count % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
    return out;
}

}  // namespace knodest::bench
