#include "knodest/bench/savgol.hpp"

#include <array>

namespace knodest::bench {

SavgolResult savgol_smooth(const std::vector<double>& series, int window, int order, double dt) {
    if (window < 3 || window % 2 == 0) throw Error("savgol_smooth: window must be odd and >= 3");
    if (order < 0 || order >= window) throw Error("savgol_smooth: order must be < window");
    if (!(dt > 0.0)) throw Error("savgol_smooth: dt must be positive");
    const int count = static_cast<int>(series.size());
    if (count < window) throw Error("savgol_smooth: series shorter than window");

    const int half = window / 2;
    const int terms = order + 1;

    // Vandermonde of sample offsets; pinv maps window values to polynomial
    // coefficients in the offset variable (units of samples).
    Mat v(window, terms);
    for (int j = 0; j < window; ++j) {
        double pw = 1.0;
        for (int k = 0; k < terms; ++k) {
            v(j, k) = pw;
            pw *= static_cast<double>(j - half);
        }
    }
    const Mat pinv = (v.transpose() * v).ldlt().solve(v.transpose());

    SavgolResult out;
    out.value.resize(count);
    out.deriv1.resize(count);
    out.deriv2.resize(count);

    Vec win(window), coef(terms);
    auto eval_at = [&](double o) {
        // value and first two derivatives of the fitted polynomial at offset o
        double val = 0.0, d1 = 0.0, d2 = 0.0, pw = 1.0;
        for (int k = 0; k < terms; ++k) {
            val += coef(k) * pw;
            if (k + 1 < terms) d1 += coef(k + 1) * (k + 1) * pw;
            if (k + 2 < terms) d2 += coef(k + 2) * (k + 2) * (k + 1) * pw;
            pw *= o;
        }
        return std::array<double, 3>{val, d1 / dt, d2 / (dt * dt)};
    };

    for (int center = half; center < count - half; ++center) {
        for (int j = 0; j < window; ++j) win(j) = series[center - half + j];
        coef.noalias() = pinv * win;
        const auto r = eval_at(0.0);
        out.value[center] = r[0];
        out.deriv1[center] = r[1];
        out.deriv2[center] = r[2];
    }

    // Boundaries: evaluate the first/last full-window fit at the offsets of
    // the uncovered samples.
    for (int j = 0; j < window; ++j) win(j) = series[j];
    coef.noalias() = pinv * win;
    for (int i = 0; i < half; ++i) {
        const auto r = eval_at(static_cast<double>(i - half));
        out.value[i] = r[0];
        out.deriv1[i] = r[1];
        out.deriv2[i] = r[2];
    }
    for (int j = 0; j < window; ++j) win(j) = series[count - window + j];
    coef.noalias() = pinv * win;
    for (int i = count - half; i < count; ++i) {
        const auto r = eval_at(static_cast<double>(i - (count - 1 - half)));
        out.value[i] = r[0];
        out.deriv1[i] = r[1];
        out.deriv2[i] = r[2];
    }
    return out;
}

}  // namespace knodest::bench
