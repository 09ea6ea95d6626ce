#include "knodest/models/integrators.hpp"

#include <algorithm>
#include <cassert>

namespace knodest::models {

Vec rk4_step(const VectorField& field, const Vec& state, const Vec& input, double dt) {
    assert(dt > 0.0);
    const Vec k1 = field.eval(state, input);
    const Vec k2 = field.eval(state + 0.5 * dt * k1, input);
    const Vec k3 = field.eval(state + 0.5 * dt * k2, input);
    const Vec k4 = field.eval(state + dt * k3, input);
    return state + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double kC[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
// b5 equals the last A row (FSAL); bErr = b5 - b4.
constexpr double kBErr[7] = {35.0 / 384 - 5179.0 / 57600,     0.0,
                             500.0 / 1113 - 7571.0 / 16695,   125.0 / 192 - 393.0 / 640,
                             -2187.0 / 6784 + 92097.0 / 339200, 11.0 / 84 - 187.0 / 2100,
                             -1.0 / 40};

}  // namespace

Vec rk45_integrate(const VectorField& field, const Vec& state,
                   const std::function<Vec(double)>& input_fn, double t0, double t1,
                   double rel_tol, double abs_tol) {
    assert(t1 > t0);

    const double span = t1 - t0;
    const double h_min = 1e-14 * std::max({std::abs(t0), std::abs(t1), 1.0});

    Vec y = state;
    double t = t0;
    double h = span;

    Vec k[7];
    k[0] = field.eval(y, input_fn(t));

    while (t < t1) {
        h = std::min(h, t1 - t);
        if (h < h_min) {
            throw IntegrationError("rk45_integrate: step size underflow at t=" + std::to_string(t));
        }

        for (int stage = 1; stage < 7; ++stage) {
            Vec ys = y;
            for (int j = 0; j < stage; ++j) ys += (h * kA[stage][j]) * k[j];
            k[stage] = field.eval(ys, input_fn(t + kC[stage] * h));
        }
        // Stage 7 is the 5th-order solution itself (FSAL).
        Vec y_new = y;
        for (int j = 0; j < 6; ++j) y_new += (h * kA[6][j]) * k[j];

        Vec err_vec = Vec::Zero(y.size());
        for (int j = 0; j < 7; ++j) err_vec += (h * kBErr[j]) * k[j];

        double err = 0.0;
        for (int i = 0; i < y.size(); ++i) {
            const double scale = abs_tol + rel_tol * std::max(std::abs(y[i]), std::abs(y_new[i]));
            const double e = err_vec[i] / scale;
            err += e * e;
        }
        err = std::sqrt(err / static_cast<double>(y.size()));

        if (err <= 1.0) {
            t += h;
            y = std::move(y_new);
            k[0] = k[6];  // FSAL reuse
            if (!y.allFinite()) {
                throw IntegrationError("rk45_integrate: non-finite state at t=" + std::to_string(t));
            }
        }
        const double factor = (err == 0.0) ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
        h *= factor;
    }
    return y;
}

}  // namespace knodest::models
