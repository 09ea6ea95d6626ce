#include <doctest.h>

#include <cmath>
#include <random>

#include "knodest/models/cartpole.hpp"
#include "knodest/models/ground_robot.hpp"
#include "knodest/models/integrators.hpp"
#include "knodest/models/linear_model.hpp"
#include "knodest/models/range_sensors.hpp"

using namespace knodest;
using namespace knodest::models;

namespace {

Vec vec4(double a, double b, double c, double d) {
    Vec v(4);
    v << a, b, c, d;
    return v;
}

// Scalar exponential field, the closed-form integrator oracle.
class ExpField final : public VectorField {
  public:
    int state_dim() const override { return 1; }
    int input_dim() const override { return 0; }
    Vec eval(const Vec& x, const Vec&) const override { return x; }
    Mat jac_state(const Vec&, const Vec&) const override { return Mat::Identity(1, 1); }
};

class ZeroField final : public VectorField {
  public:
    explicit ZeroField(int n) : n_(n) {}
    int state_dim() const override { return n_; }
    int input_dim() const override { return 0; }
    Vec eval(const Vec&, const Vec&) const override { return Vec::Zero(n_); }
    Mat jac_state(const Vec&, const Vec&) const override { return Mat::Zero(n_, n_); }

  private:
    int n_;
};

}  // namespace

TEST_CASE("cartpole derivative vanishes at the upright equilibrium") {
    CartpoleParams params;
    const Vec d = cartpole_deriv(Vec::Zero(4), 0.0, params);
    CHECK(d.lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("cartpole derivative at a horizontal pole matches the hand value") {
    CartpoleParams params;
    params.m_c = 1.0;
    params.m_p = 0.1;
    params.l = 0.5;
    params.g = 9.81;
    const Vec d = cartpole_deriv(vec4(0, 0, M_PI / 2.0, 0), 0.0, params);
    // alpha_dd = g / (l * 4/3); the cart acceleration vanishes with cos(alpha).
    CHECK(d[3] == doctest::Approx(14.715).epsilon(1e-12));
    CHECK(d[1] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(d[0] == 0.0);
    CHECK(d[2] == 0.0);
}

TEST_CASE("cartpole derivative is odd in (state, force)") {
    CartpoleParams params;
    params.m_c = 1.5;
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int i = 0; i < 1000; ++i) {
        const Vec x = vec4(u(rng), u(rng), u(rng), u(rng));
        const double f = 3.0 * u(rng);
        const Vec a = cartpole_deriv(x, f, params);
        const Vec b = cartpole_deriv(-x, -f, params);
        CHECK((a + b).lpNorm<Eigen::Infinity>() <= 1e-13 * (1.0 + a.lpNorm<Eigen::Infinity>()));
    }
}

TEST_CASE("ground robot derivative with zero speed only accelerates") {
    GroundRobotParams params;
    Vec in(2);
    in << 0.5, 0.2;
    const Vec d = ground_robot_deriv(vec4(1, 2, 0, 0.3), in, params);
    CHECK(d[0] == 0.0);
    CHECK(d[1] == 0.0);
    CHECK(d[2] == doctest::Approx(0.5));
    CHECK(d[3] == 0.0);
}

TEST_CASE("ground robot derivative reduces to straight-line motion at zero steering") {
    GroundRobotParams params;
    Vec in(2);
    in << 0.1, 0.0;
    const Vec x = vec4(0.3, -0.4, 1.7, 0.9);
    const Vec d = ground_robot_deriv(x, in, params);
    CHECK(d[0] == doctest::Approx(1.7 * std::cos(0.9)).epsilon(1e-14));
    CHECK(d[1] == doctest::Approx(1.7 * std::sin(0.9)).epsilon(1e-14));
    CHECK(d[3] == 0.0);
    // Drag off: speed is preserved under pure steering-free coasting.
    in << 0.0, 0.0;
    CHECK(ground_robot_deriv(x, in, params)[2] == 0.0);
}

TEST_CASE("ground robot drag term matches the hand value") {
    GroundRobotParams params;
    params.drag_coeff = 0.05;
    params.drag_enabled = true;
    const Vec d = ground_robot_deriv(vec4(0, 0, 2, 0), Vec::Zero(2), params);
    CHECK(d[2] == doctest::Approx(-0.2).epsilon(1e-14));
}

TEST_CASE("ground robot rejects steering at the tangent singularity") {
    GroundRobotParams params;
    Vec in(2);
    in << 0.0, M_PI / 2.0;
    CHECK_THROWS_AS(ground_robot_deriv(vec4(0, 0, 1, 0), in, params), Error);
    in << 0.0, -1.6;
    CHECK_THROWS_AS(ground_robot_deriv(vec4(0, 0, 1, 0), in, params), Error);
}

TEST_CASE("linear derivative is the matrix-vector product") {
    LinearModelParams params;
    params.A = Mat::Zero(2, 2);
    Vec x(2);
    x << 1, 2;
    CHECK(linear_deriv(x, params).lpNorm<Eigen::Infinity>() == 0.0);

    params.A = Mat::Identity(2, 2);
    CHECK((linear_deriv(x, params) - x).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("triple-integrator chain maps accelerations into the velocity block") {
    // positions (0..2) <- velocities (3..5) <- accelerations (6..8)
    Mat a = Mat::Zero(9, 9);
    a.block(0, 3, 3, 3) = Mat::Identity(3, 3);
    a.block(3, 6, 3, 3) = Mat::Identity(3, 3);
    LinearModelParams params;
    params.A = a;
    Vec x = Vec::Zero(9);
    x.tail(3) = Vec::Ones(3);
    const Vec d = linear_deriv(x, params);
    CHECK((d.segment(3, 3) - Vec::Ones(3)).lpNorm<Eigen::Infinity>() == 0.0);
    CHECK(d.head(3).lpNorm<Eigen::Infinity>() == 0.0);
    CHECK(d.tail(3).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("rk4 step leaves the state unchanged under a zero field") {
    ZeroField field(3);
    Vec x(3);
    x << 1, -2, 0.5;
    CHECK((rk4_step(field, x, Vec(), 0.1) - x).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("rk4 step reproduces the exponential to fourth order") {
    ExpField field;
    Vec x = Vec::Ones(1);
    const Vec next = rk4_step(field, x, Vec(), 0.1);
    CHECK(next[0] == doctest::Approx(1.10517083).epsilon(1e-8));
    CHECK(std::abs(next[0] - std::exp(0.1)) < 1e-7);
}

TEST_CASE("rk4 global error decays with order four") {
    ExpField field;
    const double span = 1.0;
    std::vector<double> dts = {0.1, 0.05, 0.025, 0.0125};
    std::vector<double> errs;
    for (double dt : dts) {
        Vec x = Vec::Ones(1);
        const int steps = static_cast<int>(std::llround(span / dt));
        for (int i = 0; i < steps; ++i) x = rk4_step(field, x, Vec(), dt);
        errs.push_back(std::abs(x[0] - std::exp(span)));
    }
    // Halving dt cuts the global error by about 16x.
    CHECK(errs[0] / errs[1] == doctest::Approx(16.0).epsilon(0.15));
    // Least-squares slope of log(err) against log(dt).
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < dts.size(); ++i) {
        const double lx = std::log(dts[i]);
        const double ly = std::log(errs[i]);
        sx += lx, sy += ly, sxx += lx * lx, sxy += lx * ly;
    }
    const double n = static_cast<double>(dts.size());
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    CHECK(slope == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("rk45 matches the exponential within the requested tolerance") {
    ExpField field;
    Vec x = Vec::Ones(1);
    auto input = [](double) { return Vec(); };
    CHECK((rk45_integrate(field, x, input, 0.0, 0.0, 1e-9) - x).lpNorm<Eigen::Infinity>() == 0.0);
    const Vec end = rk45_integrate(field, x, input, 0.0, 1.0, 1e-9);
    CHECK(std::abs(end[0] - std::exp(1.0)) < 1e-8);

    ZeroField zero(2);
    Vec z(2);
    z << 4, 5;
    CHECK((rk45_integrate(zero, z, input, 0.0, 2.0, 1e-9) - z).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("rk45 agrees with a fine rk4 chain on the cartpole") {
    CartpoleParams params;
    params.m_c = 1.5;
    CartpoleField field(params);
    const Vec x0 = vec4(0, 0, M_PI + 0.1, 0);
    Vec u(1);
    u << 1.0;

    Vec chain = x0;
    const double dt = 1e-4;
    for (int i = 0; i < 10000; ++i) chain = rk4_step(field, chain, u, dt);

    const Vec adaptive = rk45_integrate(field, x0, [&](double) { return u; }, 0.0, 1.0, 1e-10);
    CHECK((chain - adaptive).lpNorm<Eigen::Infinity>() < 1e-6);
}

TEST_CASE("range-heading measurement geometry") {
    std::vector<Eigen::Vector2d> sensors = {{0.0, 0.0}};
    Vec y = range_heading_measurement(vec4(0, 0, 1, 0.2), sensors);
    CHECK(y.size() == 2);
    CHECK(y[0] == 0.0);
    CHECK(y[1] == doctest::Approx(0.2));

    y = range_heading_measurement(vec4(3, 4, 0, 0), sensors);
    CHECK(y[0] == doctest::Approx(5.0).epsilon(1e-15));

    std::vector<Eigen::Vector2d> corners = {{10, 10}, {10, -10}, {-10, 10}, {-10, -10}};
    y = range_heading_measurement(vec4(0, 0, 0, 0), corners);
    for (int i = 0; i < 4; ++i) CHECK(y[i] == doctest::Approx(std::sqrt(200.0)).epsilon(1e-15));
}

TEST_CASE("range measurements are invariant under rigid translation") {
    std::vector<Eigen::Vector2d> sensors = {{10, 10}, {-3, 7}, {5, -9}};
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int i = 0; i < 50; ++i) {
        const Vec x = vec4(u(rng), u(rng), 1.0, 0.5);
        const Eigen::Vector2d shift(u(rng), u(rng));
        auto moved = sensors;
        for (auto& s : moved) s += shift;
        Vec xs = x;
        xs[0] += shift[0];
        xs[1] += shift[1];
        const Vec a = range_heading_measurement(x, sensors);
        const Vec b = range_heading_measurement(xs, moved);
        CHECK((a - b).lpNorm<Eigen::Infinity>() < 1e-12);
    }
}

TEST_CASE("selector measurement picks position and angle") {
    Vec x(4);
    x << 1, 2, 3, 4;
    Vec y = selector_measurement(x);
    CHECK(y[0] == 1.0);
    CHECK(y[1] == 3.0);
    CHECK(selector_measurement(Vec::Zero(4)).lpNorm<Eigen::Infinity>() == 0.0);
    x << 0.5, -1.0, 0.1, 2.0;
    y = selector_measurement(x);
    CHECK(y[0] == 0.5);
    CHECK(y[1] == doctest::Approx(0.1));
}
