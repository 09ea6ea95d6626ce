#include "knodest/knode/mlp.hpp"

#include <random>

namespace knodest::knode {

MlpParams MlpParams::zeros(int n, int p, int hidden) {
    MlpParams out;
    out.w1 = Mat::Zero(hidden, n + p);
    out.b1 = Vec::Zero(hidden);
    out.w2 = Mat::Zero(n, hidden);
    out.b2 = Vec::Zero(n);
    out.input_dim = p;
    return out;
}

MlpParams MlpParams::random_init(int n, int p, int hidden, std::uint64_t seed) {
    MlpParams out = zeros(n, p, hidden);
    std::mt19937_64 rng(seed);
    const double bound1 = 1.0 / std::sqrt(static_cast<double>(n + p));
    const double bound2 = 1.0 / std::sqrt(static_cast<double>(hidden));
    std::uniform_real_distribution<double> u1(-bound1, bound1);
    std::uniform_real_distribution<double> u2(-bound2, bound2);
    for (Eigen::Index i = 0; i < out.w1.size(); ++i) out.w1.data()[i] = u1(rng);
    for (Eigen::Index i = 0; i < out.w2.size(); ++i) out.w2.data()[i] = u2(rng);
    return out;
}

Vec MlpParams::flatten() const {
    Vec theta(param_count());
    Eigen::Index at = 0;
    theta.segment(at, w1.size()) = Eigen::Map<const Vec>(w1.data(), w1.size());
    at += w1.size();
    theta.segment(at, b1.size()) = b1;
    at += b1.size();
    theta.segment(at, w2.size()) = Eigen::Map<const Vec>(w2.data(), w2.size());
    at += w2.size();
    theta.segment(at, b2.size()) = b2;
    return theta;
}

MlpParams MlpParams::unflatten(const Vec& theta, int n, int p, int hidden) {
    MlpParams out = zeros(n, p, hidden);
    if (theta.size() != out.param_count()) {
        throw Error("MlpParams::unflatten: parameter vector size mismatch");
    }
    Eigen::Index at = 0;
    Eigen::Map<Vec>(out.w1.data(), out.w1.size()) = theta.segment(at, out.w1.size());
    at += out.w1.size();
    out.b1 = theta.segment(at, out.b1.size());
    at += out.b1.size();
    Eigen::Map<Vec>(out.w2.data(), out.w2.size()) = theta.segment(at, out.w2.size());
    at += out.w2.size();
    out.b2 = theta.segment(at, out.b2.size());
    return out;
}

Vec mlp_forward(const MlpParams& params, const Vec& state, const Vec& input) {
    Vec in(state.size() + input.size());
    in << state, input;
    const Vec a = (params.w1 * in + params.b1).array().tanh();
    return params.w2 * a + params.b2;
}

Mat mlp_jac_state(const MlpParams& params, const Vec& state, const Vec& input) {
    Vec in(state.size() + input.size());
    in << state, input;
    const Vec a = (params.w1 * in + params.b1).array().tanh();
    const Vec dact = 1.0 - a.array().square();
    return params.w2 * dact.asDiagonal() * params.w1.leftCols(state.size());
}

void mlp_backward(const MlpParams& params, const Vec& state, const Vec& input, const Vec& adjoint,
                  MlpParams& grad) {
    Vec in(state.size() + input.size());
    in << state, input;
    const Vec a = (params.w1 * in + params.b1).array().tanh();
    grad.w2.noalias() += adjoint * a.transpose();
    grad.b2 += adjoint;
    const Vec delta =
        (params.w2.transpose() * adjoint).array() * (1.0 - a.array().square());
    grad.w1.noalias() += delta * in.transpose();
    grad.b1 += delta;
}

}  // namespace knodest::knode
