#pragma once

#include <cstdint>

#include "knodest/core.hpp"

namespace knodest::knode {

/// Two-layer perceptron with tanh hidden activation and identity output:
/// y = w2 * tanh(w1 * [x; u] + b1) + b2. The output dimension equals the
/// state dimension n; the input is the concatenated (state, input) pair.
struct MlpParams {
    Mat w1;  // hidden x (n + p)
    Vec b1;  // hidden
    Mat w2;  // n x hidden
    Vec b2;  // n
    int input_dim = 0;  // p, so the state block of the input can be recovered

    int state_dim() const { return static_cast<int>(w2.rows()); }
    int hidden() const { return static_cast<int>(b1.size()); }
    int param_count() const {
        return static_cast<int>(w1.size() + b1.size() + w2.size() + b2.size());
    }

    static MlpParams zeros(int n, int p, int hidden);
    /// Weights uniform in +/- 1/sqrt(fan_in), biases zero.
    static MlpParams random_init(int n, int p, int hidden, std::uint64_t seed);

    /// Column-major concatenation [vec(w1); b1; vec(w2); b2].
    Vec flatten() const;
    static MlpParams unflatten(const Vec& theta, int n, int p, int hidden);
};

Vec mlp_forward(const MlpParams& params, const Vec& state, const Vec& input);

/// d mlp_forward / d state (the first n input columns), n x n.
Mat mlp_jac_state(const MlpParams& params, const Vec& state, const Vec& input);

/// Accumulates d(adjoint . mlp_forward)/d params into grad (same shapes).
void mlp_backward(const MlpParams& params, const Vec& state, const Vec& input, const Vec& adjoint,
                  MlpParams& grad);

}  // namespace knodest::knode
