#include "knodest/models/linear_model.hpp"

#include <cassert>

namespace knodest::models {

Vec linear_deriv(const Vec& state, const LinearModelParams& params) {
    assert(params.A.cols() == state.size());
    return params.A * state;
}

Vec selector_measurement(const Vec& state) {
    assert(state.size() == 4);
    Vec y(2);
    y << state[0], state[2];
    return y;
}

}  // namespace knodest::models
