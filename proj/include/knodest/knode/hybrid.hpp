#pragma once

#include <memory>

#include "knodest/knode/mlp.hpp"
#include "knodest/models/integrators.hpp"
#include "knodest/models/vector_field.hpp"

namespace knodest::knode {

/// Hybrid continuous-time model: f(x,u) = f_prior(x,u) + mlp(x,u). Usable
/// anywhere a VectorField is expected (estimators, integrators).
class HybridModel final : public models::VectorField {
  public:
    HybridModel(std::shared_ptr<const models::VectorField> prior, MlpParams residual)
        : prior_(std::move(prior)), residual_(std::move(residual)) {}

    int state_dim() const override { return prior_->state_dim(); }
    int input_dim() const override { return prior_->input_dim(); }

    Vec eval(const Vec& state, const Vec& input) const override {
        return prior_->eval(state, input) + mlp_forward(residual_, state, input);
    }

    Mat jac_state(const Vec& state, const Vec& input) const override {
        return prior_->jac_state(state, input) + mlp_jac_state(residual_, state, input);
    }

    const models::VectorField& prior() const { return *prior_; }
    std::shared_ptr<const models::VectorField> prior_ptr() const { return prior_; }
    const MlpParams& residual() const { return residual_; }

  private:
    std::shared_ptr<const models::VectorField> prior_;
    MlpParams residual_;
};

inline Vec hybrid_deriv(const HybridModel& model, const Vec& state, const Vec& input) {
    return model.eval(state, input);
}

/// One-step state prediction over a sample interval: a single RK4 step of
/// the hybrid field under zero-order-hold input.
inline Vec one_step_predict(const HybridModel& model, const Vec& zeta, const Vec& input,
                            double dt) {
    return models::rk4_step(model, zeta, input, dt);
}

}  // namespace knodest::knode
