#include "knodest/knode/training.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <string>

namespace knodest::knode {

void ObservationSet::validate() const {
    if (times.size() != states.size() || inputs.size() != states.size()) {
        throw Error("ObservationSet: times/states/inputs lengths differ");
    }
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (!(times[i] > times[i - 1])) {
            throw Error("ObservationSet: times not strictly increasing at sample " +
                        std::to_string(i));
        }
    }
}

double training_loss(const MlpParams& params, const models::VectorField& prior,
                     const ObservationSet& obs) {
    obs.validate();
    const int m_count = obs.count();
    if (m_count < 2) throw Error("training_loss: need at least two observations");
    const int n = params.state_dim();

    Vec s(n), k(n), zeta_hat(n), act(params.hidden());
    Vec in(n + params.input_dim);
    double total = 0.0;
    for (int i = 0; i + 1 < m_count; ++i) {
        const Vec& z0 = obs.states[i];
        const Vec& u = obs.inputs[i];
        const double dt = obs.times[i + 1] - obs.times[i];
        in.tail(params.input_dim) = u;

        zeta_hat = z0;
        s = z0;
        for (int stage = 0; stage < 4; ++stage) {
            in.head(n) = s;
            act = (params.w1 * in + params.b1).array().tanh();
            k.noalias() = params.w2 * act;
            k += params.b2;
            k += prior.eval(s, u);
            switch (stage) {
                case 0:
                    zeta_hat += (dt / 6.0) * k;
                    s = z0 + (0.5 * dt) * k;
                    break;
                case 1:
                    zeta_hat += (dt / 3.0) * k;
                    s = z0 + (0.5 * dt) * k;
                    break;
                case 2:
                    zeta_hat += (dt / 3.0) * k;
                    s = z0 + dt * k;
                    break;
                default:
                    zeta_hat += (dt / 6.0) * k;
            }
        }
        total += (zeta_hat - obs.states[i + 1]).squaredNorm();
    }
    return total / static_cast<double>(m_count - 1);
}

double loss_gradient(const MlpParams& params, const models::VectorField& prior,
                     const ObservationSet& obs, MlpParams& grad) {
    obs.validate();
    const int m_count = obs.count();
    if (m_count < 2) throw Error("loss_gradient: need at least two observations");
    const int n = params.state_dim();
    const int h = params.hidden();
    const int p = params.input_dim;

    grad.w1.setZero(h, n + p);
    grad.b1.setZero(h);
    grad.w2.setZero(n, h);
    grad.b2.setZero(n);
    grad.input_dim = p;

    // Workspace reused across all pairs; the inner loop performs no heap
    // allocation beyond the prior's virtual eval/jac returns.
    std::array<Vec, 4> s, in, act;
    std::array<Mat, 4> jf;
    for (int j = 0; j < 4; ++j) {
        s[j].resize(n);
        in[j].resize(n + p);
        act[j].resize(h);
        if (j > 0) jf[j].resize(n, n);
    }
    Vec k(n), zeta_hat(n), gvec(n), lambda(n), tmp(n), delta(h);
    const Mat w1x = params.w1.leftCols(n);
    const Mat w2t = params.w2.transpose();

    const double wpair = 2.0 / static_cast<double>(m_count - 1);
    double total = 0.0;

    auto accumulate = [&](int stage) {
        grad.w2.noalias() += lambda * act[stage].transpose();
        grad.b2 += lambda;
        delta.noalias() = w2t * lambda;
        delta.array() *= 1.0 - act[stage].array().square();
        grad.w1.noalias() += delta * in[stage].transpose();
        grad.b1 += delta;
    };

    for (int i = 0; i + 1 < m_count; ++i) {
        const Vec& z0 = obs.states[i];
        const Vec& u = obs.inputs[i];
        const double dt = obs.times[i + 1] - obs.times[i];

        zeta_hat = z0;
        s[0] = z0;
        for (int stage = 0; stage < 4; ++stage) {
            in[stage].head(n) = s[stage];
            in[stage].tail(p) = u;
            act[stage] = (params.w1 * in[stage] + params.b1).array().tanh();
            k.noalias() = params.w2 * act[stage];
            k += params.b2;
            k += prior.eval(s[stage], u);
            if (stage > 0) {
                jf[stage] = prior.jac_state(s[stage], u);
                jf[stage].noalias() +=
                    params.w2 * (1.0 - act[stage].array().square()).matrix().asDiagonal() * w1x;
            }
            switch (stage) {
                case 0:
                    zeta_hat += (dt / 6.0) * k;
                    s[1] = z0 + (0.5 * dt) * k;
                    break;
                case 1:
                    zeta_hat += (dt / 3.0) * k;
                    s[2] = z0 + (0.5 * dt) * k;
                    break;
                case 2:
                    zeta_hat += (dt / 3.0) * k;
                    s[3] = z0 + dt * k;
                    break;
                default:
                    zeta_hat += (dt / 6.0) * k;
            }
        }

        tmp = zeta_hat - obs.states[i + 1];
        total += tmp.squaredNorm();
        gvec = wpair * tmp;

        // Reverse sweep: lambda_j is the adjoint of stage derivative k_j.
        lambda = (dt / 6.0) * gvec;
        accumulate(3);
        tmp.noalias() = jf[3].transpose() * lambda;
        lambda = (dt / 3.0) * gvec + dt * tmp;
        accumulate(2);
        tmp.noalias() = jf[2].transpose() * lambda;
        lambda = (dt / 3.0) * gvec + (0.5 * dt) * tmp;
        accumulate(1);
        tmp.noalias() = jf[1].transpose() * lambda;
        lambda = (dt / 6.0) * gvec + (0.5 * dt) * tmp;
        accumulate(0);
    }
    return total / static_cast<double>(m_count - 1);
}

void adam_step(Vec& theta, const Vec& grad, AdamState& moments, const TrainConfig& config,
               int t) {
    if (t < 1) throw Error("adam_step: iteration index must be >= 1");
    if (moments.m.size() != theta.size()) {
        moments.m = Vec::Zero(theta.size());
        moments.v = Vec::Zero(theta.size());
    }
    moments.m = config.beta1 * moments.m + (1.0 - config.beta1) * grad;
    moments.v = config.beta2 * moments.v + (1.0 - config.beta2) * grad.cwiseProduct(grad);
    const double mc = 1.0 - std::pow(config.beta1, t);
    const double vc = 1.0 - std::pow(config.beta2, t);
    theta.array() -= config.learning_rate * (moments.m.array() / mc) /
                     ((moments.v.array() / vc).sqrt() + config.epsilon);
}

TrainResult train(const ObservationSet& obs, std::shared_ptr<const models::VectorField> prior,
                  const TrainConfig& config) {
    if (config.epochs < 1 || config.learning_rate <= 0.0) {
        throw Error("train: invalid training configuration");
    }
    ObservationSet data;
    const ObservationSet* used = &obs;
    if (config.burn_in_skip > 0) {
        const int skip = config.burn_in_skip;
        if (skip >= obs.count()) throw Error("train: burn-in skip leaves no data");
        data.times.assign(obs.times.begin() + skip, obs.times.end());
        data.states.assign(obs.states.begin() + skip, obs.states.end());
        data.inputs.assign(obs.inputs.begin() + skip, obs.inputs.end());
        used = &data;
    }
    used->validate();
    if (used->count() < 2) throw Error("train: need at least two observations");

    const int n = prior->state_dim();
    const int p = prior->input_dim();
    MlpParams params = MlpParams::random_init(n, p, config.hidden, config.seed);
    Vec theta = params.flatten();
    AdamState adam;
    MlpParams grad = MlpParams::zeros(n, p, config.hidden);

    Vec best = theta;
    double best_loss = std::numeric_limits<double>::infinity();
    int best_epoch = 0;
    std::vector<double> trace;
    trace.reserve(config.epochs + 1);

    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        const double loss = loss_gradient(params, *prior, *used, grad);
        if (!std::isfinite(loss)) {
            throw DivergenceError("train: non-finite loss at epoch " + std::to_string(epoch));
        }
        trace.push_back(loss);
        if (loss < best_loss) {
            best_loss = loss;
            best = theta;
            best_epoch = epoch - 1;
        }
        adam_step(theta, grad.flatten(), adam, config, epoch);
        params = MlpParams::unflatten(theta, n, p, config.hidden);
    }
    const double final_loss = training_loss(params, *prior, *used);
    if (!std::isfinite(final_loss)) {
        throw DivergenceError("train: non-finite loss after final update");
    }
    trace.push_back(final_loss);
    if (final_loss < best_loss) {
        best_loss = final_loss;
        best = theta;
        best_epoch = config.epochs;
    }

    return TrainResult{HybridModel(std::move(prior), MlpParams::unflatten(best, n, p, config.hidden)),
                       std::move(trace), best_loss, best_epoch};
}

}  // namespace knodest::knode
