#include "knodest/estimators/mhe.hpp"

#include <cmath>
#include <utility>

namespace knodest::estimators {

namespace {

// W = L L^T, so |L^T s|^2 = s^T W s.
Mat weight_chol_t(const Mat& w, const char* name) {
    Eigen::LLT<Mat> llt(w);
    if (llt.info() != Eigen::Success) {
        throw ConditioningError(std::string("mhe: weight ") + name + " is not positive definite");
    }
    return Mat(llt.matrixL()).transpose();
}

struct Stacked {
    const MheWindow& window;
    const DiscreteModel& model;
    const models::MeasurementModel& meas;
    const MheConfig& config;
    Mat lpt, lqt, lrt;
    int n, m, len;

    Stacked(const MheWindow& win, const DiscreteModel& mdl, const models::MeasurementModel& ms,
            const MheConfig& cfg)
        : window(win),
          model(mdl),
          meas(ms),
          config(cfg),
          lpt(weight_chol_t(cfg.P, "P")),
          lqt(weight_chol_t(cfg.Q, "Q")),
          lrt(weight_chol_t(cfg.R, "R")),
          n(mdl.state_dim()),
          m(ms.meas_dim()),
          len(win.length()) {}

    int rows() const { return n + (len - 1) * n + len * m; }
    int cols() const { return len * n; }

    void residual(const std::vector<Vec>& states, Vec& r) const {
        Vec diff = states[0] - window.arrival_estimate;
        wrap_angles(diff, config.angle_state_indices);
        r.head(n) = lpt * diff;
        int row = n;
        for (int i = 0; i + 1 < len; ++i, row += n) {
            diff = states[i + 1] - model.step(states[i], window.inputs[i]);
            wrap_angles(diff, config.angle_state_indices);
            r.segment(row, n) = lqt * diff;
        }
        for (int i = 0; i < len; ++i, row += m) {
            Vec innov = window.measurements[i] - meas.eval(states[i], window.inputs[i]);
            wrap_angles(innov, config.angle_meas_indices);
            r.segment(row, m) = lrt * innov;
        }
    }

    void jacobian(const std::vector<Vec>& states, Mat& jac) const {
        jac.setZero();
        jac.topLeftCorner(n, n) = lpt;
        int row = n;
        for (int i = 0; i + 1 < len; ++i, row += n) {
            jac.block(row, (i + 1) * n, n, n) = lqt;
            jac.block(row, i * n, n, n).noalias() =
                -lqt * dynamics_jacobian(model, states[i], window.inputs[i]);
        }
        for (int i = 0; i < len; ++i, row += m) {
            jac.block(row, i * n, m, n).noalias() =
                -lrt * meas.jac_state(states[i], window.inputs[i]);
        }
    }
};

}  // namespace

Vec mhe_residuals(const std::vector<Vec>& states, const MheWindow& window,
                  const DiscreteModel& model, const models::MeasurementModel& meas,
                  const MheConfig& config) {
    if (static_cast<int>(states.size()) != window.length()) {
        throw Error("mhe_residuals: state count does not match window length");
    }
    Stacked prob(window, model, meas, config);
    Vec r(prob.rows());
    prob.residual(states, r);
    return r;
}

MheSolution mhe_solve(const MheWindow& window, const DiscreteModel& model,
                      const models::MeasurementModel& meas, const MheConfig& config) {
    const int len = window.length();
    if (len < 1) throw Error("mhe_solve: empty window");
    Stacked prob(window, model, meas, config);
    const int n = prob.n;

    std::vector<Vec> states;
    if (static_cast<int>(window.warm_start.size()) == len) {
        states = window.warm_start;
    } else {
        states.assign(len, window.arrival_estimate);
    }

    Vec r(prob.rows()), r_trial(prob.rows());
    Mat jac(prob.rows(), prob.cols());
    std::vector<Vec> trial(states);

    prob.residual(states, r);
    double cost = r.squaredNorm();
    double mu = config.initial_damping;

    MheSolution sol;
    for (int iter = 0; iter < config.max_iterations; ++iter) {
        prob.jacobian(states, jac);
        const Vec jtr = jac.transpose() * r;
        if ((2.0 * jtr).norm() < config.gradient_tol) {
            sol.converged = true;
            break;
        }
        const Mat jtj = jac.transpose() * jac;

        bool accepted = false;
        while (true) {
            Mat a = jtj;
            a.diagonal().array() += mu;
            const Vec delta = a.ldlt().solve(-jtr);
            for (int k = 0; k < len; ++k) trial[k] = states[k] + delta.segment(k * n, n);
            prob.residual(trial, r_trial);
            const double cost_trial = r_trial.squaredNorm();
            if (std::isfinite(cost_trial) && cost_trial < cost) {
                const double reduction = cost - cost_trial;
                states.swap(trial);
                r.swap(r_trial);
                cost = cost_trial;
                mu *= 0.5;
                accepted = true;
                // Relative-reduction stop: once steps no longer move the
                // objective beyond rounding, the iterate is numerically
                // optimal; without this the loop spins until the damping
                // escalation bails and mislabels the optimum as a stall.
                if (reduction <= 1e-12 * (1.0 + cost)) {
                    sol.converged = true;
                }
                break;
            }
            mu *= 10.0;
            if (mu > 1e14) break;
        }
        sol.iterations = iter + 1;
        if (sol.converged) break;
        if (!accepted) {
            sol.stalled = true;  // keep the best (current) iterate
            break;
        }
    }

    sol.states = std::move(states);
    sol.objective = cost;
    return sol;
}

MheStepResult mhe_step(MheWindow& window, const Vec& y, const Vec& u, const DiscreteModel& model,
                       const models::MeasurementModel& meas, const MheConfig& config) {
    window.measurements.push_back(y);
    window.inputs.push_back(u);

    bool slid = false;
    if (window.length() > config.horizon + 1) {
        window.measurements.pop_front();
        window.inputs.pop_front();
        if (window.warm_start.size() >= 2) window.arrival_estimate = window.warm_start[1];
        slid = true;
    }

    std::vector<Vec> guess;
    if (window.warm_start.empty()) {
        guess.assign(window.length(), window.arrival_estimate);
    } else {
        guess = window.warm_start;
        if (slid) guess.erase(guess.begin());
        guess.push_back(guess.back());  // repeat the newest state for the fresh sample
    }
    window.warm_start = std::move(guess);

    MheStepResult out;
    out.solution = mhe_solve(window, model, meas, config);
    window.warm_start = out.solution.states;
    out.estimate = out.solution.states.back();
    return out;
}

}  // namespace knodest::estimators
