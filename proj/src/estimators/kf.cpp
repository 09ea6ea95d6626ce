#include "knodest/estimators/kf.hpp"

namespace knodest::estimators {

KfState kf_step(const KfState& state, const LinearKfModel& model, const Vec& u, const Vec& y,
                const std::vector<int>& angle_meas_indices) {
    const int n = state.mean.size();
    const Mat eye = Mat::Identity(n, n);

    // Predict.
    Vec x_pred = model.A * state.mean;
    if (model.B.size() > 0) x_pred += model.B * u;
    Mat p_pred = model.A * state.cov * model.A.transpose() + model.Q;
    p_pred = 0.5 * (p_pred + p_pred.transpose()).eval();

    // Update.
    Vec innov = y - model.C * x_pred;
    wrap_angles(innov, angle_meas_indices);
    Mat s = model.C * p_pred * model.C.transpose() + model.R;
    s = 0.5 * (s + s.transpose()).eval();
    Eigen::LDLT<Mat> ldlt(s);
    const double dmax = ldlt.vectorD().maxCoeff();
    if (!(dmax > 0.0) || !(ldlt.vectorD().minCoeff() > dmax * 1e-15)) {
        throw ConditioningError("kf_step: innovation covariance is singular");
    }
    Mat gain = ldlt.solve(model.C * p_pred).transpose();

    KfState out;
    out.mean = x_pred + gain * innov;
    // Joseph form keeps the posterior covariance symmetric positive definite.
    Mat j = eye - gain * model.C;
    out.cov = j * p_pred * j.transpose() + gain * model.R * gain.transpose();
    out.cov = 0.5 * (out.cov + out.cov.transpose()).eval();
    if (!out.mean.allFinite() || !out.cov.allFinite()) {
        throw DivergenceError("kf_step: non-finite state");
    }
    return out;
}

}  // namespace knodest::estimators
