#include "knodest/estimators/ukf.hpp"

namespace knodest::estimators {

SigmaPoints sigma_points(const Vec& z_hat, const Mat& P_z, const UkfConfig& config) {
    const int L = static_cast<int>(z_hat.size());
    const double lambda = config.lambda(L);
    const double scale = static_cast<double>(L) + lambda;  // alpha^2 (L + kappa) > 0

    SigmaPoints sp;
    sp.points.resize(L, 2 * L + 1);
    sp.points.col(0) = z_hat;

    if (P_z.lpNorm<Eigen::Infinity>() == 0.0) {
        // Degenerate but valid: every sigma vector coincides with the mean.
        for (int i = 0; i < 2 * L; ++i) sp.points.col(1 + i) = z_hat;
    } else {
        Eigen::LLT<Mat> llt(P_z);
        if (llt.info() != Eigen::Success) {
            double jitter = 1e-12;
            while (true) {
                llt.compute(P_z + jitter * Mat::Identity(L, L));
                if (llt.info() == Eigen::Success) break;
                if (jitter >= 1e-6) {
                    throw ConditioningError(
                        "sigma_points: covariance not positive definite after jitter");
                }
                jitter *= 10.0;
            }
        }
        Mat s = llt.matrixL();
        s *= std::sqrt(scale);
        for (int i = 0; i < L; ++i) {
            sp.points.col(1 + i) = z_hat + s.col(i);
            sp.points.col(1 + L + i) = z_hat - s.col(i);
        }
    }

    const double wi = 1.0 / (2.0 * scale);
    sp.w_mean = Vec::Constant(2 * L + 1, wi);
    sp.w_cov = Vec::Constant(2 * L + 1, wi);
    sp.w_mean(0) = lambda / scale;
    sp.w_cov(0) = lambda / scale + (1.0 - config.alpha * config.alpha + config.beta);
    // Close the mean-weight sum to exactly one: the last weight absorbs the
    // accumulated rounding of the formula values (the correction is at most a
    // few ulps, the sequential sum becomes bit-exact).
    double partial = 0.0;
    for (int i = 0; i < 2 * L; ++i) partial += sp.w_mean(i);
    sp.w_mean(2 * L) = 1.0 - partial;
    sp.w_cov(2 * L) = sp.w_mean(2 * L);
    return sp;
}

UkfTimeUpdate ukf_time_update(const UkfState& state, const DiscreteModel& model,
                              const models::MeasurementModel& meas, const Vec& u,
                              const UkfConfig& config) {
    const int n = static_cast<int>(state.mean.size());
    const int q = static_cast<int>(config.Q.rows());
    const int r = static_cast<int>(config.R.rows());
    const int L = n + q + r;
    const int m = meas.meas_dim();

    Vec z = Vec::Zero(L);
    z.head(n) = state.mean;
    Mat p_z = Mat::Zero(L, L);
    p_z.topLeftCorner(n, n) = state.cov;
    p_z.block(n, n, q, q) = config.Q;
    p_z.bottomRightCorner(r, r) = config.R;

    const SigmaPoints sp = sigma_points(z, p_z, config);
    const int cols = 2 * L + 1;

    UkfTimeUpdate tu;
    tu.X_prop.resize(n, cols);
    tu.Y_sig.resize(m, cols);
    for (int c = 0; c < cols; ++c) {
        const Vec xc = sp.points.col(c).head(n);
        Vec xp = model.step(xc, u) + sp.points.col(c).segment(n, q);
        tu.Y_sig.col(c) = meas.eval(xp, u) + sp.points.col(c).tail(r);
        tu.X_prop.col(c) = std::move(xp);
    }

    tu.x_pred = tu.X_prop * sp.w_mean;
    tu.y_pred = tu.Y_sig * sp.w_mean;
    Mat xc = tu.X_prop.colwise() - tu.x_pred;
    tu.P_pred = xc * sp.w_cov.asDiagonal() * xc.transpose();
    tu.P_pred = 0.5 * (tu.P_pred + tu.P_pred.transpose()).eval();
    tu.w_mean = sp.w_mean;
    tu.w_cov = sp.w_cov;

    if (!tu.x_pred.allFinite() || !tu.P_pred.allFinite() || !tu.y_pred.allFinite()) {
        throw DivergenceError("ukf_time_update: non-finite prediction");
    }
    return tu;
}

UkfState ukf_measurement_update(const UkfTimeUpdate& tu, const Vec& y, const UkfConfig& config) {
    const Mat xc = tu.X_prop.colwise() - tu.x_pred;
    const Mat yc = tu.Y_sig.colwise() - tu.y_pred;
    Mat p_yy = yc * tu.w_cov.asDiagonal() * yc.transpose();
    p_yy = 0.5 * (p_yy + p_yy.transpose()).eval();
    const Mat p_xy = xc * tu.w_cov.asDiagonal() * yc.transpose();

    Eigen::LDLT<Mat> ldlt(p_yy);
    const double dmax = ldlt.vectorD().maxCoeff();
    if (!(dmax > 0.0) || !(ldlt.vectorD().minCoeff() > dmax * 1e-15)) {
        throw ConditioningError("ukf_measurement_update: innovation covariance is singular");
    }
    const Mat gain = ldlt.solve(p_xy.transpose()).transpose();

    Vec innov = y - tu.y_pred;
    wrap_angles(innov, config.angle_meas_indices);

    UkfState out;
    out.mean = tu.x_pred + gain * innov;
    out.cov = tu.P_pred - gain * p_yy * gain.transpose();
    out.cov = 0.5 * (out.cov + out.cov.transpose()).eval();
    if (!out.mean.allFinite() || !out.cov.allFinite()) {
        throw DivergenceError("ukf_measurement_update: non-finite state");
    }
    return out;
}

UkfState ukf_step(const UkfState& state, const DiscreteModel& model,
                  const models::MeasurementModel& meas, const Vec& u, const Vec& y,
                  const UkfConfig& config) {
    return ukf_measurement_update(ukf_time_update(state, model, meas, u, config), y, config);
}

UkfState ukf_update_only(const UkfState& state, const models::MeasurementModel& meas,
                         const Vec& u, const Vec& y, const UkfConfig& config) {
    const int n = static_cast<int>(state.mean.size());
    const int r = static_cast<int>(config.R.rows());
    const int L = n + r;
    const int m = meas.meas_dim();

    Vec z = Vec::Zero(L);
    z.head(n) = state.mean;
    Mat p_z = Mat::Zero(L, L);
    p_z.topLeftCorner(n, n) = state.cov;
    p_z.bottomRightCorner(r, r) = config.R;

    const SigmaPoints sp = sigma_points(z, p_z, config);
    const int cols = 2 * L + 1;

    UkfTimeUpdate tu;
    tu.X_prop.resize(n, cols);
    tu.Y_sig.resize(m, cols);
    for (int c = 0; c < cols; ++c) {
        const Vec xc = sp.points.col(c).head(n);
        tu.X_prop.col(c) = xc;
        tu.Y_sig.col(c) = meas.eval(xc, u) + sp.points.col(c).tail(r);
    }
    tu.x_pred = tu.X_prop * sp.w_mean;
    tu.y_pred = tu.Y_sig * sp.w_mean;
    Mat xc = tu.X_prop.colwise() - tu.x_pred;
    tu.P_pred = xc * sp.w_cov.asDiagonal() * xc.transpose();
    tu.P_pred = 0.5 * (tu.P_pred + tu.P_pred.transpose()).eval();
    tu.w_mean = sp.w_mean;
    tu.w_cov = sp.w_cov;
    return ukf_measurement_update(tu, y, config);
}

}  // namespace knodest::estimators
