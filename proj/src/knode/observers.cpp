#include "knodest/knode/observers.hpp"

#include "knodest/estimators/kf.hpp"
#include "knodest/estimators/ukf.hpp"
#include "knodest/models/range_sensors.hpp"

namespace knodest::knode {

namespace {

using estimators::KfState;
using estimators::LinearKfModel;

void check_streams(std::size_t ny, std::size_t nu, double dt, const char* who) {
    if (ny == 0 || ny != nu) {
        throw Error(std::string(who) + ": measurement/input streams empty or length mismatch");
    }
    if (!(dt > 0.0)) throw Error(std::string(who) + ": dt must be positive");
}

// Discrete white-acceleration process noise for one (pos, vel) CV channel.
Mat cv_accel_q(double sigma_a, double dt) {
    Mat q(2, 2);
    q << dt * dt * dt * dt / 4.0, dt * dt * dt / 2.0, dt * dt * dt / 2.0, dt * dt;
    return sigma_a * sigma_a * q;
}

KfState kf_update_only(const KfState& state, const Mat& c, const Mat& r, const Vec& y,
                       const std::vector<int>& angle_meas_indices = {});

// Forward Kalman pass followed by a Rauch-Tung-Striebel backward pass.
// Training data is prepared offline, so the observers can use the smoothed
// (zero-phase) estimates; a purely causal filter lags the velocity states by
// a group delay, and that systematic, input-correlated error is exactly what
// a residual network latches onto during training.
std::vector<Vec> kf_rts_smooth(const LinearKfModel& model, const Vec& init_mean,
                               const Mat& init_cov, const std::vector<Vec>& ys,
                               const std::vector<int>& angle_meas_indices) {
    const int m_count = static_cast<int>(ys.size());
    std::vector<Vec> filt_mean(m_count), pred_mean(m_count);
    std::vector<Mat> filt_cov(m_count), pred_cov(m_count);

    KfState st;
    st.mean = init_mean;
    st.cov = init_cov;
    pred_mean[0] = st.mean;
    pred_cov[0] = st.cov;
    st = kf_update_only(st, model.C, model.R, ys[0], angle_meas_indices);
    filt_mean[0] = st.mean;
    filt_cov[0] = st.cov;
    for (int i = 1; i < m_count; ++i) {
        pred_mean[i] = model.A * st.mean;
        pred_cov[i] = model.A * st.cov * model.A.transpose() + model.Q;
        pred_cov[i] = 0.5 * (pred_cov[i] + pred_cov[i].transpose().eval());
        st.mean = pred_mean[i];
        st.cov = pred_cov[i];
        st = kf_update_only(st, model.C, model.R, ys[i], angle_meas_indices);
        filt_mean[i] = st.mean;
        filt_cov[i] = st.cov;
    }

    std::vector<Vec> smooth(m_count);
    smooth[m_count - 1] = filt_mean[m_count - 1];
    Mat smooth_cov = filt_cov[m_count - 1];
    for (int i = m_count - 2; i >= 0; --i) {
        const Mat gain =
            pred_cov[i + 1].ldlt().solve(model.A * filt_cov[i].transpose()).transpose();
        smooth[i] = filt_mean[i] + gain * (smooth[i + 1] - pred_mean[i + 1]);
        smooth_cov = filt_cov[i] +
                     gain * (smooth_cov - pred_cov[i + 1]) * gain.transpose();
        smooth_cov = 0.5 * (smooth_cov + smooth_cov.transpose().eval());
        if (!smooth[i].allFinite()) {
            throw DivergenceError("kf_rts_smooth: non-finite smoothed state");
        }
    }
    return smooth;
}

// Measurement-only fold of y into (mean, cov); Joseph-form update.
KfState kf_update_only(const KfState& state, const Mat& c, const Mat& r, const Vec& y,
                       const std::vector<int>& angle_meas_indices) {
    Vec innov = y - c * state.mean;
    wrap_angles(innov, angle_meas_indices);
    Mat s = c * state.cov * c.transpose() + r;
    Mat gain = s.ldlt().solve(c * state.cov).transpose();
    KfState out;
    out.mean = state.mean + gain * innov;
    Mat j = Mat::Identity(state.mean.size(), state.mean.size()) - gain * c;
    out.cov = j * state.cov * j.transpose() + gain * r * gain.transpose();
    return out;
}

}  // namespace

ObservationSet pretrain_observe_cartpole(const std::vector<Vec>& ys, const std::vector<Vec>& us,
                                         double dt, const PretrainObserverConfig& config) {
    check_streams(ys.size(), us.size(), dt, "pretrain_observe_cartpole");
    const int m_count = static_cast<int>(ys.size());

    // Constant-velocity channel template shared by the cart-position and
    // pole-angle tracks.
    LinearKfModel ch;
    ch.A = (Mat(2, 2) << 1.0, dt, 0.0, 1.0).finished();
    ch.B = Mat(0, 0);
    ch.C = (Mat(1, 2) << 1.0, 0.0).finished();

    ObservationSet out;
    out.times.resize(m_count);
    out.states.assign(m_count, Vec::Zero(4));
    out.inputs = us;

    std::vector<Vec> channel_meas(m_count);
    for (int channel = 0; channel < 2; ++channel) {
        const int slot = 2 * channel;  // (p, p_dot) or (alpha, alpha_dot)
        ch.Q = cv_accel_q(config.accel_sigma, dt);
        ch.R = Mat::Constant(1, 1, std::pow(config.meas_sigmas(channel), 2));
        const std::vector<int> angle_idx = channel == 1 ? std::vector<int>{0} : std::vector<int>{};

        for (int i = 0; i < m_count; ++i) channel_meas[i] = ys[i].segment(channel, 1);
        const Vec init = (Vec(2) << ys[0](channel), 0.0).finished();
        const auto smooth = kf_rts_smooth(ch, init, config.init_var * Mat::Identity(2, 2),
                                          channel_meas, angle_idx);
        for (int i = 0; i < m_count; ++i) out.states[i].segment(slot, 2) = smooth[i];
    }
    for (int i = 0; i < m_count; ++i) out.times[i] = i * dt;
    return out;
}

ObservationSet pretrain_observe_robot(const std::vector<Vec>& ys, const std::vector<Vec>& us,
                                      double dt, const std::vector<Eigen::Vector2d>& sensors,
                                      const models::GroundRobotParams& prior_params,
                                      const PretrainObserverConfig& config) {
    check_streams(ys.size(), us.size(), dt, "pretrain_observe_robot");
    const int m_count = static_cast<int>(ys.size());
    const int n_sensors = static_cast<int>(sensors.size());

    // Stage 1: UKF on the kinematic prior with range + heading measurements.
    estimators::DiscreteModel model{std::make_shared<models::GroundRobotField>(prior_params), dt};
    models::RangeHeadingMeasurement meas(sensors);
    estimators::UkfConfig ucfg;
    ucfg.Q = config.state_sigmas.array().square().matrix().asDiagonal();
    ucfg.Q *= config.process_scale;
    ucfg.R = config.meas_sigmas.array().square().matrix().asDiagonal();
    ucfg.angle_meas_indices = {n_sensors};

    estimators::UkfState st;
    st.mean = config.init_state;
    st.cov = config.init_var * Mat::Identity(4, 4);

    std::vector<Vec> track(m_count);
    st = ukf_update_only(st, meas, us[0], ys[0], ucfg);
    track[0] = st.mean;
    for (int i = 1; i < m_count; ++i) {
        st = ukf_step(st, model, meas, us[i - 1], ys[i], ucfg);
        track[i] = st.mean;
    }

    // Stage 2: constant-velocity KF over the stage-1 (x, y) track; the speed
    // observation is the norm of the velocity estimate.
    LinearKfModel cv;
    cv.A = Mat::Identity(4, 4);
    cv.A(0, 2) = dt;
    cv.A(1, 3) = dt;
    cv.B = Mat(0, 0);
    cv.C = Mat::Zero(2, 4);
    cv.C(0, 0) = 1.0;
    cv.C(1, 1) = 1.0;
    const Mat qch = cv_accel_q(config.accel_sigma, dt);
    cv.Q = Mat::Zero(4, 4);
    for (int axis = 0; axis < 2; ++axis) {
        cv.Q(axis, axis) = qch(0, 0);
        cv.Q(axis, axis + 2) = qch(0, 1);
        cv.Q(axis + 2, axis) = qch(1, 0);
        cv.Q(axis + 2, axis + 2) = qch(1, 1);
    }
    cv.R = std::pow(config.meas_sigmas(0), 2) * Mat::Identity(2, 2);

    std::vector<Vec> xy(m_count);
    for (int i = 0; i < m_count; ++i) xy[i] = track[i].head(2);
    const Vec init = (Vec(4) << track[0](0), track[0](1), 0.0, 0.0).finished();
    const auto smooth =
        kf_rts_smooth(cv, init, config.init_var * Mat::Identity(4, 4), xy, {});

    ObservationSet out;
    out.times.resize(m_count);
    out.states.resize(m_count);
    out.inputs = us;
    for (int i = 0; i < m_count; ++i) {
        const double v = std::hypot(smooth[i](2), smooth[i](3));
        out.states[i] = (Vec(4) << track[i](0), track[i](1), v, track[i](3)).finished();
        out.times[i] = i * dt;
    }
    return out;
}

ObservationSet pretrain_observe_linear(const std::vector<Vec>& ys, const std::vector<Vec>& us,
                                       double dt, const Mat& A, const Mat& C,
                                       const PretrainObserverConfig& config) {
    check_streams(ys.size(), us.size(), dt, "pretrain_observe_linear");
    const int m_count = static_cast<int>(ys.size());
    const int n = static_cast<int>(A.rows());

    // RK4-discretized transition: I + A dt + ... + (A dt)^4 / 24, matching
    // the single-step propagation the estimators use.
    const Mat ad = A * dt;
    LinearKfModel kfm;
    kfm.A = Mat::Identity(n, n) + ad + ad * ad / 2.0 + ad * ad * ad / 6.0 +
            ad * ad * ad * ad / 24.0;
    kfm.B = Mat(0, 0);
    kfm.C = C;
    kfm.Q = config.state_sigmas.array().square().matrix().asDiagonal();
    kfm.Q *= config.process_scale;
    kfm.R = config.meas_sigmas.array().square().matrix().asDiagonal();

    KfState st;
    st.mean = config.init_state.size() == n ? config.init_state : Vec::Zero(n);
    st.cov = config.init_var * Mat::Identity(n, n);
    st = kf_update_only(st, kfm.C, kfm.R, ys[0]);

    ObservationSet out;
    out.times.resize(m_count);
    out.states.resize(m_count);
    out.inputs = us;
    out.states[0] = st.mean;
    for (int i = 1; i < m_count; ++i) {
        st = kf_step(st, kfm, Vec(), ys[i], {});
        out.states[i] = st.mean;
    }
    for (int i = 0; i < m_count; ++i) out.times[i] = i * dt;
    return out;
}

}  // namespace knodest::knode
