#include "motkit/kalman.hpp"

#include <cmath>

#include "motkit/errors.hpp"

namespace motkit {

namespace {

using Vec8 = Eigen::Matrix<double, 8, 1>;
using Mat8 = Eigen::Matrix<double, 8, 8>;
using Vec4 = Eigen::Matrix<double, 4, 1>;
using Mat4 = Eigen::Matrix<double, 4, 4>;
using Mat48 = Eigen::Matrix<double, 4, 8>;

Mat8 transition(double dt) {
    Mat8 F = Mat8::Identity();
    for (int i = 0; i < 4; ++i) F(i, i + 4) = dt;
    return F;
}

}  // namespace

KalmanState kalman_initiate(const Box2D& measurement, const KalmanConfig& cfg) {
    if (!std::isfinite(measurement.x) || !std::isfinite(measurement.y) ||
        !std::isfinite(measurement.w) || !std::isfinite(measurement.h) ||
        measurement.w <= 0.0 || measurement.h <= 0.0) {
        throw InvalidMeasurement("initiate requires a finite box with positive size");
    }

    KalmanState s;
    s.mean.head<4>() << measurement.cx(), measurement.cy(), measurement.w, measurement.h;

    const double h = measurement.h;
    const double sp = 2.0 * cfg.position_weight * h;
    const double sv = 10.0 * cfg.velocity_weight * h;
    Vec8 stds;
    stds << sp, sp, sp, sp, sv, sv, sv, sv;
    s.covariance = stds.array().square().matrix().asDiagonal();
    return s;
}

KalmanState kalman_predict(const KalmanState& state, const KalmanConfig& cfg) {
    const Mat8 F = transition(cfg.dt);
    const double h = state.mean(3);
    const double sp = cfg.position_weight * h;
    const double sv = cfg.velocity_weight * h;
    Vec8 stds;
    stds << sp, sp, sp, sp, sv, sv, sv, sv;

    KalmanState out;
    out.mean = F * state.mean;
    out.covariance = F * state.covariance * F.transpose();
    out.covariance += Mat8(stds.array().square().matrix().asDiagonal());
    return out;
}

KalmanState apply_platform_compensation(const KalmanState& state, const AffineTransform2D& T) {
    Mat8 M = Mat8::Zero();
    for (int block = 0; block < 4; ++block) {
        M.block<2, 2>(2 * block, 2 * block) = T.m;
    }

    KalmanState out;
    out.mean = M * state.mean;
    out.mean.head<2>() += T.t;
    out.covariance = M * state.covariance * M.transpose();
    return out;
}

KalmanState kalman_update(const KalmanState& state, const Box2D& measurement,
                          const KalmanConfig& cfg) {
    Mat48 H = Mat48::Zero();
    H.block<4, 4>(0, 0) = Mat4::Identity();

    const double h = state.mean(3);
    const double sm = cfg.position_weight * h;
    Vec4 stds;
    stds << sm, sm, sm, sm;
    const Mat4 R = stds.array().square().matrix().asDiagonal();

    const Mat4 S = H * state.covariance * H.transpose() + R;
    Eigen::LLT<Mat4> llt(S);
    if (llt.info() != Eigen::Success) {
        throw NumericalFailure("innovation covariance is not positive definite");
    }

    // K = P H^T S^-1, via the Cholesky solve of S K^T = H P^T
    const Eigen::Matrix<double, 8, 4> K =
        llt.solve(H * state.covariance.transpose()).transpose();
    if (!K.allFinite()) {
        throw NumericalFailure("non-finite Kalman gain");
    }

    Vec4 z;
    z << measurement.cx(), measurement.cy(), measurement.w, measurement.h;

    KalmanState out;
    out.mean = state.mean + K * (z - H * state.mean);
    const Mat8 A = Mat8::Identity() - K * H;
    out.covariance = A * state.covariance * A.transpose() + K * R * K.transpose();
    return out;
}

Box2D state_to_box(const KalmanState& state) {
    const double w = std::max(0.0, state.mean(2));
    const double h = std::max(0.0, state.mean(3));
    return Box2D::from_center(state.mean(0), state.mean(1), w, h);
}

}  // namespace motkit
