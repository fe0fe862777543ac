#include <cmath>

#include "doctest.h"
#include "motkit/errors.hpp"
#include "motkit/kalman.hpp"

using namespace motkit;

TEST_SUITE("kalman") {

TEST_CASE("initiate centers the state on the measurement with zero velocity") {
    const KalmanState s = kalman_initiate(Box2D{10, 20, 30, 40}, KalmanConfig{});
    CHECK(s.mean(0) == doctest::Approx(25.0));  // cx
    CHECK(s.mean(1) == doctest::Approx(40.0));  // cy
    CHECK(s.mean(2) == doctest::Approx(30.0));
    CHECK(s.mean(3) == doctest::Approx(40.0));
    for (int i = 4; i < 8; ++i) CHECK(s.mean(i) == 0.0);

    // Stds scale with box height: 2*(1/20)*40 = 4 and 10*(1/160)*40 = 2.5.
    CHECK(s.covariance(0, 0) == doctest::Approx(16.0));
    CHECK(s.covariance(4, 4) == doctest::Approx(6.25));
    CHECK((s.covariance - s.covariance.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("initiate rejects empty or non-finite boxes") {
    CHECK_THROWS_AS(kalman_initiate(Box2D{0, 0, 0, 10}, KalmanConfig{}), InvalidMeasurement);
    CHECK_THROWS_AS(kalman_initiate(Box2D{0, 0, 10, -1}, KalmanConfig{}), InvalidMeasurement);
    const double inf = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(kalman_initiate(Box2D{inf, 0, 10, 10}, KalmanConfig{}), InvalidMeasurement);
}

TEST_CASE("predict advances positions by velocity times dt") {
    KalmanState s = kalman_initiate(Box2D{0, 0, 10, 10}, KalmanConfig{});
    s.mean(4) = 3.0;  // vx
    s.mean(5) = -1.0;
    s.mean(6) = 0.5;  // vw
    const KalmanState p = kalman_predict(s, KalmanConfig{});
    CHECK(p.mean(0) == doctest::Approx(8.0));   // cx 5 + 3
    CHECK(p.mean(1) == doctest::Approx(4.0));   // cy 5 - 1
    CHECK(p.mean(2) == doctest::Approx(10.5));  // w
    CHECK(p.mean(4) == doctest::Approx(3.0));   // velocity unchanged
}

TEST_CASE("predict covariance matches the dense reference formula") {
    KalmanConfig cfg;
    KalmanState s = kalman_initiate(Box2D{5, 5, 20, 16}, cfg);
    s.mean(4) = 1.0;
    const KalmanState p = kalman_predict(s, cfg);

    // Reference: P' = F P F^T + Q assembled with explicit loops.
    Eigen::Matrix<double, 8, 8> F = Eigen::Matrix<double, 8, 8>::Identity();
    for (int i = 0; i < 4; ++i) F(i, i + 4) = cfg.dt;
    const double h = s.mean(3);
    Eigen::Matrix<double, 8, 8> Q = Eigen::Matrix<double, 8, 8>::Zero();
    for (int i = 0; i < 4; ++i) Q(i, i) = std::pow(cfg.position_weight * h, 2);
    for (int i = 4; i < 8; ++i) Q(i, i) = std::pow(cfg.velocity_weight * h, 2);
    const Eigen::Matrix<double, 8, 8> want = F * s.covariance * F.transpose() + Q;
    CHECK((p.covariance - want).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("platform translation shifts only the position") {
    KalmanState s = kalman_initiate(Box2D{0, 0, 10, 10}, KalmanConfig{});
    s.mean(4) = 2.0;
    const KalmanState c = apply_platform_compensation(s, AffineTransform2D::translation(7, -3));
    CHECK(c.mean(0) == doctest::Approx(12.0));
    CHECK(c.mean(1) == doctest::Approx(2.0));
    CHECK(c.mean(2) == doctest::Approx(10.0));  // size untouched
    CHECK(c.mean(4) == doctest::Approx(2.0));   // velocity untouched
    CHECK((c.covariance - s.covariance).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("platform rotation acts blockwise on position, size and velocity") {
    KalmanState s = kalman_initiate(Box2D{10, 0, 8, 6}, KalmanConfig{});
    s.mean(4) = 1.0;
    s.mean(5) = 2.0;
    AffineTransform2D T;  // quarter turn, then shift
    T.m << 0.0, -1.0, 1.0, 0.0;
    T.t << 100.0, 0.0;

    const KalmanState c = apply_platform_compensation(s, T);
    CHECK(c.mean(0) == doctest::Approx(100.0 - 3.0));  // (cx,cy)=(14,3) -> (-3,14)+t
    CHECK(c.mean(1) == doctest::Approx(14.0));
    CHECK(c.mean(2) == doctest::Approx(-6.0));  // (w,h) rotated as a vector
    CHECK(c.mean(3) == doctest::Approx(8.0));
    CHECK(c.mean(4) == doctest::Approx(-2.0));
    CHECK(c.mean(5) == doctest::Approx(1.0));

    // Covariance congruence keeps symmetry.
    CHECK((c.covariance - c.covariance.transpose()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("update pulls the state toward the measurement") {
    const KalmanConfig cfg;
    KalmanState s = kalman_initiate(Box2D{0, 0, 10, 10}, cfg);
    const Box2D z{4, 0, 10, 10};  // center moved +4 in x
    const KalmanState u = kalman_update(s, z, cfg);
    CHECK(u.mean(0) > s.mean(0));
    CHECK(u.mean(0) < z.cx() + 1e-9);

    // Repeated updates with the same measurement converge onto it.
    KalmanState conv = s;
    for (int i = 0; i < 50; ++i) conv = kalman_update(kalman_predict(conv, cfg), z, cfg);
    CHECK(conv.mean(0) == doctest::Approx(z.cx()).epsilon(1e-3));
}

TEST_CASE("update covariance is symmetric positive semidefinite") {
    const KalmanConfig cfg;
    KalmanState s = kalman_initiate(Box2D{0, 0, 10, 10}, cfg);
    const KalmanState u = kalman_update(kalman_predict(s, cfg), Box2D{1, 1, 11, 9}, cfg);
    CHECK((u.covariance - u.covariance.transpose()).cwiseAbs().maxCoeff() < 1e-10);
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 8, 8>> es(u.covariance);
    CHECK(es.eigenvalues().minCoeff() > -1e-10);
    // Measuring must not increase positional uncertainty.
    const KalmanState p = kalman_predict(s, cfg);
    CHECK(u.covariance(0, 0) <= p.covariance(0, 0) + 1e-12);
}

TEST_CASE("state_to_box round trips through initiate") {
    const Box2D b{3, 4, 12, 18};
    const Box2D out = state_to_box(kalman_initiate(b, KalmanConfig{}));
    CHECK(out.x == doctest::Approx(b.x));
    CHECK(out.y == doctest::Approx(b.y));
    CHECK(out.w == doctest::Approx(b.w));
    CHECK(out.h == doctest::Approx(b.h));
}

}  // TEST_SUITE
