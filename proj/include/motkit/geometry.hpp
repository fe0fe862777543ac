#pragma once

#include <Eigen/Dense>

#include "motkit/errors.hpp"

namespace motkit {

/// Axis-aligned box stored as top-left corner plus size (MOTChallenge
/// convention). Degenerate (zero-area) boxes are legal inputs throughout.
struct Box2D {
    double x = 0.0;  // left
    double y = 0.0;  // top
    double w = 0.0;
    double h = 0.0;

    double area() const { return w * h; }
    double cx() const { return x + 0.5 * w; }
    double cy() const { return y + 0.5 * h; }
    double right() const { return x + w; }
    double bottom() const { return y + h; }

    static Box2D from_center(double cx, double cy, double w, double h) {
        return {cx - 0.5 * w, cy - 0.5 * h, w, h};
    }
};

struct Point2D {
    double x = 0.0;
    double y = 0.0;
};

/// 2-D affine map p -> m*p + t.
struct AffineTransform2D {
    Eigen::Matrix2d m = Eigen::Matrix2d::Identity();
    Eigen::Vector2d t = Eigen::Vector2d::Zero();

    static AffineTransform2D identity() { return {}; }
    static AffineTransform2D translation(double tx, double ty) {
        AffineTransform2D out;
        out.t << tx, ty;
        return out;
    }
};

/// Intersection-over-union; 0 when the union has zero area.
double iou(const Box2D& a, const Box2D& b);

Point2D apply_affine(const AffineTransform2D& T, const Point2D& p);

/// Transforms the box center by m*c + t and the (w, h) pair by the linear
/// part alone, the same rule the Kalman platform compensation uses on its
/// state vector. Sizes are clamped at zero so the result is a valid box.
Box2D apply_affine(const AffineTransform2D& T, const Box2D& b);

/// compose(T1, T2) applied to p equals T1 applied to (T2 applied to p).
AffineTransform2D compose(const AffineTransform2D& T1, const AffineTransform2D& T2);

/// Throws SingularTransform when the linear part is not invertible.
AffineTransform2D invert(const AffineTransform2D& T);

}  // namespace motkit
