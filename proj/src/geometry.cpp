#include "motkit/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace motkit {

double iou(const Box2D& a, const Box2D& b) {
    const double x1 = std::max(a.x, b.x);
    const double y1 = std::max(a.y, b.y);
    const double x2 = std::min(a.right(), b.right());
    const double y2 = std::min(a.bottom(), b.bottom());

    const double inter = std::max(0.0, x2 - x1) * std::max(0.0, y2 - y1);
    const double uni = a.area() + b.area() - inter;
    if (uni <= 0.0) return 0.0;
    return inter / uni;
}

Point2D apply_affine(const AffineTransform2D& T, const Point2D& p) {
    const Eigen::Vector2d q = T.m * Eigen::Vector2d(p.x, p.y) + T.t;
    return {q.x(), q.y()};
}

Box2D apply_affine(const AffineTransform2D& T, const Box2D& b) {
    const Eigen::Vector2d c = T.m * Eigen::Vector2d(b.cx(), b.cy()) + T.t;
    const Eigen::Vector2d wh = T.m * Eigen::Vector2d(b.w, b.h);
    return Box2D::from_center(c.x(), c.y(), std::max(0.0, wh.x()), std::max(0.0, wh.y()));
}

AffineTransform2D compose(const AffineTransform2D& T1, const AffineTransform2D& T2) {
    AffineTransform2D out;
    out.m = T1.m * T2.m;
    out.t = T1.m * T2.t + T1.t;
    return out;
}

AffineTransform2D invert(const AffineTransform2D& T) {
    const double det = T.m.determinant();
    if (!std::isfinite(det) || std::abs(det) < 1e-12) {
        throw SingularTransform("affine linear part is singular (det = " + std::to_string(det) + ")");
    }
    AffineTransform2D out;
    out.m = T.m.inverse();
    out.t = -(out.m * T.t);
    return out;
}

}  // namespace motkit
