#include "motkit/numerics.hpp"

#include <algorithm>
#include <cmath>

#include "motkit/errors.hpp"

namespace motkit {

Eigen::MatrixXd average_pool_2x(const Eigen::MatrixXd& x) {
    if (x.rows() % 2 != 0 || x.cols() % 2 != 0) {
        throw ShapeMismatch("average pool needs even dimensions, got " +
                            std::to_string(x.rows()) + "x" + std::to_string(x.cols()));
    }
    Eigen::MatrixXd out(x.rows() / 2, x.cols() / 2);
    for (Eigen::Index r = 0; r < out.rows(); ++r) {
        for (Eigen::Index c = 0; c < out.cols(); ++c) {
            out(r, c) = 0.25 * (x(2 * r, 2 * c) + x(2 * r, 2 * c + 1) +
                                x(2 * r + 1, 2 * c) + x(2 * r + 1, 2 * c + 1));
        }
    }
    return out;
}

Eigen::MatrixXd upsample_nearest_2x(const Eigen::MatrixXd& x) {
    Eigen::MatrixXd out(2 * x.rows(), 2 * x.cols());
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
        for (Eigen::Index c = 0; c < x.cols(); ++c) {
            out(2 * r, 2 * c) = x(r, c);
            out(2 * r, 2 * c + 1) = x(r, c);
            out(2 * r + 1, 2 * c) = x(r, c);
            out(2 * r + 1, 2 * c + 1) = x(r, c);
        }
    }
    return out;
}

Eigen::MatrixXd cross_correlate_3x3(const Eigen::MatrixXd& x, const Eigen::Matrix3d& kernel) {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(x.rows(), x.cols());
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
        for (Eigen::Index c = 0; c < x.cols(); ++c) {
            double acc = 0.0;
            for (int dr = -1; dr <= 1; ++dr) {
                for (int dc = -1; dc <= 1; ++dc) {
                    const Eigen::Index rr = r + dr;
                    const Eigen::Index cc = c + dc;
                    if (rr < 0 || rr >= x.rows() || cc < 0 || cc >= x.cols()) continue;
                    acc += kernel(dr + 1, dc + 1) * x(rr, cc);
                }
            }
            out(r, c) = acc;
        }
    }
    return out;
}

Eigen::MatrixXd apply_phi(const Eigen::MatrixXd& x, const RevColOps& ops) {
    return cross_correlate_3x3(x, ops.phi_kernel).array().tanh().matrix();
}

namespace {

// Shared fusion branch of the forward and inverse steps:
// phi(pool(below) + upsample(above)), with the boundary sentinel contributing
// zero for the coarse branch. `target` fixes the expected output shape.
Eigen::MatrixXd fusion_term(const ColumnFeature& below, const ColumnFeature& above,
                            const RevColOps& ops, Eigen::Index target_rows,
                            Eigen::Index target_cols) {
    if (below.grid.rows() != 2 * target_rows || below.grid.cols() != 2 * target_cols) {
        throw ShapeMismatch("finer input must be exactly 2x the target resolution");
    }
    Eigen::MatrixXd fused = average_pool_2x(below.grid);
    if (!above.is_boundary()) {
        if (2 * above.grid.rows() != target_rows || 2 * above.grid.cols() != target_cols) {
            throw ShapeMismatch("coarser input must be exactly half the target resolution");
        }
        fused += upsample_nearest_2x(above.grid);
    }
    return apply_phi(fused, ops);
}

}  // namespace

ColumnFeature revcol_forward(const ColumnFeature& prev_same_level,
                             const ColumnFeature& below,
                             const ColumnFeature& above,
                             const RevColOps& ops) {
    const Eigen::MatrixXd mix =
        fusion_term(below, above, ops, prev_same_level.grid.rows(), prev_same_level.grid.cols());
    ColumnFeature out;
    out.grid = ops.alpha * prev_same_level.grid + mix;
    out.level = prev_same_level.level;
    out.column = prev_same_level.column + 1;
    return out;
}

ColumnFeature revcol_inverse(const ColumnFeature& out,
                             const ColumnFeature& below,
                             const ColumnFeature& above,
                             const RevColOps& ops) {
    if (ops.alpha == 0.0) {
        throw ZeroAlpha("cannot invert the coupling step with alpha = 0");
    }
    const Eigen::MatrixXd mix =
        fusion_term(below, above, ops, out.grid.rows(), out.grid.cols());
    ColumnFeature prev;
    prev.grid = (out.grid - mix) / ops.alpha;
    prev.level = out.level;
    prev.column = out.column - 1;
    return prev;
}

AttentionBiasTable AttentionBiasTable::zeros(int heads, int extent_x, int extent_y) {
    AttentionBiasTable t;
    t.heads = heads;
    t.extent_x = extent_x;
    t.extent_y = extent_y;
    t.values.assign(static_cast<std::size_t>(heads) * extent_x * extent_y, 0.0);
    return t;
}

namespace {

std::size_t bias_index(const AttentionBiasTable& t, int head, int abs_dx, int abs_dy) {
    if (head < 0 || head >= t.heads || abs_dx < 0 || abs_dx >= t.extent_x || abs_dy < 0 ||
        abs_dy >= t.extent_y) {
        throw IndexOutOfRange("bias lookup (" + std::to_string(head) + "," +
                              std::to_string(abs_dx) + "," + std::to_string(abs_dy) +
                              ") outside table " + std::to_string(t.heads) + "x" +
                              std::to_string(t.extent_x) + "x" + std::to_string(t.extent_y));
    }
    return (static_cast<std::size_t>(head) * t.extent_x + abs_dx) * t.extent_y + abs_dy;
}

}  // namespace

double AttentionBiasTable::at(int head, int abs_dx, int abs_dy) const {
    return values[bias_index(*this, head, abs_dx, abs_dy)];
}

double& AttentionBiasTable::at(int head, int abs_dx, int abs_dy) {
    return values[bias_index(*this, head, abs_dx, abs_dy)];
}

double attention_score(const Eigen::VectorXd& q, const Eigen::VectorXd& k,
                       const GridPosition& pos_q, const GridPosition& pos_k,
                       int head, const AttentionBiasTable& bias) {
    if (q.size() != k.size()) {
        throw DimensionMismatch("query and key lengths differ: " + std::to_string(q.size()) +
                                " vs " + std::to_string(k.size()));
    }
    const int abs_dx = std::abs(pos_q.x - pos_k.x);
    const int abs_dy = std::abs(pos_q.y - pos_k.y);
    return q.dot(k) + bias.at(head, abs_dx, abs_dy);
}

namespace {

constexpr double kUnitNormTolerance = 1e-9;
constexpr double kArccosSlopeGuard = 1e-9;

void require_unit(const Eigen::VectorXd& v, const char* name) {
    if (std::abs(v.norm() - 1.0) > kUnitNormTolerance) {
        throw NonUnitVector(std::string(name) + " must be unit norm, got ||v|| = " +
                            std::to_string(v.norm()));
    }
}

struct TripletAngles {
    double u = 0.0;       // anchor . positive, clamped to [-1, 1]
    double w = 0.0;       // anchor . negative, clamped to [-1, 1]
    double theta1 = 0.0;  // clamped to [0, pi]
    double d1 = 0.0;
    double d2 = 0.0;
    double hinge = 0.0;   // d1 - d2 + alpha_margin
    bool clamped = false; // theta1 clamp saturated
};

TripletAngles triplet_angles(const TripletSample& s, bool check_unit = true) {
    if (check_unit) {
        require_unit(s.anchor, "anchor");
        require_unit(s.positive, "positive");
        require_unit(s.negative, "negative");
    }
    if (s.anchor.size() != s.positive.size() || s.anchor.size() != s.negative.size()) {
        throw DimensionMismatch("triplet vectors must share one dimension");
    }

    TripletAngles t;
    t.u = std::clamp(s.anchor.dot(s.positive), -1.0, 1.0);
    t.w = std::clamp(s.anchor.dot(s.negative), -1.0, 1.0);
    const double raw_theta1 = std::acos(t.u) + s.theta;
    t.theta1 = std::clamp(raw_theta1, 0.0, M_PI);
    t.clamped = raw_theta1 <= 0.0 || raw_theta1 >= M_PI;
    t.d1 = 1.0 - std::cos(t.theta1);
    t.d2 = 1.0 - t.w;  // 1 - cos(arccos(w))
    t.hinge = t.d1 - t.d2 + s.alpha_margin;
    return t;
}

}  // namespace

double ada_loss(const TripletSample& s) {
    const TripletAngles t = triplet_angles(s);
    const double active = std::max(t.hinge, 0.0);
    return active * active;
}

double ada_loss_free(const TripletSample& s) {
    const TripletAngles t = triplet_angles(s, /*check_unit=*/false);
    const double active = std::max(t.hinge, 0.0);
    return active * active;
}

AdaLossGradient ada_loss_gradient(const TripletSample& s) {
    const TripletAngles t = triplet_angles(s);

    AdaLossGradient g;
    g.d_anchor = Eigen::VectorXd::Zero(s.anchor.size());
    g.d_positive = Eigen::VectorXd::Zero(s.anchor.size());
    g.d_negative = Eigen::VectorXd::Zero(s.anchor.size());
    if (t.hinge <= 0.0) {
        return g;  // inactive hinge: loss identically zero in a neighbourhood
    }
    g.loss = t.hinge * t.hinge;

    // d(d1)/d(u) through theta1 = arccos(u) + theta; zero where the clamp
    // saturates because theta1 no longer responds to u there.
    double dd1_du = 0.0;
    if (!t.clamped) {
        if (1.0 - std::abs(t.u) < kArccosSlopeGuard) {
            throw NumericalSingularity("anchor-positive alignment too close to +/-1 for a "
                                       "stable arccos derivative");
        }
        dd1_du = -std::sin(t.theta1) / std::sqrt(1.0 - t.u * t.u);
    }

    // d2 = 1 - anchor.negative, so its gradients are linear in the inputs.
    const double scale = 2.0 * t.hinge;
    g.d_anchor = scale * (dd1_du * s.positive + s.negative);
    g.d_positive = scale * dd1_du * s.anchor;
    g.d_negative = scale * s.anchor;
    return g;
}

}  // namespace motkit
