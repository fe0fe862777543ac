#pragma once

#include <Eigen/Dense>
#include <vector>

namespace motkit {

// One feature map inside the multi-column, multi-level grid. `level` counts
// resolution octaves (grids halve per level); `column` counts refinement
// passes. An empty grid marks the boundary case where no coarser input exists.
struct ColumnFeature {
    Eigen::MatrixXd grid;
    int level = 0;
    int column = 1;

    bool is_boundary() const { return grid.size() == 0; }
    static ColumnFeature boundary() { return ColumnFeature{}; }
};

// Fixed operators of the reversible column recurrence: a nonzero residual
// scale and the coefficients of the 3x3 mixing stage.
struct RevColOps {
    double alpha = 1.0;
    Eigen::Matrix3d phi_kernel = Eigen::Matrix3d::Zero();
};

// 2x2 non-overlapping average pool; both dimensions must be even.
Eigen::MatrixXd average_pool_2x(const Eigen::MatrixXd& x);

// Nearest-neighbour 2x upsample: every cell becomes a 2x2 block.
Eigen::MatrixXd upsample_nearest_2x(const Eigen::MatrixXd& x);

// 3x3 cross-correlation with zero padding; output shape equals input shape.
Eigen::MatrixXd cross_correlate_3x3(const Eigen::MatrixXd& x, const Eigen::Matrix3d& kernel);

// The fused mixing stage: 3x3 cross-correlation followed by elementwise tanh.
Eigen::MatrixXd apply_phi(const Eigen::MatrixXd& x, const RevColOps& ops);

// Forward coupling step. Combines the previous column at the same level with
// the finer map of the current column and the coarser map of the previous
// column:
//   out = alpha * prev_same_level + phi(pool(below) + upsample(above))
// `above` may be the boundary sentinel, in which case its branch contributes
// zero. Throws ShapeMismatch when the resampled inputs disagree with
// prev_same_level.
ColumnFeature revcol_forward(const ColumnFeature& prev_same_level,
                             const ColumnFeature& below,
                             const ColumnFeature& above,
                             const RevColOps& ops);

// Exact algebraic inverse of revcol_forward given the same auxiliary inputs:
//   prev = (out - phi(pool(below) + upsample(above))) / alpha
// Throws ZeroAlpha when ops.alpha == 0.
ColumnFeature revcol_inverse(const ColumnFeature& out,
                             const ColumnFeature& below,
                             const ColumnFeature& above,
                             const RevColOps& ops);

// Relative-position bias values indexed by (head, |dx|, |dy|).
struct AttentionBiasTable {
    int heads = 0;
    int extent_x = 0;  // valid |dx| in [0, extent_x)
    int extent_y = 0;  // valid |dy| in [0, extent_y)
    std::vector<double> values;

    static AttentionBiasTable zeros(int heads, int extent_x, int extent_y);

    double at(int head, int abs_dx, int abs_dy) const;
    double& at(int head, int abs_dx, int abs_dy);
};

// Integer spatial position on the attention grid.
struct GridPosition {
    int x = 0;
    int y = 0;
};

// Content-plus-position attention logit: q.k plus the bias entry for the
// absolute displacement between the two positions. Throws IndexOutOfRange
// when the displacement or head falls outside the table.
double attention_score(const Eigen::VectorXd& q, const Eigen::VectorXd& k,
                       const GridPosition& pos_q, const GridPosition& pos_k,
                       int head, const AttentionBiasTable& bias);

// One triplet for the angular-margin hinge loss. Vectors must be unit norm
// within 1e-9.
struct TripletSample {
    Eigen::VectorXd anchor;
    Eigen::VectorXd positive;
    Eigen::VectorXd negative;
    double theta = 0.0;         // additive angular margin (radians)
    double alpha_margin = 0.0;  // additive hinge margin on the distance gap
};

// Squared hinge on cosine-expanded angular distances:
//   theta1 = clamp(arccos(a.p) + theta, 0, pi), theta2 = arccos(a.n)
//   d_i = 1 - cos(theta_i), loss = max(d1 - d2 + alpha_margin, 0)^2
// Throws NonUnitVector when any input vector is not unit norm.
double ada_loss(const TripletSample& s);

// Same formula without the unit-norm precondition (dot products are still
// clamped to [-1, 1]). Intended for derivative checks that perturb single
// coordinates off the sphere.
double ada_loss_free(const TripletSample& s);

struct AdaLossGradient {
    double loss = 0.0;
    Eigen::VectorXd d_anchor;
    Eigen::VectorXd d_positive;
    Eigen::VectorXd d_negative;
};

// Analytic gradient of ada_loss. Exactly zero when the hinge is inactive;
// the margin-shifted branch contributes zero slope where the theta1 clamp
// saturates. Throws NumericalSingularity when the active branch needs
// d(arccos)/du within 1e-9 of its endpoints.
AdaLossGradient ada_loss_gradient(const TripletSample& s);

}  // namespace motkit
