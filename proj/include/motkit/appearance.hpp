#pragma once

#include <Eigen/Dense>
#include <vector>

#include "motkit/geometry.hpp"

namespace motkit {

using EmbeddingVector = Eigen::VectorXd;

/// Exponentially smoothed appearance of one track. The running average decays
/// old features by alpha; uema_unbiased() divides out the 1 - alpha^k startup
/// bias so early frames are not pulled toward the zero initialization.
struct TrackAppearance {
    EmbeddingVector ema;     // zero-initialized running average
    int frame_count = 0;     // number of updates folded in
    double alpha = 0.9;

    explicit TrackAppearance(int dim = 0, double alpha_ = 0.9)
        : ema(EmbeddingVector::Zero(dim)), alpha(alpha_) {}
};

struct CoffConfig {
    double beta = 800.0;     // cosine-distance amplification
    double theta_iou = 0.3;  // spatial gate threshold on raw overlap
    double alpha = 0.9;      // appearance smoothing decay
};

/// 1 - cos(a, b). Throws ZeroVector for zero-norm inputs, DimensionMismatch
/// for unequal sizes.
double cosine_distance(const EmbeddingVector& a, const EmbeddingVector& b);

/// ema <- alpha*ema + (1-alpha)*f
TrackAppearance uema_update(const TrackAppearance& app, const EmbeddingVector& f);

/// ema / (1 - alpha^k). Throws NoObservations before the first update.
EmbeddingVector uema_unbiased(const TrackAppearance& app);

/// min(d*beta, 1)
double amplify_distance(double d, double beta);

/// Overrides the appearance distance to maximal dissimilarity when the raw
/// overlap falls below theta_iou (strict less-than).
double spatial_gate(double d_cos, double iou, double theta_iou);

/// Multiplicative motion-appearance cost: d_cos_gated * (1 - iou).
double fused_cost(double d_cos_gated, double iou);

/// One matchable track as the cost builder sees it: the unbiased smoothed
/// embedding and the predicted box.
struct TrackCostInput {
    EmbeddingVector embedding;
    Box2D predicted_box;
};

struct CoffMatrices {
    Eigen::MatrixXd fused;       // the association cost, tracks x detections
    Eigen::MatrixXd raw_cosine;  // unamplified cosine distances
    Eigen::MatrixXd iou;         // raw overlaps
};

/// Entry (i,j) = fused_cost(spatial_gate(amplify_distance(cos_ij, beta),
/// iou_ij, theta), iou_ij). Raw cosine and IoU come along for the gates the
/// association stage applies on top.
CoffMatrices build_cost_matrices(const std::vector<TrackCostInput>& tracks,
                                 const std::vector<Box2D>& detection_boxes,
                                 const std::vector<EmbeddingVector>& embeddings,
                                 const CoffConfig& cfg);

/// The fused matrix alone.
Eigen::MatrixXd build_cost_matrix(const std::vector<TrackCostInput>& tracks,
                                  const std::vector<Box2D>& detection_boxes,
                                  const std::vector<EmbeddingVector>& embeddings,
                                  const CoffConfig& cfg);

}  // namespace motkit
