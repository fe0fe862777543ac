#include "motkit/appearance.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "motkit/errors.hpp"

namespace motkit {

double cosine_distance(const EmbeddingVector& a, const EmbeddingVector& b) {
    if (a.size() != b.size()) {
        throw DimensionMismatch("embedding sizes differ: " + std::to_string(a.size()) +
                                " vs " + std::to_string(b.size()));
    }
    const double na = a.norm();
    const double nb = b.norm();
    if (na == 0.0 || nb == 0.0) {
        throw ZeroVector("cosine distance of a zero vector is undefined");
    }
    return 1.0 - a.dot(b) / (na * nb);
}

TrackAppearance uema_update(const TrackAppearance& app, const EmbeddingVector& f) {
    TrackAppearance out = app;
    if (out.ema.size() == 0) {
        out.ema = EmbeddingVector::Zero(f.size());
    } else if (out.ema.size() != f.size()) {
        throw DimensionMismatch("feature dimension changed mid-track");
    }
    out.ema = out.alpha * out.ema + (1.0 - out.alpha) * f;
    out.frame_count = app.frame_count + 1;
    return out;
}

EmbeddingVector uema_unbiased(const TrackAppearance& app) {
    if (app.frame_count < 1) {
        throw NoObservations("no appearance observations folded in yet");
    }
    const double correction = 1.0 - std::pow(app.alpha, app.frame_count);
    return app.ema / correction;
}

double amplify_distance(double d, double beta) {
    return std::min(d * beta, 1.0);
}

double spatial_gate(double d_cos, double iou, double theta_iou) {
    return iou < theta_iou ? 1.0 : d_cos;
}

double fused_cost(double d_cos_gated, double iou) {
    return d_cos_gated * (1.0 - iou);
}

CoffMatrices build_cost_matrices(const std::vector<TrackCostInput>& tracks,
                                 const std::vector<Box2D>& detection_boxes,
                                 const std::vector<EmbeddingVector>& embeddings,
                                 const CoffConfig& cfg) {
    if (detection_boxes.size() != embeddings.size()) {
        throw DimensionMismatch("detections and embeddings are not aligned 1:1");
    }
    const auto rows = static_cast<Eigen::Index>(tracks.size());
    const auto cols = static_cast<Eigen::Index>(detection_boxes.size());

    CoffMatrices out;
    out.fused.resize(rows, cols);
    out.raw_cosine.resize(rows, cols);
    out.iou.resize(rows, cols);

    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            const double overlap = iou(tracks[i].predicted_box, detection_boxes[j]);
            const double d_cos = cosine_distance(tracks[i].embedding, embeddings[j]);
            const double gated = spatial_gate(amplify_distance(d_cos, cfg.beta),
                                              overlap, cfg.theta_iou);
            out.iou(i, j) = overlap;
            out.raw_cosine(i, j) = d_cos;
            out.fused(i, j) = fused_cost(gated, overlap);
        }
    }
    return out;
}

Eigen::MatrixXd build_cost_matrix(const std::vector<TrackCostInput>& tracks,
                                  const std::vector<Box2D>& detection_boxes,
                                  const std::vector<EmbeddingVector>& embeddings,
                                  const CoffConfig& cfg) {
    return build_cost_matrices(tracks, detection_boxes, embeddings, cfg).fused;
}

}  // namespace motkit
