#pragma once

#include <Eigen/Dense>
#include <limits>
#include <utility>
#include <vector>

#include "motkit/geometry.hpp"

namespace motkit {

/// Rectangular track x detection cost matrix. Entries are finite reals with
/// |c| <= 1e5 (negative costs are legal); +inf marks a forbidden pair.
using CostMatrix = Eigen::MatrixXd;

inline constexpr double kForbiddenCost = std::numeric_limits<double>::infinity();

struct AssociationConfig {
    double high_conf_threshold = 0.5;
    double low_conf_threshold = 0.1;
    double detection_threshold = 0.6;
    double match_cost_threshold = 0.85;
    double second_stage_iou_threshold = 0.5;
    double appearance_sim_threshold = 0.25;
    double linear_iou_threshold = 0.75;
};

struct Assignment {
    std::vector<std::pair<int, int>> matches;  // (row, col), sorted by row
    std::vector<int> unmatched_rows;
    std::vector<int> unmatched_cols;
};

/// Minimum-total-cost one-to-one assignment over the min(rows, cols)
/// cardinality, with forbidden pairs excluded (an all-forbidden row or column
/// ends up unmatched rather than forcing an infinite-cost pair).
Assignment solve_assignment(const CostMatrix& costs);

/// Drops matched pairs with cost > threshold (boundary kept), moving both
/// endpoints to the unmatched lists.
Assignment gate_matches(Assignment assignment, const CostMatrix& costs, double threshold);

struct StageResult {
    std::vector<std::pair<int, int>> matches;  // (track index, detection index)
    std::vector<int> leftover_tracks;
    std::vector<int> leftover_detections;
};

/// High-confidence stage: fused appearance-motion costs, with pairs whose raw
/// cosine distance exceeds the appearance similarity threshold forbidden
/// outright, gated at match_cost_threshold after solving.
StageResult first_stage(const CostMatrix& fused, const CostMatrix& raw_cosine,
                        const AssociationConfig& cfg);

/// Low-confidence stage: plain IoU distance, matches require
/// IoU >= second_stage_iou_threshold.
StageResult second_stage(const std::vector<Box2D>& track_boxes,
                         const std::vector<Box2D>& detection_boxes,
                         const AssociationConfig& cfg);

}  // namespace motkit
