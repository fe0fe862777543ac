#pragma once

#include <string>
#include <utility>
#include <vector>

#include "motkit/geometry.hpp"

namespace motkit {

// One annotated ground-truth box. Entries with visibility == 0 are excluded
// from every metric.
struct GtEntry {
    int frame = 0;
    int id = 0;
    Box2D box;
    double visibility = 1.0;
};

// One tracker output box.
struct ResultEntry {
    int frame = 0;
    int id = 0;
    Box2D box;
    double confidence = 1.0;
};

// HOTA components at a single localization threshold.
struct HotaAlphaPoint {
    double alpha = 0.0;
    double hota = 0.0;
    double deta = 0.0;
    double assa = 0.0;
};

struct MetricsReport {
    double mota = 0.0;
    double idf1 = 0.0;
    double hota = 0.0;   // averaged over the alpha grid
    double deta = 0.0;
    double assa = 0.0;
    double loca = 0.0;   // 0 when there are no true positives
    double hota_alpha50 = 0.0;
    long long fp = 0;
    long long fn = 0;
    long long idsw = 0;
    long long frag = 0;
    long long gt_count = 0;
    long long pred_count = 0;
    std::vector<HotaAlphaPoint> per_alpha;
};

// Single-frame detection matching: maximum-cardinality bipartite matching
// over pairs with IoU >= alpha, ties resolved toward maximum total IoU.
struct FrameMatch {
    std::vector<std::pair<int, int>> tp;  // (gt index, pred index)
    std::vector<int> fp;                  // unmatched pred indices
    std::vector<int> fn;                  // unmatched gt indices
};
FrameMatch match_frame(const std::vector<Box2D>& gt_boxes,
                       const std::vector<Box2D>& pred_boxes, double alpha);

// Multi-object tracking accuracy: 1 - (FP + FN + IDSW) / total GT boxes, with
// frame-to-frame match continuity at IoU 0.5 and identity switches counted
// against each ground-truth identity's most recent matched prediction id.
// Throws EmptyGroundTruth when no visible GT boxes exist.
double mota(const std::vector<GtEntry>& gt, const std::vector<ResultEntry>& results);

// Identity F1: overlap counts at IoU >= 0.5 feed one global identity-to-
// identity assignment maximizing total overlap; the matched overlap is IDTP.
// Throws EmptyGroundTruth.
double idf1(const std::vector<GtEntry>& gt, const std::vector<ResultEntry>& results);

// Default localization-threshold grid: 0.05, 0.10, ..., 0.95.
std::vector<double> default_hota_alphas();

struct HotaResult {
    double hota = 0.0;
    double deta = 0.0;
    double assa = 0.0;
    std::vector<HotaAlphaPoint> per_alpha;
};

// Higher-order tracking accuracy. Per threshold: per-frame maximum matchings
// (IoU >= alpha, best total IoU, ties broken toward globally aligned identity
// pairs), detection accuracy TP/(TP+FN+FP), association accuracy as the mean
// pair-level Jaccard over true positives, and HOTA as their geometric mean;
// headline numbers average over the grid. Throws EmptyGroundTruth.
HotaResult hota(const std::vector<GtEntry>& gt, const std::vector<ResultEntry>& results,
                const std::vector<double>& alphas = default_hota_alphas());

// Mean IoU over the true-positive pairs of the continuity matching at 0.5.
// Throws NoTruePositives when that set is empty.
double loca(const std::vector<GtEntry>& gt, const std::vector<ResultEntry>& results);

// Number of tracked -> untracked -> tracked transitions summed over
// ground-truth trajectories (matching at IoU 0.5).
long long frag(const std::vector<GtEntry>& gt, const std::vector<ResultEntry>& results);

// Full report over one sequence. LocA is reported as 0 when no pair ever
// matched instead of raising, so degenerate results still evaluate.
MetricsReport evaluate(const std::vector<GtEntry>& gt,
                       const std::vector<ResultEntry>& results);

// Human-readable aligned summary.
std::string format_report(const MetricsReport& report);

// Machine-readable key=value lines, one metric per line.
std::string format_report_keyvalues(const MetricsReport& report);

}  // namespace motkit
