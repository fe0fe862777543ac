#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "motkit/geometry.hpp"

namespace motkit {

/// Matched background points between frame k-1 (source) and frame k (target).
struct PointCorrespondenceSet {
    std::vector<std::pair<Point2D, Point2D>> pairs;
    int frame_index = 1;
};

struct CmcConfig {
    int ransac_iterations = 200;
    double inlier_threshold = 3.0;     // px
    double min_inlier_fraction = 0.3;
    std::uint64_t seed = 0;
};

/// Least-squares affine fit d = m*s + t over all pairs. Exact when the pairs
/// were generated by an affine map. Solved via the 3x3 normal equations; the
/// two output coordinates share one system matrix.
///
/// Throws InsufficientCorrespondences (< 3 pairs) or DegenerateConfiguration
/// (collinear sources).
AffineTransform2D fit_affine_lsq(const PointCorrespondenceSet& pairs);

struct RansacResult {
    AffineTransform2D transform;
    std::vector<bool> inlier_mask;
};

/// RANSAC over minimal 3-pair samples, refit on the consensus set.
/// Deterministic for a fixed cfg.seed. Throws NoConsensus when the best
/// inlier fraction stays below cfg.min_inlier_fraction.
RansacResult estimate_affine_ransac(const PointCorrespondenceSet& pairs, const CmcConfig& cfg);

/// Per-frame platform transform stream. Each transform maps frame k-1
/// coordinates into frame k coordinates; frame 1 is identity by convention.
class TransformSource {
public:
    enum class Kind { identity, file, correspondences };

    /// CMC disabled: every frame gets the identity transform.
    static TransformSource identity();

    /// Backed by a transforms file (rows `frame,a11,a12,a21,a22,tx,ty`).
    static TransformSource from_file(const std::string& path);

    /// Estimates each frame's transform from its correspondence set.
    static TransformSource from_correspondences(std::vector<PointCorrespondenceSet> sets,
                                                const CmcConfig& cfg);

    /// Transform for a 1-based frame index. Throws MissingFrame for file- and
    /// correspondence-backed sources when the frame is absent.
    AffineTransform2D transform_for_frame(int frame) const;

    Kind kind() const { return kind_; }

private:
    Kind kind_ = Kind::identity;
    std::map<int, AffineTransform2D> transforms_;
};

}  // namespace motkit
