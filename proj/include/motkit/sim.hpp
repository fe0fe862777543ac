#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "motkit/cmc.hpp"
#include "motkit/geometry.hpp"
#include "motkit/metrics.hpp"
#include "motkit/tracker.hpp"

namespace motkit {

/// Platform (camera) sway model. Jitter follows a first-order autoregressive
/// process so consecutive frames sway coherently like a vessel on swell
/// rather than as white noise.
struct PlatformMotion {
    enum class Kind { none, translation_jitter, rotation_jitter, composite };
    Kind kind = Kind::none;
    double translation_sigma_px = 0.0;  // stationary std of the per-frame shift
    double rotation_sigma_rad = 0.0;    // stationary std of the per-frame roll
};

/// One dropout window: the target emits no detections and its ground truth is
/// flagged invisible for `duration` frames starting at `start_frame`.
struct OcclusionEvent {
    int target = 0;  // 0-based target index
    int start_frame = 1;
    int duration = 1;
};

struct ScenarioConfig {
    int n_targets = 5;
    int frames = 100;
    double image_width = 1280.0;
    double image_height = 720.0;
    double min_target_size = 28.0;  // box side, px
    double max_target_size = 48.0;
    double min_speed = 0.5;  // px/frame in the world frame
    double max_speed = 1.4;
    PlatformMotion platform;
    double detection_noise_sigma = 0.5;  // px on each box corner
    double miss_rate = 0.02;
    double false_positive_rate = 0.0;  // per-frame Poisson mean
    std::vector<OcclusionEvent> occlusions;
    int embedding_dim = 128;
    double embedding_noise_angle = 0.01;  // rad, rotation applied per detection
    std::uint64_t seed = 0;
};

/// Everything one closed-loop experiment needs: ground truth, detections with
/// embeddings attached, the true per-frame platform transforms, and matched
/// background points from which those transforms can be re-estimated.
struct ScenarioBundle {
    std::vector<GtEntry> gt;
    std::vector<DetectionObservation> detections;
    std::vector<int> detection_identity;  // parallel to detections; -1 = false positive
    std::map<int, AffineTransform2D> transforms;  // step transform per frame, frame 1 identity
    std::vector<PointCorrespondenceSet> correspondences;  // one set per frame
};

/// Deterministically expands a config into a full bundle. Targets move at
/// constant velocity in the world frame; the cumulative platform transform
/// projects them into each frame's image coordinates. Throws ConfigInvalid.
ScenarioBundle generate(const ScenarioConfig& cfg);

/// Named archetypes: "calm" (5 targets, static platform), "jitter" (calm plus
/// composite sway), "occlusion" (calm plus three dropout windows), "crowded"
/// (20 targets, 8% miss rate). Throws UnknownPreset.
ScenarioConfig preset(const std::string& name);

/// Cosine distances between detection embeddings after amplification:
/// same-identity pairs on one side, cross-identity pairs on the other.
/// False positives are excluded.
struct DistanceHistogram {
    std::vector<double> positives;
    std::vector<double> negatives;
};
DistanceHistogram embedding_distance_histogram(const ScenarioBundle& bundle,
                                               double beta = 800.0);

}  // namespace motkit
