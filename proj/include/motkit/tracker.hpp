#pragma once

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "motkit/appearance.hpp"
#include "motkit/association.hpp"
#include "motkit/cmc.hpp"
#include "motkit/geometry.hpp"
#include "motkit/kalman.hpp"

namespace motkit {

/// One detector output, optionally joined with its appearance embedding.
/// High-confidence detections must carry an embedding by the time they reach
/// the tracker; the per-frame step enforces this.
struct DetectionObservation {
    int frame = 1;
    Box2D box;
    double confidence = 0.0;
    int class_id = 1;
    std::optional<EmbeddingVector> embedding;
};

enum class TrackStatus { tentative, confirmed, lost, removed };

struct Track {
    int track_id = 0;
    KalmanState state;
    TrackAppearance appearance;
    TrackStatus status = TrackStatus::tentative;
    int frames_since_update = 0;
    int hits = 0;  // matched frames, the spawn frame included
    double last_confidence = 0.0;
    int class_id = 1;
    std::vector<std::pair<int, Box2D>> history;  // (frame, box) at each update
};

struct TrackerConfig {
    int buffer_frames = 30;  // lost tracks survive this many missed frames
    int n_init = 3;          // consecutive hits before a later-born track is emitted
    AssociationConfig assoc;
    CoffConfig coff;
    KalmanConfig kalman;
    bool cmc_enabled = true;
};

struct TrackOutput {
    int track_id = 0;
    Box2D box;
    double confidence = 0.0;
    int class_id = 1;
};

/// Boxes of the confirmed tracks updated in one frame.
struct FrameResult {
    int frame = 0;
    std::vector<TrackOutput> outputs;
};

/// Frame -> list of (detection index within that frame, embedding).
using EmbeddingTable = std::map<int, std::vector<std::pair<int, EmbeddingVector>>>;

/// Online tracker over one sequence. Per frame: drop lost tracks past the
/// buffer, predict every live track, fold in the platform transform, split
/// detections by confidence, run fused-cost association on the high band and
/// overlap association on the low band, update matched tracks, spawn new ones
/// from leftover high-confidence detections, and emit the confirmed set.
///
/// Tracks born on the very first processed frame are trusted immediately;
/// later births must hit n_init consecutive frames before they are emitted,
/// and a miss during that probation removes them.
class Tracker {
public:
    explicit Tracker(TrackerConfig cfg);

    /// Advances one frame. `transform` maps previous-frame coordinates into
    /// this frame's coordinates and is ignored unless cmc_enabled. Throws
    /// NonMonotonicFrame when frames do not strictly increase and
    /// StreamMisalignment when a detection's frame tag disagrees with `frame`
    /// or a high-confidence detection lacks an embedding.
    FrameResult step(int frame, const std::vector<DetectionObservation>& detections,
                     const AffineTransform2D& transform);

    const std::vector<Track>& tracks() const { return tracks_; }
    const TrackerConfig& config() const { return cfg_; }

private:
    TrackerConfig cfg_;
    std::vector<Track> tracks_;
    int next_id_ = 1;
    int last_frame_ = 0;
    bool seeded_ = false;  // becomes true after the first processed frame
};

/// Joins the detection, embedding and transform streams frame by frame and
/// folds Tracker::step over frames 1..max. Deterministic for fixed inputs.
/// Throws StreamMisalignment when an embedding row points at a detection
/// index that does not exist in its frame.
std::vector<FrameResult> run_sequence(const std::vector<DetectionObservation>& detections,
                                      const EmbeddingTable& embeddings,
                                      const TransformSource& transforms,
                                      const TrackerConfig& cfg);

/// Offline gap filling: for every track with consecutive observations
/// `gap <= max_gap` frames apart, inserts componentwise linearly interpolated
/// boxes (and confidences) on the missing frames. Larger gaps are untouched.
std::vector<FrameResult> interpolate_tracklets(const std::vector<FrameResult>& results,
                                               int max_gap);

}  // namespace motkit
