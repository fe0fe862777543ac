#include "motkit/tracker.hpp"

#include <algorithm>
#include <string>

#include "motkit/errors.hpp"

namespace motkit {

Tracker::Tracker(TrackerConfig cfg) : cfg_(std::move(cfg)) {
    if (cfg_.buffer_frames < 1) {
        throw ConfigInvalid("buffer_frames must be >= 1");
    }
    if (cfg_.n_init < 1) {
        throw ConfigInvalid("n_init must be >= 1");
    }
}

FrameResult Tracker::step(int frame, const std::vector<DetectionObservation>& detections,
                          const AffineTransform2D& transform) {
    if (frame <= last_frame_) {
        throw NonMonotonicFrame("frame " + std::to_string(frame) + " after frame " +
                                std::to_string(last_frame_));
    }
    const bool first_step = !seeded_;

    // Lost tracks that sat out the whole buffer die before this frame starts.
    std::erase_if(tracks_, [&](const Track& t) {
        return t.status == TrackStatus::removed ||
               (t.status == TrackStatus::lost && t.frames_since_update >= cfg_.buffer_frames);
    });

    for (Track& t : tracks_) {
        t.state = kalman_predict(t.state, cfg_.kalman);
        if (cfg_.cmc_enabled) {
            t.state = apply_platform_compensation(t.state, transform);
        }
    }

    // Split the detections by confidence; the high band drives appearance
    // matching and track births, the low band only rescues leftovers.
    std::vector<int> high, low;
    for (std::size_t d = 0; d < detections.size(); ++d) {
        const DetectionObservation& det = detections[d];
        if (det.frame != frame) {
            throw StreamMisalignment("detection tagged frame " + std::to_string(det.frame) +
                                     " passed to step for frame " + std::to_string(frame));
        }
        if (det.confidence >= cfg_.assoc.detection_threshold) {
            if (!det.embedding.has_value()) {
                throw StreamMisalignment("high-confidence detection " + std::to_string(d) +
                                         " in frame " + std::to_string(frame) +
                                         " has no embedding");
            }
            high.push_back(static_cast<int>(d));
        } else if (det.confidence >= cfg_.assoc.low_conf_threshold) {
            low.push_back(static_cast<int>(d));
        }
    }

    std::vector<int> mature;     // confirmed + lost, by index into tracks_
    std::vector<int> tentative;
    for (std::size_t i = 0; i < tracks_.size(); ++i) {
        if (tracks_[i].status == TrackStatus::tentative) {
            tentative.push_back(static_cast<int>(i));
        } else {
            mature.push_back(static_cast<int>(i));
        }
    }

    std::vector<std::pair<int, int>> matched;  // (track index, detection index)

    // Stage 1: fused appearance+overlap costs, mature tracks vs high band.
    std::vector<TrackCostInput> inputs;
    inputs.reserve(mature.size());
    for (const int i : mature) {
        inputs.push_back({uema_unbiased(tracks_[i].appearance), state_to_box(tracks_[i].state)});
    }
    std::vector<Box2D> high_boxes;
    std::vector<EmbeddingVector> high_embs;
    for (const int d : high) {
        high_boxes.push_back(detections[d].box);
        high_embs.push_back(*detections[d].embedding);
    }
    const CoffMatrices coff = build_cost_matrices(inputs, high_boxes, high_embs, cfg_.coff);
    const StageResult s1 = first_stage(coff.fused, coff.raw_cosine, cfg_.assoc);
    for (const auto& [ti, dj] : s1.matches) matched.emplace_back(mature[ti], high[dj]);

    // Stage 2: plain overlap, stage-1 leftovers vs low band.
    std::vector<Box2D> leftover_boxes;
    for (const int ti : s1.leftover_tracks) {
        leftover_boxes.push_back(state_to_box(tracks_[mature[ti]].state));
    }
    std::vector<Box2D> low_boxes;
    for (const int d : low) low_boxes.push_back(detections[d].box);
    const StageResult s2 = second_stage(leftover_boxes, low_boxes, cfg_.assoc);
    for (const auto& [ti, dj] : s2.matches) {
        matched.emplace_back(mature[s1.leftover_tracks[ti]], low[dj]);
    }

    // Stage 3: probationary tracks claim leftover high detections by overlap
    // so a newborn is not duplicated while it matures.
    std::vector<Box2D> tent_boxes;
    for (const int i : tentative) tent_boxes.push_back(state_to_box(tracks_[i].state));
    std::vector<Box2D> rem_high_boxes;
    for (const int dj : s1.leftover_detections) rem_high_boxes.push_back(high_boxes[dj]);
    const StageResult s3 = second_stage(tent_boxes, rem_high_boxes, cfg_.assoc);
    for (const auto& [ti, dj] : s3.matches) {
        matched.emplace_back(tentative[ti], high[s1.leftover_detections[dj]]);
    }

    std::vector<char> track_matched(tracks_.size(), 0);
    for (const auto& [i, d] : matched) {
        Track& t = tracks_[i];
        const DetectionObservation& det = detections[d];
        track_matched[i] = 1;
        t.state = kalman_update(t.state, det.box, cfg_.kalman);
        if (det.embedding.has_value()) {
            t.appearance = uema_update(t.appearance, *det.embedding);
        }
        t.frames_since_update = 0;
        ++t.hits;
        t.last_confidence = det.confidence;
        t.class_id = det.class_id;
        t.history.emplace_back(frame, state_to_box(t.state));
        if (t.status == TrackStatus::lost) {
            t.status = TrackStatus::confirmed;
        } else if (t.status == TrackStatus::tentative && t.hits >= cfg_.n_init) {
            t.status = TrackStatus::confirmed;
        }
    }

    for (std::size_t i = 0; i < tracks_.size(); ++i) {
        if (track_matched[i]) continue;
        Track& t = tracks_[i];
        ++t.frames_since_update;
        if (t.status == TrackStatus::tentative) {
            t.status = TrackStatus::removed;  // a miss during probation ends it
        } else if (t.status == TrackStatus::confirmed) {
            t.status = TrackStatus::lost;
        }
    }
    std::erase_if(tracks_, [](const Track& t) { return t.status == TrackStatus::removed; });

    // Births from high-confidence detections nobody claimed.
    std::vector<char> det_matched(detections.size(), 0);
    for (const auto& [i, d] : matched) det_matched[d] = 1;
    for (const int d : high) {
        if (det_matched[d]) continue;
        const DetectionObservation& det = detections[d];
        Track t;
        t.track_id = next_id_++;
        t.state = kalman_initiate(det.box, cfg_.kalman);
        t.appearance = TrackAppearance(static_cast<int>(det.embedding->size()), cfg_.coff.alpha);
        t.appearance = uema_update(t.appearance, *det.embedding);
        t.status = first_step ? TrackStatus::confirmed : TrackStatus::tentative;
        t.hits = 1;
        t.last_confidence = det.confidence;
        t.class_id = det.class_id;
        t.history.emplace_back(frame, state_to_box(t.state));
        tracks_.push_back(std::move(t));
    }

    FrameResult result;
    result.frame = frame;
    for (const Track& t : tracks_) {
        if (t.status == TrackStatus::confirmed && t.frames_since_update == 0) {
            result.outputs.push_back(
                {t.track_id, state_to_box(t.state), t.last_confidence, t.class_id});
        }
    }

    last_frame_ = frame;
    seeded_ = true;
    return result;
}

std::vector<FrameResult> run_sequence(const std::vector<DetectionObservation>& detections,
                                      const EmbeddingTable& embeddings,
                                      const TransformSource& transforms,
                                      const TrackerConfig& cfg) {
    std::map<int, std::vector<DetectionObservation>> by_frame;
    int max_frame = 0;
    for (const DetectionObservation& det : detections) {
        by_frame[det.frame].push_back(det);
        max_frame = std::max(max_frame, det.frame);
    }

    for (const auto& [frame, rows] : embeddings) {
        auto it = by_frame.find(frame);
        for (const auto& [index, emb] : rows) {
            if (it == by_frame.end() || index < 0 ||
                index >= static_cast<int>(it->second.size())) {
                throw StreamMisalignment("embedding for frame " + std::to_string(frame) +
                                         ", detection " + std::to_string(index) +
                                         " has no matching detection row");
            }
            it->second[static_cast<std::size_t>(index)].embedding = emb;
        }
    }

    Tracker tracker(cfg);
    std::vector<FrameResult> results;
    static const std::vector<DetectionObservation> kNone;
    for (int frame = 1; frame <= max_frame; ++frame) {
        const auto it = by_frame.find(frame);
        const auto& dets = it == by_frame.end() ? kNone : it->second;
        results.push_back(tracker.step(frame, dets, transforms.transform_for_frame(frame)));
    }
    return results;
}

std::vector<FrameResult> interpolate_tracklets(const std::vector<FrameResult>& results,
                                               int max_gap) {
    std::map<int, std::vector<std::pair<int, TrackOutput>>> per_track;
    std::map<int, std::vector<TrackOutput>> per_frame;
    for (const FrameResult& fr : results) {
        per_frame[fr.frame];  // keep empty frames in the output
        for (const TrackOutput& out : fr.outputs) {
            per_track[out.track_id].emplace_back(fr.frame, out);
        }
    }

    for (auto& [track_id, obs] : per_track) {
        std::sort(obs.begin(), obs.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        for (std::size_t k = 0; k + 1 < obs.size(); ++k) {
            const auto& [f1, o1] = obs[k];
            const auto& [f2, o2] = obs[k + 1];
            const int gap = f2 - f1 - 1;
            if (gap < 1 || gap > max_gap) continue;
            for (int f = f1 + 1; f < f2; ++f) {
                const double t = static_cast<double>(f - f1) / static_cast<double>(f2 - f1);
                TrackOutput mid;
                mid.track_id = track_id;
                mid.box.x = o1.box.x + t * (o2.box.x - o1.box.x);
                mid.box.y = o1.box.y + t * (o2.box.y - o1.box.y);
                mid.box.w = o1.box.w + t * (o2.box.w - o1.box.w);
                mid.box.h = o1.box.h + t * (o2.box.h - o1.box.h);
                mid.confidence = o1.confidence + t * (o2.confidence - o1.confidence);
                mid.class_id = o1.class_id;
                per_frame[f].push_back(mid);
            }
        }
        for (const auto& [f, out] : obs) per_frame[f].push_back(out);
    }

    std::vector<FrameResult> out;
    for (auto& [frame, outputs] : per_frame) {
        std::sort(outputs.begin(), outputs.end(),
                  [](const TrackOutput& a, const TrackOutput& b) {
                      return a.track_id < b.track_id;
                  });
        out.push_back({frame, std::move(outputs)});
    }
    return out;
}

}  // namespace motkit
