#pragma once

#include <map>
#include <string>
#include <vector>

#include "motkit/cmc.hpp"
#include "motkit/metrics.hpp"
#include "motkit/sim.hpp"
#include "motkit/tracker.hpp"

namespace motkit {

// All readers parse comma-separated plain text, skip blank lines, accept
// unsorted frames (rows are sorted on load) and tolerate extra trailing
// fields. Malformed rows raise ParseError carrying "path:line"; negative box
// sizes raise NegativeDimensions. All writers use fixed decimal formatting so
// a rerun produces byte-identical files.

/// Rows `frame,id,x,y,w,h,conf,class,visibility`; visibility defaults to 1
/// when absent. Sorted by (frame, id).
std::vector<GtEntry> read_gt_file(const std::string& path);

/// Rows `frame,id,x,y,w,h,conf[,class,...]` with id conventionally -1.
/// Sorted by frame; the within-frame file order defines the detection index
/// that embedding rows refer to.
std::vector<DetectionObservation> read_detections_file(const std::string& path);

/// Rows `frame,id,x,y,w,h,conf,...`. Sorted by (frame, id).
std::vector<ResultEntry> read_result_file(const std::string& path);

/// Rows `frame,det_index,v0,...,v(D-1)`. Every row must share one dimension D
/// (InconsistentDimension otherwise); vectors are L2-normalized on load and a
/// zero row raises ZeroVector.
EmbeddingTable read_embeddings_file(const std::string& path);

/// MOTChallenge result rows `frame,id,x,y,w,h,conf,-1,-1,-1`, sorted by
/// (frame, id), 6-decimal fixed formatting. Throws IoFailure.
void write_results_file(const std::string& path, const std::vector<FrameResult>& results);

/// Regroups flat result rows into per-frame results (for re-writing).
std::vector<FrameResult> group_results(const std::vector<ResultEntry>& entries);

/// Rows `frame,a11,a12,a21,a22,tx,ty`, one per frame; frame 1 is expected to
/// be the identity by convention but this is not enforced here.
std::map<int, AffineTransform2D> read_transforms_file(const std::string& path);
void write_transforms_file(const std::string& path,
                           const std::map<int, AffineTransform2D>& transforms);

/// Rows `frame,source_x,source_y,target_x,target_y`, grouped into one
/// correspondence set per frame, sorted by frame.
std::vector<PointCorrespondenceSet> read_correspondences_file(const std::string& path);
void write_correspondences_file(const std::string& path,
                                const std::vector<PointCorrespondenceSet>& sets);

void write_gt_file(const std::string& path, const std::vector<GtEntry>& entries);
void write_detections_file(const std::string& path,
                           const std::vector<DetectionObservation>& detections);

/// One embedding row per detection whose confidence reaches
/// `high_conf_threshold`, indexed by the detection's within-frame position.
void write_embeddings_file(const std::string& path,
                           const std::vector<DetectionObservation>& detections,
                           double high_conf_threshold);

/// Writes gt.txt, det.txt, emb.txt, transforms.txt and corresp.txt under
/// `directory` (created if needed) so simulate -> track -> eval composes as
/// plain files.
void write_bundle(const std::string& directory, const ScenarioBundle& bundle,
                  double high_conf_threshold);

}  // namespace motkit
