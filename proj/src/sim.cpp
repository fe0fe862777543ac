#include "motkit/sim.hpp"

#include <cmath>
#include <string>

#include "motkit/appearance.hpp"
#include "motkit/errors.hpp"
#include "motkit/rng.hpp"

namespace motkit {

namespace {

// Sway correlation of the autoregressive platform jitter. High enough that
// the platform swings coherently over several frames, low enough that the
// swing direction keeps reversing within a sequence.
constexpr double kSwayCorrelation = 0.85;
constexpr int kBackgroundPoints = 40;

// Confidence bands: true detections mostly land in the high band, a fixed
// fraction sinks into the low band, and clutter spans both sides of the
// detection threshold.
constexpr double kLowBandFraction = 0.15;
constexpr double kLowBandLo = 0.25;
constexpr double kLowBandHi = 0.55;
constexpr double kHighBandLo = 0.72;
constexpr double kHighBandHi = 0.98;
constexpr double kFalseConfLo = 0.15;
constexpr double kFalseConfHi = 0.70;

void validate(const ScenarioConfig& cfg) {
    const auto fail = [](const std::string& what) { throw ConfigInvalid(what); };
    if (cfg.n_targets < 0) fail("n_targets must be >= 0");
    if (cfg.frames < 1) fail("frames must be >= 1");
    if (cfg.image_width <= 0 || cfg.image_height <= 0) fail("image size must be positive");
    if (cfg.min_target_size <= 0 || cfg.max_target_size < cfg.min_target_size) {
        fail("target_size_range must satisfy 0 < min <= max");
    }
    if (cfg.min_speed < 0 || cfg.max_speed < cfg.min_speed) {
        fail("speed_range must satisfy 0 <= min <= max");
    }
    if (cfg.platform.translation_sigma_px < 0 || cfg.platform.rotation_sigma_rad < 0) {
        fail("platform sigmas must be >= 0");
    }
    if (cfg.detection_noise_sigma < 0) fail("detection_noise_sigma must be >= 0");
    if (cfg.miss_rate < 0 || cfg.miss_rate > 1) fail("miss_rate must be in [0, 1]");
    if (cfg.false_positive_rate < 0) fail("false_positive_rate must be >= 0");
    for (const OcclusionEvent& ev : cfg.occlusions) {
        if (ev.target < 0 || ev.target >= cfg.n_targets) fail("occlusion target out of range");
        if (ev.start_frame < 1) fail("occlusion start_frame must be >= 1");
        if (ev.duration < 1) fail("occlusion duration must be >= 1");
    }
    if (cfg.embedding_dim < 2) fail("embedding_dim must be >= 2");
    if (cfg.embedding_noise_angle < 0 || cfg.embedding_noise_angle >= M_PI / 2) {
        fail("embedding_noise_angle must be in [0, pi/2)");
    }
}

EmbeddingVector random_unit(Rng& rng, int dim) {
    EmbeddingVector v(dim);
    for (int i = 0; i < dim; ++i) v(i) = rng.normal();
    return v / v.norm();
}

// Rotates `u` by `angle` toward a random direction orthogonal to it, so the
// cosine between the result and `u` is exactly cos(angle).
EmbeddingVector rotate_toward_random(const EmbeddingVector& u, double angle, Rng& rng) {
    EmbeddingVector g(u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) g(i) = rng.normal();
    EmbeddingVector v = g - g.dot(u) * u;
    const double n = v.norm();
    if (n < 1e-12) return u;  // astronomically unlikely degenerate draw
    v /= n;
    return std::cos(angle) * u + std::sin(angle) * v;
}

}  // namespace

ScenarioBundle generate(const ScenarioConfig& cfg) {
    validate(cfg);
    Rng rng(cfg.seed);

    std::vector<EmbeddingVector> prototypes;
    for (int i = 0; i < cfg.n_targets; ++i) {
        prototypes.push_back(random_unit(rng, cfg.embedding_dim));
    }

    // World-frame constant-velocity targets spawned over the central region
    // so their whole run stays near the image.
    struct Target {
        double cx, cy, w, h, vx, vy;
    };
    std::vector<Target> targets;
    for (int i = 0; i < cfg.n_targets; ++i) {
        Target t;
        t.cx = rng.uniform(0.2 * cfg.image_width, 0.8 * cfg.image_width);
        t.cy = rng.uniform(0.2 * cfg.image_height, 0.8 * cfg.image_height);
        t.w = rng.uniform(cfg.min_target_size, cfg.max_target_size);
        t.h = rng.uniform(cfg.min_target_size, cfg.max_target_size);
        const double speed = rng.uniform(cfg.min_speed, cfg.max_speed);
        const double heading = rng.uniform(0.0, 2.0 * M_PI);
        t.vx = speed * std::cos(heading);
        t.vy = speed * std::sin(heading);
        targets.push_back(t);
    }

    std::vector<Point2D> background;
    for (int p = 0; p < kBackgroundPoints; ++p) {
        background.push_back({rng.uniform(0.0, cfg.image_width), rng.uniform(0.0, cfg.image_height)});
    }

    const auto occluded = [&cfg](int target, int frame) {
        for (const OcclusionEvent& ev : cfg.occlusions) {
            if (ev.target == target && frame >= ev.start_frame &&
                frame < ev.start_frame + ev.duration) {
                return true;
            }
        }
        return false;
    };

    const bool sway_rot = cfg.platform.kind == PlatformMotion::Kind::rotation_jitter ||
                          cfg.platform.kind == PlatformMotion::Kind::composite;
    const bool sway_trans = cfg.platform.kind == PlatformMotion::Kind::translation_jitter ||
                            cfg.platform.kind == PlatformMotion::Kind::composite;
    const double innovation = std::sqrt(1.0 - kSwayCorrelation * kSwayCorrelation);
    const Eigen::Vector2d center(0.5 * cfg.image_width, 0.5 * cfg.image_height);

    ScenarioBundle bundle;
    AffineTransform2D cumulative;  // world (= frame 1) -> current frame
    double sway_angle = 0.0;
    Eigen::Vector2d sway_shift = Eigen::Vector2d::Zero();

    for (int frame = 1; frame <= cfg.frames; ++frame) {
        AffineTransform2D step;
        if (frame > 1) {
            if (sway_rot) {
                sway_angle = kSwayCorrelation * sway_angle +
                             rng.normal(0.0, cfg.platform.rotation_sigma_rad * innovation);
                Eigen::Matrix2d r;
                r << std::cos(sway_angle), -std::sin(sway_angle),  //
                    std::sin(sway_angle), std::cos(sway_angle);
                step.m = r;
                step.t = center - r * center;  // roll about the image center
            }
            if (sway_trans) {
                for (int d = 0; d < 2; ++d) {
                    sway_shift(d) = kSwayCorrelation * sway_shift(d) +
                                    rng.normal(0.0, cfg.platform.translation_sigma_px * innovation);
                }
                step.t += sway_shift;
            }
        }
        const AffineTransform2D previous = cumulative;
        cumulative = compose(step, cumulative);
        bundle.transforms[frame] = step;

        PointCorrespondenceSet set;
        set.frame_index = frame;
        for (const Point2D& p : background) {
            set.pairs.emplace_back(apply_affine(previous, p), apply_affine(cumulative, p));
        }
        bundle.correspondences.push_back(std::move(set));

        for (int i = 0; i < cfg.n_targets; ++i) {
            const Target& t = targets[i];
            const Box2D world = Box2D::from_center(t.cx + t.vx * (frame - 1),
                                                   t.cy + t.vy * (frame - 1), t.w, t.h);
            const Box2D image = apply_affine(cumulative, world);
            const bool occ = occluded(i, frame);
            bundle.gt.push_back({frame, i + 1, image, occ ? 0.0 : 1.0});
            if (occ) continue;
            if (rng.uniform() < cfg.miss_rate) continue;

            const double s = cfg.detection_noise_sigma;
            const double x1 = image.x + rng.normal(0.0, s);
            const double y1 = image.y + rng.normal(0.0, s);
            const double x2 = image.right() + rng.normal(0.0, s);
            const double y2 = image.bottom() + rng.normal(0.0, s);
            DetectionObservation det;
            det.frame = frame;
            det.box = {x1, y1, std::max(x2 - x1, 1e-3), std::max(y2 - y1, 1e-3)};
            det.confidence = rng.uniform() < kLowBandFraction
                                 ? rng.uniform(kLowBandLo, kLowBandHi)
                                 : rng.uniform(kHighBandLo, kHighBandHi);
            det.class_id = 1;
            det.embedding = rotate_toward_random(prototypes[i], cfg.embedding_noise_angle, rng);
            bundle.detections.push_back(std::move(det));
            bundle.detection_identity.push_back(i + 1);
        }

        const int n_false = rng.poisson(cfg.false_positive_rate);
        for (int f = 0; f < n_false; ++f) {
            const double w = rng.uniform(cfg.min_target_size, cfg.max_target_size);
            const double h = rng.uniform(cfg.min_target_size, cfg.max_target_size);
            const double cx = rng.uniform(0.0, cfg.image_width);
            const double cy = rng.uniform(0.0, cfg.image_height);
            DetectionObservation det;
            det.frame = frame;
            det.box = Box2D::from_center(cx, cy, w, h);
            det.confidence = rng.uniform(kFalseConfLo, kFalseConfHi);
            det.class_id = 1;
            det.embedding = random_unit(rng, cfg.embedding_dim);
            bundle.detections.push_back(std::move(det));
            bundle.detection_identity.push_back(-1);
        }
    }
    return bundle;
}

ScenarioConfig preset(const std::string& name) {
    ScenarioConfig cfg;
    cfg.false_positive_rate = 0.3;
    if (name == "calm") {
        return cfg;
    }
    if (name == "jitter") {
        cfg.platform.kind = PlatformMotion::Kind::composite;
        cfg.platform.translation_sigma_px = 8.0;
        cfg.platform.rotation_sigma_rad = 0.01;
        return cfg;
    }
    if (name == "occlusion") {
        cfg.occlusions = {{1, 30, 12}, {2, 50, 18}, {3, 70, 24}};
        return cfg;
    }
    if (name == "crowded") {
        cfg.n_targets = 20;
        cfg.miss_rate = 0.08;
        cfg.false_positive_rate = 1.0;
        return cfg;
    }
    throw UnknownPreset("no such scenario preset: " + name);
}

DistanceHistogram embedding_distance_histogram(const ScenarioBundle& bundle, double beta) {
    DistanceHistogram hist;
    for (std::size_t i = 0; i < bundle.detections.size(); ++i) {
        if (bundle.detection_identity[i] < 0 || !bundle.detections[i].embedding) continue;
        for (std::size_t j = i + 1; j < bundle.detections.size(); ++j) {
            if (bundle.detection_identity[j] < 0 || !bundle.detections[j].embedding) continue;
            const double d = amplify_distance(
                cosine_distance(*bundle.detections[i].embedding, *bundle.detections[j].embedding),
                beta);
            if (bundle.detection_identity[i] == bundle.detection_identity[j]) {
                hist.positives.push_back(d);
            } else {
                hist.negatives.push_back(d);
            }
        }
    }
    return hist;
}

}  // namespace motkit
