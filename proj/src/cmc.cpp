#include "motkit/cmc.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "motkit/io.hpp"
#include "motkit/rng.hpp"

namespace motkit {

namespace {

AffineTransform2D fit_affine_indices(const PointCorrespondenceSet& set,
                                     const std::vector<int>& idx) {
    // d = m*s + t decouples into two 3-unknown systems sharing the
    // normal matrix of rows [sx, sy, 1].
    Eigen::Matrix3d ata = Eigen::Matrix3d::Zero();
    Eigen::Vector3d atx = Eigen::Vector3d::Zero();
    Eigen::Vector3d aty = Eigen::Vector3d::Zero();
    for (int i : idx) {
        const auto& [s, d] = set.pairs[i];
        const Eigen::Vector3d row(s.x, s.y, 1.0);
        ata += row * row.transpose();
        atx += row * d.x;
        aty += row * d.y;
    }

    Eigen::FullPivLU<Eigen::Matrix3d> lu(ata);
    if (!lu.isInvertible()) {
        throw DegenerateConfiguration("collinear or coincident source points");
    }
    const Eigen::Vector3d rx = lu.solve(atx);
    const Eigen::Vector3d ry = lu.solve(aty);

    AffineTransform2D T;
    T.m << rx(0), rx(1), ry(0), ry(1);
    T.t << rx(2), ry(2);
    return T;
}

double residual(const AffineTransform2D& T, const Point2D& s, const Point2D& d) {
    const Point2D p = apply_affine(T, s);
    return std::hypot(p.x - d.x, p.y - d.y);
}

}  // namespace

AffineTransform2D fit_affine_lsq(const PointCorrespondenceSet& set) {
    if (set.pairs.size() < 3) {
        throw InsufficientCorrespondences("affine fit needs >= 3 pairs, got " +
                                          std::to_string(set.pairs.size()));
    }
    std::vector<int> all(set.pairs.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
    return fit_affine_indices(set, all);
}

RansacResult estimate_affine_ransac(const PointCorrespondenceSet& set, const CmcConfig& cfg) {
    const int n = static_cast<int>(set.pairs.size());
    if (n < 3) {
        throw InsufficientCorrespondences("RANSAC needs >= 3 pairs, got " + std::to_string(n));
    }

    Rng rng(cfg.seed);
    int best_count = -1;
    std::vector<int> best_inliers;

    std::vector<int> sample(3);
    for (int it = 0; it < cfg.ransac_iterations; ++it) {
        sample[0] = rng.uniform_int(0, n - 1);
        do {
            sample[1] = rng.uniform_int(0, n - 1);
        } while (sample[1] == sample[0]);
        do {
            sample[2] = rng.uniform_int(0, n - 1);
        } while (sample[2] == sample[0] || sample[2] == sample[1]);

        AffineTransform2D model;
        try {
            model = fit_affine_indices(set, sample);
        } catch (const DegenerateConfiguration&) {
            continue;
        }

        std::vector<int> inliers;
        for (int i = 0; i < n; ++i) {
            if (residual(model, set.pairs[i].first, set.pairs[i].second) < cfg.inlier_threshold) {
                inliers.push_back(i);
            }
        }
        if (static_cast<int>(inliers.size()) > best_count) {
            best_count = static_cast<int>(inliers.size());
            best_inliers = std::move(inliers);
        }
    }

    if (best_count < 3 ||
        static_cast<double>(best_count) / n < cfg.min_inlier_fraction) {
        throw NoConsensus("best inlier fraction " +
                          std::to_string(best_count < 0 ? 0.0 : static_cast<double>(best_count) / n) +
                          " below minimum " + std::to_string(cfg.min_inlier_fraction));
    }

    const AffineTransform2D refit = fit_affine_indices(set, best_inliers);
    RansacResult out;
    out.transform = refit;
    out.inlier_mask.resize(n);
    for (int i = 0; i < n; ++i) {
        out.inlier_mask[i] =
            residual(refit, set.pairs[i].first, set.pairs[i].second) < cfg.inlier_threshold;
    }
    return out;
}

TransformSource TransformSource::identity() {
    TransformSource src;
    src.kind_ = Kind::identity;
    return src;
}

TransformSource TransformSource::from_file(const std::string& path) {
    TransformSource src;
    src.kind_ = Kind::file;
    src.transforms_ = read_transforms_file(path);
    return src;
}

TransformSource TransformSource::from_correspondences(std::vector<PointCorrespondenceSet> sets,
                                                      const CmcConfig& cfg) {
    TransformSource src;
    src.kind_ = Kind::correspondences;
    for (const auto& set : sets) {
        if (set.frame_index == 1 && set.pairs.empty()) {
            src.transforms_[1] = AffineTransform2D::identity();
            continue;
        }
        src.transforms_[set.frame_index] = estimate_affine_ransac(set, cfg).transform;
    }
    return src;
}

AffineTransform2D TransformSource::transform_for_frame(int frame) const {
    if (kind_ == Kind::identity) return AffineTransform2D::identity();
    auto it = transforms_.find(frame);
    if (it == transforms_.end()) {
        throw MissingFrame("no platform transform for frame " + std::to_string(frame));
    }
    return it->second;
}

}  // namespace motkit
