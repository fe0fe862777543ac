#include "motkit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include <Eigen/Dense>

#include "motkit/association.hpp"
#include "motkit/errors.hpp"

namespace motkit {

FrameMatch match_frame(const std::vector<Box2D>& gt_boxes,
                       const std::vector<Box2D>& pred_boxes, double alpha) {
    CostMatrix costs(gt_boxes.size(), pred_boxes.size());
    for (std::size_t i = 0; i < gt_boxes.size(); ++i) {
        for (std::size_t j = 0; j < pred_boxes.size(); ++j) {
            const double overlap = iou(gt_boxes[i], pred_boxes[j]);
            costs(i, j) = overlap >= alpha ? 1.0 - overlap : kForbiddenCost;
        }
    }
    const Assignment a = solve_assignment(costs);
    FrameMatch out;
    out.tp = a.matches;
    out.fn = a.unmatched_rows;
    out.fp = a.unmatched_cols;
    return out;
}

namespace {

constexpr double kClearAlpha = 0.5;

// One frame of the sequence after identity re-indexing. `iou_mat` is
// gt-row by pred-column.
struct FrameData {
    std::vector<int> gt_idx;
    std::vector<Box2D> gt_boxes;
    std::vector<int> pred_idx;
    std::vector<Box2D> pred_boxes;
    Eigen::MatrixXd iou_mat;
};

// The whole sequence with identities mapped to dense indices and invisible
// ground truth dropped.
struct SequenceView {
    std::vector<int> frames;
    std::vector<FrameData> per_frame;
    std::vector<int> gt_ids;
    std::vector<int> pred_ids;
    std::vector<long long> gt_id_count;
    std::vector<long long> pred_id_count;
    long long gt_total = 0;
    long long pred_total = 0;
};

SequenceView build_view(const std::vector<GtEntry>& gt,
                        const std::vector<ResultEntry>& results) {
    SequenceView v;
    std::map<int, int> gt_id_to_idx;
    std::map<int, int> pred_id_to_idx;
    std::set<int> frame_set;
    for (const auto& e : gt) {
        if (e.visibility == 0.0) continue;
        frame_set.insert(e.frame);
        gt_id_to_idx.emplace(e.id, 0);
    }
    for (const auto& e : results) {
        frame_set.insert(e.frame);
        pred_id_to_idx.emplace(e.id, 0);
    }
    int next = 0;
    for (auto& [id, idx] : gt_id_to_idx) {
        idx = next++;
        v.gt_ids.push_back(id);
    }
    next = 0;
    for (auto& [id, idx] : pred_id_to_idx) {
        idx = next++;
        v.pred_ids.push_back(id);
    }
    v.gt_id_count.assign(v.gt_ids.size(), 0);
    v.pred_id_count.assign(v.pred_ids.size(), 0);

    std::map<int, int> frame_pos;
    for (int f : frame_set) {
        frame_pos.emplace(f, static_cast<int>(v.frames.size()));
        v.frames.push_back(f);
    }
    v.per_frame.resize(v.frames.size());

    for (const auto& e : gt) {
        if (e.visibility == 0.0) continue;
        FrameData& fd = v.per_frame[frame_pos.at(e.frame)];
        const int idx = gt_id_to_idx.at(e.id);
        fd.gt_idx.push_back(idx);
        fd.gt_boxes.push_back(e.box);
        ++v.gt_id_count[idx];
        ++v.gt_total;
    }
    for (const auto& e : results) {
        FrameData& fd = v.per_frame[frame_pos.at(e.frame)];
        const int idx = pred_id_to_idx.at(e.id);
        fd.pred_idx.push_back(idx);
        fd.pred_boxes.push_back(e.box);
        ++v.pred_id_count[idx];
        ++v.pred_total;
    }

    for (auto& fd : v.per_frame) {
        fd.iou_mat.resize(fd.gt_boxes.size(), fd.pred_boxes.size());
        for (std::size_t i = 0; i < fd.gt_boxes.size(); ++i) {
            for (std::size_t j = 0; j < fd.pred_boxes.size(); ++j) {
                fd.iou_mat(i, j) = iou(fd.gt_boxes[i], fd.pred_boxes[j]);
            }
        }
    }
    return v;
}

struct ClearOutcome {
    long long fp = 0;
    long long fn = 0;
    long long idsw = 0;
    long long frag_count = 0;
    long long tp = 0;
    double iou_sum = 0.0;
};

// Frame-by-frame matching with continuity: a pair matched in the previous
// frame stays matched while its IoU holds, everything else is re-matched
// fresh. Identity switches compare against the most recent matched prediction
// over the whole past, so a switch across an occlusion gap still counts.
ClearOutcome clear_pass(const SequenceView& v) {
    ClearOutcome out;
    std::vector<int> prev_match(v.gt_ids.size(), -1);
    std::vector<int> last_match(v.gt_ids.size(), -1);
    std::vector<std::vector<char>> tracked(v.gt_ids.size());

    for (const FrameData& fd : v.per_frame) {
        const int ng = static_cast<int>(fd.gt_boxes.size());
        const int np = static_cast<int>(fd.pred_boxes.size());
        std::vector<int> match_for_gt(ng, -1);
        std::vector<char> pred_used(np, 0);

        std::map<int, int> pred_pos;
        for (int j = 0; j < np; ++j) pred_pos.emplace(fd.pred_idx[j], j);
        for (int i = 0; i < ng; ++i) {
            const int carried = prev_match[fd.gt_idx[i]];
            if (carried < 0) continue;
            const auto it = pred_pos.find(carried);
            if (it == pred_pos.end() || pred_used[it->second]) continue;
            if (fd.iou_mat(i, it->second) >= kClearAlpha) {
                match_for_gt[i] = it->second;
                pred_used[it->second] = 1;
            }
        }

        std::vector<int> rem_g, rem_p;
        std::vector<Box2D> rem_g_boxes, rem_p_boxes;
        for (int i = 0; i < ng; ++i) {
            if (match_for_gt[i] < 0) {
                rem_g.push_back(i);
                rem_g_boxes.push_back(fd.gt_boxes[i]);
            }
        }
        for (int j = 0; j < np; ++j) {
            if (!pred_used[j]) {
                rem_p.push_back(j);
                rem_p_boxes.push_back(fd.pred_boxes[j]);
            }
        }
        const FrameMatch fresh = match_frame(rem_g_boxes, rem_p_boxes, kClearAlpha);
        for (const auto& [ri, rj] : fresh.tp) {
            match_for_gt[rem_g[ri]] = rem_p[rj];
            pred_used[rem_p[rj]] = 1;
        }

        long long matched = 0;
        std::fill(prev_match.begin(), prev_match.end(), -1);
        for (int i = 0; i < ng; ++i) {
            const int gid = fd.gt_idx[i];
            const int j = match_for_gt[i];
            if (j >= 0) {
                ++matched;
                out.iou_sum += fd.iou_mat(i, j);
                const int pid = fd.pred_idx[j];
                if (last_match[gid] >= 0 && last_match[gid] != pid) ++out.idsw;
                last_match[gid] = pid;
                prev_match[gid] = pid;
                tracked[gid].push_back(1);
            } else {
                tracked[gid].push_back(0);
            }
        }
        out.tp += matched;
        out.fp += np - matched;
        out.fn += ng - matched;
    }

    for (const auto& flags : tracked) {
        bool seen = false;
        bool gap = false;
        for (const char f : flags) {
            if (f) {
                if (seen && gap) ++out.frag_count;
                gap = false;
                seen = true;
            } else if (seen) {
                gap = true;
            }
        }
    }
    return out;
}

void require_gt(const SequenceView& v) {
    if (v.gt_total == 0) {
        throw EmptyGroundTruth("no visible ground-truth boxes to evaluate against");
    }
}

double idf1_from_view(const SequenceView& v) {
    require_gt(v);
    if (v.pred_total == 0) return 0.0;

    // overlap(g, p): frames where the identity pair coincides at IoU >= 0.5.
    Eigen::MatrixXd overlap =
        Eigen::MatrixXd::Zero(v.gt_ids.size(), v.pred_ids.size());
    for (const FrameData& fd : v.per_frame) {
        for (std::size_t i = 0; i < fd.gt_idx.size(); ++i) {
            for (std::size_t j = 0; j < fd.pred_idx.size(); ++j) {
                if (fd.iou_mat(i, j) >= kClearAlpha) {
                    overlap(fd.gt_idx[i], fd.pred_idx[j]) += 1.0;
                }
            }
        }
    }

    const Assignment a = solve_assignment(-overlap);
    double idtp = 0.0;
    for (const auto& [g, p] : a.matches) idtp += overlap(g, p);
    return 2.0 * idtp / static_cast<double>(v.gt_total + v.pred_total);
}

// Per-threshold detection matching with association-aware tie-breaking: the
// alignment score of an identity pair (Jaccard overlap of their potential
// matches at this threshold) nudges the per-frame assignment toward pairs
// that co-occur often, without ever outweighing a real IoU difference.
constexpr double kAlignmentTieBreak = 1e-4;

HotaResult hota_from_view(const SequenceView& v, const std::vector<double>& alphas) {
    require_gt(v);
    const Eigen::Index ng = static_cast<Eigen::Index>(v.gt_ids.size());
    const Eigen::Index np = static_cast<Eigen::Index>(v.pred_ids.size());

    HotaResult res;
    for (const double alpha : alphas) {
        Eigen::MatrixXd potential = Eigen::MatrixXd::Zero(ng, np);
        for (const FrameData& fd : v.per_frame) {
            for (std::size_t i = 0; i < fd.gt_idx.size(); ++i) {
                for (std::size_t j = 0; j < fd.pred_idx.size(); ++j) {
                    if (fd.iou_mat(i, j) >= alpha) {
                        potential(fd.gt_idx[i], fd.pred_idx[j]) += 1.0;
                    }
                }
            }
        }
        Eigen::MatrixXd alignment = Eigen::MatrixXd::Zero(ng, np);
        for (Eigen::Index g = 0; g < ng; ++g) {
            for (Eigen::Index p = 0; p < np; ++p) {
                const double denom = static_cast<double>(v.gt_id_count[g]) +
                                     static_cast<double>(v.pred_id_count[p]) - potential(g, p);
                if (denom > 0.0) alignment(g, p) = potential(g, p) / denom;
            }
        }

        Eigen::MatrixXd matched = Eigen::MatrixXd::Zero(ng, np);
        long long tp = 0;
        for (const FrameData& fd : v.per_frame) {
            CostMatrix costs(fd.gt_idx.size(), fd.pred_idx.size());
            for (std::size_t i = 0; i < fd.gt_idx.size(); ++i) {
                for (std::size_t j = 0; j < fd.pred_idx.size(); ++j) {
                    if (fd.iou_mat(i, j) >= alpha) {
                        costs(i, j) = (1.0 - fd.iou_mat(i, j)) -
                                      kAlignmentTieBreak * alignment(fd.gt_idx[i], fd.pred_idx[j]);
                    } else {
                        costs(i, j) = kForbiddenCost;
                    }
                }
            }
            const Assignment a = solve_assignment(costs);
            for (const auto& [i, j] : a.matches) {
                matched(fd.gt_idx[i], fd.pred_idx[j]) += 1.0;
                ++tp;
            }
        }

        double ass_sum = 0.0;
        for (Eigen::Index g = 0; g < ng; ++g) {
            for (Eigen::Index p = 0; p < np; ++p) {
                if (matched(g, p) <= 0.0) continue;
                const double tpa = matched(g, p);
                const double denom = static_cast<double>(v.gt_id_count[g]) +
                                     static_cast<double>(v.pred_id_count[p]) - tpa;
                ass_sum += tpa * (tpa / denom);
            }
        }

        HotaAlphaPoint pt;
        pt.alpha = alpha;
        pt.deta = static_cast<double>(tp) /
                  static_cast<double>(v.gt_total + v.pred_total - tp);
        pt.assa = tp > 0 ? ass_sum / static_cast<double>(tp) : 0.0;
        pt.hota = std::sqrt(pt.deta * pt.assa);
        res.per_alpha.push_back(pt);
    }

    for (const HotaAlphaPoint& pt : res.per_alpha) {
        res.hota += pt.hota;
        res.deta += pt.deta;
        res.assa += pt.assa;
    }
    const double n = static_cast<double>(res.per_alpha.size());
    if (n > 0) {
        res.hota /= n;
        res.deta /= n;
        res.assa /= n;
    }
    return res;
}

}  // namespace

double mota(const std::vector<GtEntry>& gt, const std::vector<ResultEntry>& results) {
    const SequenceView v = build_view(gt, results);
    require_gt(v);
    const ClearOutcome c = clear_pass(v);
    return 1.0 - static_cast<double>(c.fp + c.fn + c.idsw) / static_cast<double>(v.gt_total);
}

double idf1(const std::vector<GtEntry>& gt, const std::vector<ResultEntry>& results) {
    return idf1_from_view(build_view(gt, results));
}

std::vector<double> default_hota_alphas() {
    std::vector<double> alphas;
    for (int k = 1; k <= 19; ++k) alphas.push_back(k / 20.0);
    return alphas;
}

HotaResult hota(const std::vector<GtEntry>& gt, const std::vector<ResultEntry>& results,
                const std::vector<double>& alphas) {
    return hota_from_view(build_view(gt, results), alphas);
}

double loca(const std::vector<GtEntry>& gt, const std::vector<ResultEntry>& results) {
    const ClearOutcome c = clear_pass(build_view(gt, results));
    if (c.tp == 0) {
        throw NoTruePositives("no matched pairs at IoU 0.5; localization accuracy undefined");
    }
    return c.iou_sum / static_cast<double>(c.tp);
}

long long frag(const std::vector<GtEntry>& gt, const std::vector<ResultEntry>& results) {
    return clear_pass(build_view(gt, results)).frag_count;
}

MetricsReport evaluate(const std::vector<GtEntry>& gt,
                       const std::vector<ResultEntry>& results) {
    const SequenceView v = build_view(gt, results);
    require_gt(v);
    const ClearOutcome c = clear_pass(v);
    const HotaResult h = hota_from_view(v, default_hota_alphas());

    MetricsReport r;
    r.mota = 1.0 - static_cast<double>(c.fp + c.fn + c.idsw) / static_cast<double>(v.gt_total);
    r.idf1 = idf1_from_view(v);
    r.hota = h.hota;
    r.deta = h.deta;
    r.assa = h.assa;
    r.loca = c.tp > 0 ? c.iou_sum / static_cast<double>(c.tp) : 0.0;
    r.fp = c.fp;
    r.fn = c.fn;
    r.idsw = c.idsw;
    r.frag = c.frag_count;
    r.gt_count = v.gt_total;
    r.pred_count = v.pred_total;
    r.per_alpha = h.per_alpha;
    for (const HotaAlphaPoint& pt : h.per_alpha) {
        if (std::abs(pt.alpha - 0.5) < 1e-12) r.hota_alpha50 = pt.hota;
    }
    return r;
}

std::string format_report(const MetricsReport& report) {
    char line[128];
    std::string out;
    const auto real = [&](const char* name, double value) {
        std::snprintf(line, sizeof(line), "%-10s %10.6f\n", name, value);
        out += line;
    };
    const auto count = [&](const char* name, long long value) {
        std::snprintf(line, sizeof(line), "%-10s %10lld\n", name, value);
        out += line;
    };
    real("MOTA", report.mota);
    real("IDF1", report.idf1);
    real("HOTA", report.hota);
    real("DetA", report.deta);
    real("AssA", report.assa);
    real("LocA", report.loca);
    real("HOTA@0.50", report.hota_alpha50);
    count("FP", report.fp);
    count("FN", report.fn);
    count("IDSW", report.idsw);
    count("Frag", report.frag);
    count("GT", report.gt_count);
    count("Pred", report.pred_count);
    return out;
}

std::string format_report_keyvalues(const MetricsReport& report) {
    char line[128];
    std::string out;
    const auto real = [&](const char* name, double value) {
        std::snprintf(line, sizeof(line), "%s=%.6f\n", name, value);
        out += line;
    };
    const auto count = [&](const char* name, long long value) {
        std::snprintf(line, sizeof(line), "%s=%lld\n", name, value);
        out += line;
    };
    real("mota", report.mota);
    real("idf1", report.idf1);
    real("hota", report.hota);
    real("deta", report.deta);
    real("assa", report.assa);
    real("loca", report.loca);
    real("hota_alpha50", report.hota_alpha50);
    count("fp", report.fp);
    count("fn", report.fn);
    count("idsw", report.idsw);
    count("frag", report.frag);
    count("gt_count", report.gt_count);
    count("pred_count", report.pred_count);
    for (const HotaAlphaPoint& pt : report.per_alpha) {
        std::snprintf(line, sizeof(line), "hota_alpha_%.2f=%.6f\n", pt.alpha, pt.hota);
        out += line;
    }
    return out;
}

}  // namespace motkit
