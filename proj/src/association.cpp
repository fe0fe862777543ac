#include "motkit/association.hpp"

#include <algorithm>
#include <cmath>

#include "motkit/errors.hpp"

namespace motkit {

namespace {

// Internal stand-in for forbidden pairs. Large enough that the solver uses a
// forbidden pair only when a perfect matching on the padded square matrix
// forces it (those pairs are stripped afterwards), small enough to keep the
// potentials well inside double precision. Finite costs are capped so that no
// sum of real costs can ever outweigh one forbidden entry.
constexpr double kBig = 1e9;
constexpr double kMaxFiniteCost = 1e5;

// Square-matrix Kuhn-Munkres with row/column potentials, O(n^3).
// Returns rowsol: row -> assigned column.
std::vector<int> solve_square(const std::vector<std::vector<double>>& cost) {
    const int n = static_cast<int>(cost.size());
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);

    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, std::numeric_limits<double>::infinity());
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            int j1 = 0;
            double delta = std::numeric_limits<double>::infinity();
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }

    std::vector<int> rowsol(n, -1);
    for (int j = 1; j <= n; ++j) {
        if (p[j]) rowsol[p[j] - 1] = j - 1;
    }
    return rowsol;
}

}  // namespace

Assignment solve_assignment(const CostMatrix& costs) {
    const int rows = static_cast<int>(costs.rows());
    const int cols = static_cast<int>(costs.cols());

    Assignment out;
    if (rows == 0 || cols == 0) {
        for (int i = 0; i < rows; ++i) out.unmatched_rows.push_back(i);
        for (int j = 0; j < cols; ++j) out.unmatched_cols.push_back(j);
        return out;
    }

    // Pad to square; dummy entries cost 0 so they absorb the surplus side
    // without biasing which real pairs win.
    const int n = std::max(rows, cols);
    std::vector<std::vector<double>> padded(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) {
            const double c = costs(i, j);
            if (c == kForbiddenCost) {
                padded[i][j] = kBig;
            } else {
                if (std::isnan(c) || std::abs(c) > kMaxFiniteCost) {
                    throw InvalidMeasurement(
                        "cost entries must be +inf (forbidden) or finite with |c| <= 1e5");
                }
                padded[i][j] = c;
            }
        }
    }

    const std::vector<int> rowsol = solve_square(padded);

    std::vector<char> col_matched(cols, 0);
    for (int i = 0; i < rows; ++i) {
        const int j = rowsol[i];
        if (j < cols && costs(i, j) != kForbiddenCost) {
            out.matches.emplace_back(i, j);
            col_matched[j] = 1;
        } else {
            out.unmatched_rows.push_back(i);
        }
    }
    for (int j = 0; j < cols; ++j) {
        if (!col_matched[j]) out.unmatched_cols.push_back(j);
    }
    std::sort(out.matches.begin(), out.matches.end());
    return out;
}

Assignment gate_matches(Assignment assignment, const CostMatrix& costs, double threshold) {
    Assignment out;
    out.unmatched_rows = std::move(assignment.unmatched_rows);
    out.unmatched_cols = std::move(assignment.unmatched_cols);
    for (const auto& [r, c] : assignment.matches) {
        if (costs(r, c) > threshold) {
            out.unmatched_rows.push_back(r);
            out.unmatched_cols.push_back(c);
        } else {
            out.matches.emplace_back(r, c);
        }
    }
    std::sort(out.unmatched_rows.begin(), out.unmatched_rows.end());
    std::sort(out.unmatched_cols.begin(), out.unmatched_cols.end());
    return out;
}

StageResult first_stage(const CostMatrix& fused, const CostMatrix& raw_cosine,
                        const AssociationConfig& cfg) {
    if (fused.rows() != raw_cosine.rows() || fused.cols() != raw_cosine.cols()) {
        throw ShapeMismatch("fused and raw-cosine matrices disagree in shape");
    }

    CostMatrix gated = fused;
    for (Eigen::Index i = 0; i < gated.rows(); ++i) {
        for (Eigen::Index j = 0; j < gated.cols(); ++j) {
            if (raw_cosine(i, j) > cfg.appearance_sim_threshold) {
                gated(i, j) = kForbiddenCost;
            }
        }
    }

    const Assignment a = gate_matches(solve_assignment(gated), gated, cfg.match_cost_threshold);
    StageResult out;
    out.matches = a.matches;
    out.leftover_tracks = a.unmatched_rows;
    out.leftover_detections = a.unmatched_cols;
    return out;
}

StageResult second_stage(const std::vector<Box2D>& track_boxes,
                         const std::vector<Box2D>& detection_boxes,
                         const AssociationConfig& cfg) {
    CostMatrix costs(track_boxes.size(), detection_boxes.size());
    for (std::size_t i = 0; i < track_boxes.size(); ++i) {
        for (std::size_t j = 0; j < detection_boxes.size(); ++j) {
            const double overlap = iou(track_boxes[i], detection_boxes[j]);
            costs(i, j) = overlap >= cfg.second_stage_iou_threshold ? 1.0 - overlap
                                                                    : kForbiddenCost;
        }
    }

    const Assignment a = solve_assignment(costs);
    StageResult out;
    out.matches = a.matches;
    out.leftover_tracks = a.unmatched_rows;
    out.leftover_detections = a.unmatched_cols;
    return out;
}

}  // namespace motkit
