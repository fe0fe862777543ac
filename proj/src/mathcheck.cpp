#include "motkit/mathcheck.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "motkit/errors.hpp"
#include "motkit/numerics.hpp"
#include "motkit/rng.hpp"

namespace motkit {

namespace {

Eigen::MatrixXd random_grid(Rng& rng, int rows, int cols, double lo, double hi) {
    Eigen::MatrixXd m(rows, cols);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) m(r, c) = rng.uniform(lo, hi);
    }
    return m;
}

Eigen::VectorXd random_unit(Rng& rng, int dim) {
    Eigen::VectorXd v(dim);
    double norm = 0.0;
    do {
        for (int i = 0; i < dim; ++i) v(i) = rng.normal();
        norm = v.norm();
    } while (norm < 1e-6);
    return v / norm;
}

// Unit vector with a prescribed dot product against `axis`.
Eigen::VectorXd unit_with_dot(Rng& rng, const Eigen::VectorXd& axis, double dot) {
    Eigen::VectorXd ortho;
    double norm = 0.0;
    do {
        ortho = random_unit(rng, static_cast<int>(axis.size()));
        ortho -= ortho.dot(axis) * axis;
        norm = ortho.norm();
    } while (norm < 1e-6);
    ortho /= norm;
    return dot * axis + std::sqrt(std::max(0.0, 1.0 - dot * dot)) * ortho;
}

}  // namespace

MathCheckResult mathcheck_revcol() {
    MathCheckResult result;
    result.name = "revcol";
    result.tolerance = 1e-12;
    result.cases = 100;

    Rng rng(31);
    for (int i = 0; i < result.cases; ++i) {
        RevColOps ops;
        if (i == 0) {
            ops.alpha = 0.1;
        } else if (i == result.cases - 1) {
            ops.alpha = 10.0;
        } else {
            ops.alpha = rng.uniform(0.1, 10.0);
        }
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) ops.phi_kernel(r, c) = rng.uniform(-1.0, 1.0);
        }

        ColumnFeature prev;
        prev.grid = random_grid(rng, 16, 16, -2.0, 2.0);
        prev.level = 2;
        prev.column = 1 + (i % 4);

        ColumnFeature below;
        below.grid = random_grid(rng, 32, 32, -2.0, 2.0);
        below.level = 1;
        below.column = prev.column + 1;

        // Alternate between an interior level and the top-boundary case.
        ColumnFeature above = ColumnFeature::boundary();
        if (i % 2 == 0) {
            above.grid = random_grid(rng, 8, 8, -2.0, 2.0);
            above.level = 3;
            above.column = prev.column;
        }

        const ColumnFeature out = revcol_forward(prev, below, above, ops);
        const ColumnFeature back = revcol_inverse(out, below, above, ops);
        const double err = (back.grid - prev.grid).cwiseAbs().maxCoeff();
        result.max_error = std::max(result.max_error, err);
    }
    result.passed = result.max_error <= result.tolerance;
    return result;
}

MathCheckResult mathcheck_adaloss() {
    MathCheckResult result;
    result.name = "adaloss";
    result.tolerance = 1e-4;
    result.cases = 1000;

    Rng rng(67);
    constexpr int kDim = 6;
    constexpr double kStep = 1e-5;
    constexpr int kInactiveCases = 200;

    const auto sample = [&](bool want_active) {
        for (int attempt = 0; attempt < 100000; ++attempt) {
            TripletSample s;
            s.anchor = random_unit(rng, kDim);
            const double u = rng.uniform(-0.95, 0.95);
            const double w = rng.uniform(-0.95, 0.95);
            s.positive = unit_with_dot(rng, s.anchor, u);
            s.negative = unit_with_dot(rng, s.anchor, w);
            s.theta = rng.uniform(0.05, 0.6);
            s.alpha_margin = rng.uniform(0.0, 0.4);

            const double raw_theta1 = std::acos(u) + s.theta;
            if (raw_theta1 >= M_PI - 1e-3) continue;  // keep the clamp inactive
            const double hinge = (1.0 - std::cos(raw_theta1)) - (1.0 - w) + s.alpha_margin;
            if (want_active ? hinge < 1e-3 : hinge > -1e-3) continue;
            return s;
        }
        throw NumericalFailure("triplet sampling failed to find a qualifying case");
    };

    const auto fd_gradient = [&](TripletSample s) {
        AdaLossGradient g;
        g.d_anchor = Eigen::VectorXd::Zero(kDim);
        g.d_positive = Eigen::VectorXd::Zero(kDim);
        g.d_negative = Eigen::VectorXd::Zero(kDim);
        Eigen::VectorXd* vecs[3] = {&s.anchor, &s.positive, &s.negative};
        Eigen::VectorXd* grads[3] = {&g.d_anchor, &g.d_positive, &g.d_negative};
        for (int v = 0; v < 3; ++v) {
            for (int i = 0; i < kDim; ++i) {
                const double saved = (*vecs[v])(i);
                (*vecs[v])(i) = saved + kStep;
                const double up = ada_loss_free(s);
                (*vecs[v])(i) = saved - kStep;
                const double down = ada_loss_free(s);
                (*vecs[v])(i) = saved;
                (*grads[v])(i) = (up - down) / (2.0 * kStep);
            }
        }
        return g;
    };

    for (int i = 0; i < result.cases; ++i) {
        const TripletSample s = sample(true);
        const AdaLossGradient analytic = ada_loss_gradient(s);
        const AdaLossGradient fd = fd_gradient(s);

        Eigen::VectorXd diff(3 * kDim);
        Eigen::VectorXd ref(3 * kDim);
        diff << (analytic.d_anchor - fd.d_anchor), (analytic.d_positive - fd.d_positive),
            (analytic.d_negative - fd.d_negative);
        ref << analytic.d_anchor, analytic.d_positive, analytic.d_negative;
        const double rel = diff.norm() / std::max(ref.norm(), 1e-12);
        result.max_error = std::max(result.max_error, rel);
    }

    // Inactive hinge: analytic gradient must be identically zero, not merely
    // small, so fold any nonzero component straight into the error.
    for (int i = 0; i < kInactiveCases; ++i) {
        const TripletSample s = sample(false);
        const AdaLossGradient g = ada_loss_gradient(s);
        const double worst = std::max({g.d_anchor.cwiseAbs().maxCoeff(),
                                       g.d_positive.cwiseAbs().maxCoeff(),
                                       g.d_negative.cwiseAbs().maxCoeff(), std::abs(g.loss)});
        if (worst != 0.0) result.max_error = std::max(result.max_error, 1.0);
    }

    result.passed = result.max_error <= result.tolerance;
    return result;
}

MathCheckResult mathcheck_attention() {
    MathCheckResult result;
    result.name = "attention";
    result.tolerance = 1e-12;
    result.cases = 0;

    AttentionBiasTable table = AttentionBiasTable::zeros(3, 5, 4);
    for (int h = 0; h < 3; ++h) {
        for (int dx = 0; dx < 5; ++dx) {
            for (int dy = 0; dy < 4; ++dy) table.at(h, dx, dy) = 0.01 * (h * 100 + dx * 10 + dy);
        }
    }

    Eigen::VectorXd q(4), k(4);
    q << 0.5, -1.25, 2.0, 0.75;
    k << 1.5, 0.25, -0.5, 2.0;
    const double content = 0.5 * 1.5 + (-1.25) * 0.25 + 2.0 * (-0.5) + 0.75 * 2.0;

    const auto record = [&](double got, double want) {
        result.max_error = std::max(result.max_error, std::abs(got - want));
        ++result.cases;
    };

    // Manual lookup: displacement (2, -3) on head 1 reads bias[1, 2, 3].
    record(attention_score(q, k, {10, 7}, {8, 10}, 1, table), content + 0.01 * (100 + 20 + 3));

    // Zero displacement uses bias[h, 0, 0].
    record(attention_score(q, k, {4, 4}, {4, 4}, 2, table), content + 0.01 * 200);

    // Translation invariance: shifting both positions leaves the score alone.
    const double base = attention_score(q, k, {3, 2}, {1, 5}, 0, table);
    record(attention_score(q, k, {3 + 7, 2 - 3}, {1 + 7, 5 - 3}, 0, table), base);

    // Sign symmetry: only |dx|, |dy| matter.
    record(attention_score(q, k, {0, 0}, {4, 3}, 0, table),
           attention_score(q, k, {4, 3}, {0, 0}, 0, table));
    record(attention_score(q, k, {0, 3}, {4, 0}, 0, table),
           attention_score(q, k, {4, 0}, {0, 3}, 0, table));

    const auto expect_throw = [&](const auto& fn) {
        bool threw = false;
        try {
            fn();
        } catch (const Error&) {
            threw = true;
        }
        if (!threw) result.max_error = std::max(result.max_error, 1.0);
        ++result.cases;
    };

    expect_throw([&] { attention_score(q, k, {0, 0}, {5, 0}, 0, table); });  // |dx| = 5
    expect_throw([&] { attention_score(q, k, {0, 0}, {0, 4}, 0, table); });  // |dy| = 4
    expect_throw([&] { attention_score(q, k, {0, 0}, {1, 1}, 3, table); });  // head = 3
    expect_throw([&] {
        Eigen::VectorXd short_k(3);
        short_k << 1.0, 2.0, 3.0;
        attention_score(q, short_k, {0, 0}, {1, 1}, 0, table);
    });

    result.passed = result.max_error <= result.tolerance;
    return result;
}

std::vector<MathCheckResult> run_mathcheck(const std::string& suite) {
    std::vector<MathCheckResult> results;
    const bool all = suite == "all";
    if (all || suite == "revcol") results.push_back(mathcheck_revcol());
    if (all || suite == "adaloss") results.push_back(mathcheck_adaloss());
    if (all || suite == "attention") results.push_back(mathcheck_attention());
    if (results.empty()) {
        throw ConfigInvalid("unknown mathcheck suite: '" + suite +
                            "' (expected revcol, adaloss, attention, or all)");
    }
    return results;
}

std::string format_mathcheck(const std::vector<MathCheckResult>& results) {
    std::string out;
    char line[160];
    for (const MathCheckResult& r : results) {
        std::snprintf(line, sizeof(line), "%-10s %-4s max_error=%.3e tolerance=%.0e cases=%d\n",
                      r.name.c_str(), r.passed ? "ok" : "FAIL", r.max_error, r.tolerance,
                      r.cases);
        out += line;
    }
    return out;
}

}  // namespace motkit
