#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "motkit/association.hpp"
#include "motkit/errors.hpp"
#include "motkit/rng.hpp"

using namespace motkit;

namespace {

struct BruteResult {
    int cardinality = 0;
    double cost = 0.0;
};

// Exhaustive reference: maximize the number of allowed matches, then minimize
// their summed cost. Recursion over rows with a column bitmask (cols <= 20).
void brute_recurse(const CostMatrix& c, int row, unsigned used, int matched, double cost,
                   BruteResult& best) {
    const int rows = static_cast<int>(c.rows());
    const int cols = static_cast<int>(c.cols());
    if (row == rows) {
        if (matched > best.cardinality ||
            (matched == best.cardinality && cost < best.cost)) {
            best.cardinality = matched;
            best.cost = cost;
        }
        return;
    }
    brute_recurse(c, row + 1, used, matched, cost, best);  // leave the row out
    for (int j = 0; j < cols; ++j) {
        if (used & (1u << j)) continue;
        if (c(row, j) == kForbiddenCost) continue;
        brute_recurse(c, row + 1, used | (1u << j), matched + 1, cost + c(row, j), best);
    }
}

BruteResult brute_force(const CostMatrix& c) {
    BruteResult best;
    best.cardinality = -1;
    best.cost = std::numeric_limits<double>::infinity();
    brute_recurse(c, 0, 0u, 0, 0.0, best);
    return best;
}

BruteResult summarize(const CostMatrix& c, const Assignment& a) {
    BruteResult out;
    out.cardinality = static_cast<int>(a.matches.size());
    for (const auto& [i, j] : a.matches) out.cost += c(i, j);
    return out;
}

}  // namespace

TEST_SUITE("association") {

TEST_CASE("two by two hand case") {
    CostMatrix c(2, 2);
    c << 1.0, 2.0, 2.0, 1.0;
    const Assignment a = solve_assignment(c);
    REQUIRE(a.matches.size() == 2);
    CHECK(a.matches[0] == std::pair<int, int>{0, 0});
    CHECK(a.matches[1] == std::pair<int, int>{1, 1});
    CHECK(a.unmatched_rows.empty());
    CHECK(a.unmatched_cols.empty());
}

TEST_CASE("off-diagonal optimum is found") {
    CostMatrix c(2, 2);
    c << 10.0, 1.0, 1.0, 10.0;
    const Assignment a = solve_assignment(c);
    CHECK(summarize(c, a).cost == doctest::Approx(2.0));
}

TEST_CASE("rectangular matrices leave the excess side unmatched") {
    CostMatrix wide(2, 5);
    wide << 5, 4, 3, 2, 1,  //
        1, 2, 3, 4, 5;
    const Assignment a = solve_assignment(wide);
    CHECK(a.matches.size() == 2);
    CHECK(a.unmatched_cols.size() == 3);
    CHECK(summarize(wide, a).cost == doctest::Approx(2.0));

    CostMatrix tall = wide.transpose();
    const Assignment b = solve_assignment(tall);
    CHECK(b.matches.size() == 2);
    CHECK(b.unmatched_rows.size() == 3);
    CHECK(summarize(tall, b).cost == doctest::Approx(2.0));
}

TEST_CASE("forbidden entries are never matched") {
    CostMatrix c(2, 2);
    c << kForbiddenCost, kForbiddenCost, kForbiddenCost, 3.0;
    const Assignment a = solve_assignment(c);
    REQUIRE(a.matches.size() == 1);
    CHECK(a.matches[0] == std::pair<int, int>{1, 1});
    CHECK(a.unmatched_rows == std::vector<int>{0});
    CHECK(a.unmatched_cols == std::vector<int>{0});

    CostMatrix blocked = CostMatrix::Constant(3, 3, kForbiddenCost);
    const Assignment none = solve_assignment(blocked);
    CHECK(none.matches.empty());
    CHECK(none.unmatched_rows.size() == 3);
    CHECK(none.unmatched_cols.size() == 3);
}

TEST_CASE("forbidden entries never sacrifice achievable matches") {
    // Greedily taking the cheap diagonal cell would leave the second row
    // facing only the forbidden cell; the solver must pick the dearer
    // off-diagonal pairing to keep cardinality 2.
    CostMatrix c(2, 2);
    c << 0.1, 0.2, 0.3, kForbiddenCost;
    const Assignment a = solve_assignment(c);
    REQUIRE(a.matches.size() == 2);
    CHECK(summarize(c, a).cost == doctest::Approx(0.5));
}

TEST_CASE("negative costs are legal and optimized") {
    CostMatrix c(2, 2);
    c << -5.0, -1.0, -1.0, -5.0;
    const Assignment a = solve_assignment(c);
    CHECK(summarize(c, a).cost == doctest::Approx(-10.0));
}

TEST_CASE("invalid cost entries are rejected") {
    CostMatrix c(1, 1);
    c << std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(solve_assignment(c), InvalidMeasurement);
    c << 1e6;
    CHECK_THROWS_AS(solve_assignment(c), InvalidMeasurement);
    c << -1e6;
    CHECK_THROWS_AS(solve_assignment(c), InvalidMeasurement);
    c << 1e5;  // boundary magnitude is allowed
    CHECK(solve_assignment(c).matches.size() == 1);
}

TEST_CASE("empty problems are well defined") {
    const Assignment a = solve_assignment(CostMatrix(0, 0));
    CHECK(a.matches.empty());
    const Assignment b = solve_assignment(CostMatrix(0, 3));
    CHECK(b.unmatched_cols.size() == 3);
    const Assignment c = solve_assignment(CostMatrix(2, 0));
    CHECK(c.unmatched_rows.size() == 2);
}

TEST_CASE("matches brute force on a thousand random problems") {
    Rng rng(41);
    for (int trial = 0; trial < 1000; ++trial) {
        const int rows = rng.uniform_int(1, 7);
        const int cols = rng.uniform_int(1, 7);
        CostMatrix c(rows, cols);
        for (int i = 0; i < rows; ++i) {
            for (int j = 0; j < cols; ++j) {
                c(i, j) = rng.uniform() < 0.15 ? kForbiddenCost : rng.uniform(-10.0, 10.0);
            }
        }
        const BruteResult want = brute_force(c);
        const BruteResult got = summarize(c, solve_assignment(c));
        CHECK(got.cardinality == want.cardinality);
        CHECK(got.cost == doctest::Approx(want.cost).epsilon(1e-9));
    }
}

TEST_CASE("gating drops matches above the threshold and keeps the boundary") {
    CostMatrix c(2, 2);
    c << 0.2, 1.0, 1.0, 0.9;
    Assignment a = solve_assignment(c);
    const Assignment g = gate_matches(a, c, 0.9);
    REQUIRE(g.matches.size() == 2);  // 0.9 is kept

    const Assignment tight = gate_matches(a, c, 0.5);
    REQUIRE(tight.matches.size() == 1);
    CHECK(tight.matches[0] == std::pair<int, int>{0, 0});
    CHECK(tight.unmatched_rows == std::vector<int>{1});
    CHECK(tight.unmatched_cols == std::vector<int>{1});
}

TEST_CASE("first stage vetoes weak appearance and gates fused cost") {
    CostMatrix fused(1, 2), raw(1, 2);
    fused << 0.05, 0.02;
    raw << 0.01, 0.9;  // second detection looks like a different object

    AssociationConfig cfg;
    const StageResult r = first_stage(fused, raw, cfg);
    REQUIRE(r.matches.size() == 1);
    CHECK(r.matches[0] == std::pair<int, int>{0, 0});
    CHECK(r.leftover_detections == std::vector<int>{1});

    CostMatrix bad(2, 2);
    bad.setZero();
    CHECK_THROWS_AS(first_stage(fused, bad, cfg), ShapeMismatch);

    // A fused cost above the match threshold is dropped after solving.
    CostMatrix pricey(1, 1), ok(1, 1);
    pricey << 0.9;
    ok << 0.0;
    const StageResult dropped = first_stage(pricey, ok, cfg);  // 0.9 > 0.85
    CHECK(dropped.matches.empty());
    CHECK(dropped.leftover_tracks == std::vector<int>{0});
    CHECK(dropped.leftover_detections == std::vector<int>{0});
}

TEST_CASE("second stage matches on overlap alone with a floor") {
    const std::vector<Box2D> tracks = {Box2D{0, 0, 10, 10}, Box2D{200, 200, 10, 10}};
    const std::vector<Box2D> dets = {Box2D{1, 0, 10, 10}, Box2D{500, 500, 10, 10}};
    AssociationConfig cfg;  // floor 0.5
    const StageResult r = second_stage(tracks, dets, cfg);
    REQUIRE(r.matches.size() == 1);
    CHECK(r.matches[0] == std::pair<int, int>{0, 0});
    CHECK(r.leftover_tracks == std::vector<int>{1});
    CHECK(r.leftover_detections == std::vector<int>{1});
}

}  // TEST_SUITE
