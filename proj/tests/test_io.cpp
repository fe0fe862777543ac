#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "motkit/errors.hpp"
#include "motkit/io.hpp"
#include "motkit/sim.hpp"

using namespace motkit;

namespace {

std::filesystem::path scratch_dir() {
    const std::filesystem::path dir = std::filesystem::path(MOTKIT_SCRATCH_DIR) / "io";
    std::filesystem::create_directories(dir);
    return dir;
}

std::string scratch_file(const std::string& name) {
    return (scratch_dir() / name).string();
}

std::string write_text(const std::string& name, const std::string& content) {
    const std::string path = scratch_file(name);
    std::ofstream out(path, std::ios::trunc);
    out << content;
    return path;
}

std::string read_text(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("ground-truth rows parse, default missing fields, and sort") {
    const std::string path = write_text("gt_basic.txt",
                                        "2,3,10,20,30,40,1,1,0.5\n"
                                        "1,2,5,6,7,8,1\n"
                                        "\n"
                                        "1,1,1,2,3,4,1,1,1\n");
    const std::vector<GtEntry> gt = read_gt_file(path);
    REQUIRE(gt.size() == 3);
    CHECK(gt[0].frame == 1);
    CHECK(gt[0].id == 1);
    CHECK(gt[1].frame == 1);
    CHECK(gt[1].id == 2);
    CHECK(gt[1].visibility == 1.0);  // omitted visibility defaults to visible
    CHECK(gt[1].box.w == 7.0);
    CHECK(gt[2].frame == 2);
    CHECK(gt[2].id == 3);
    CHECK(gt[2].visibility == 0.5);
    CHECK(gt[2].box.x == 10.0);

    const std::string out = scratch_file("gt_rt.txt");
    write_gt_file(out, gt);
    const std::vector<GtEntry> again = read_gt_file(out);
    REQUIRE(again.size() == gt.size());
    for (std::size_t i = 0; i < gt.size(); ++i) {
        CHECK(again[i].frame == gt[i].frame);
        CHECK(again[i].id == gt[i].id);
        CHECK(again[i].box.x == gt[i].box.x);
        CHECK(again[i].box.h == gt[i].box.h);
        CHECK(again[i].visibility == gt[i].visibility);
    }
}

TEST_CASE("detection rows keep their within-frame file order") {
    const std::string path = write_text("det_order.txt",
                                        "2,-1,0,0,10,10,0.9\n"
                                        "1,-1,1,1,10,10,0.8,3\n"
                                        "1,-1,2,2,10,10,0.7\n");
    const std::vector<DetectionObservation> dets = read_detections_file(path);
    REQUIRE(dets.size() == 3);
    CHECK(dets[0].frame == 1);
    CHECK(dets[0].confidence == 0.8);
    CHECK(dets[0].class_id == 3);
    CHECK(dets[1].frame == 1);
    CHECK(dets[1].confidence == 0.7);
    CHECK(dets[1].class_id == 1);  // class defaults when absent
    CHECK(dets[2].frame == 2);
    CHECK(!dets[0].embedding.has_value());

    const std::string out = scratch_file("det_rt.txt");
    write_detections_file(out, dets);
    const std::vector<DetectionObservation> again = read_detections_file(out);
    REQUIRE(again.size() == dets.size());
    for (std::size_t i = 0; i < dets.size(); ++i) {
        CHECK(again[i].frame == dets[i].frame);
        CHECK(again[i].box.x == dets[i].box.x);
        CHECK(again[i].confidence == dets[i].confidence);
        CHECK(again[i].class_id == dets[i].class_id);
    }
}

TEST_CASE("result files use fixed MOT rows and rewrite byte-identically") {
    std::vector<FrameResult> results;
    results.push_back({3, {{7, {1.5, 2.25, 30.0, 40.0}, 0.875, 1}}});
    results.push_back({1, {{9, {0.0, 0.5, 12.0, 24.0}, 1.0, 1},
                           {2, {5.0, 5.0, 8.0, 8.0}, 0.625, 1}}});
    const std::string first = scratch_file("res_a.txt");
    write_results_file(first, results);

    CHECK(read_text(first) ==
          "1,2,5.000000,5.000000,8.000000,8.000000,0.625000,-1,-1,-1\n"
          "1,9,0.000000,0.500000,12.000000,24.000000,1.000000,-1,-1,-1\n"
          "3,7,1.500000,2.250000,30.000000,40.000000,0.875000,-1,-1,-1\n");

    const std::vector<ResultEntry> entries = read_result_file(first);
    REQUIRE(entries.size() == 3);
    CHECK(entries[0].frame == 1);
    CHECK(entries[0].id == 2);
    CHECK(entries[2].confidence == 0.875);

    const std::string second = scratch_file("res_b.txt");
    write_results_file(second, group_results(entries));
    CHECK(read_text(second) == read_text(first));
}

TEST_CASE("non-positive identities are rejected where ids are meaningful") {
    const std::string zero_id = write_text("id_zero.txt", "1,0,0,0,10,10,0.9\n");
    const std::string neg_id = write_text("id_neg.txt", "1,-1,0,0,10,10,0.9\n");
    CHECK_THROWS_AS((void)read_gt_file(zero_id), ParseError);
    CHECK_THROWS_AS((void)read_result_file(zero_id), ParseError);
    CHECK_THROWS_AS((void)read_result_file(neg_id), ParseError);
    CHECK_NOTHROW((void)read_detections_file(neg_id));  // detector rows carry no id
}

TEST_CASE("embedding rows are index-aligned, normalized, and dimension-checked") {
    const std::string path = write_text("emb_basic.txt",
                                        "1,0,3,4\n"
                                        "1,1,0,1\n"
                                        "2,0,1,0\n");
    const EmbeddingTable table = read_embeddings_file(path);
    REQUIRE(table.size() == 2);
    REQUIRE(table.at(1).size() == 2);
    CHECK(table.at(1)[0].first == 0);
    CHECK(table.at(1)[0].second(0) == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(table.at(1)[0].second(1) == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(table.at(2)[0].second.norm() == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(
        (void)read_embeddings_file(write_text("emb_dim.txt", "1,0,1,2\n2,1,1,2,3\n")),
        InconsistentDimension);
    CHECK_THROWS_AS((void)read_embeddings_file(write_text("emb_zero.txt", "1,0,0,0\n")),
                    ZeroVector);
    CHECK_THROWS_AS((void)read_embeddings_file(write_text("emb_idx.txt", "1,-1,1,2\n")),
                    ParseError);
    CHECK_THROWS_AS((void)read_embeddings_file(write_text("emb_frame.txt", "0,0,1,2\n")),
                    ParseError);
    CHECK_THROWS_AS((void)read_embeddings_file(write_text("emb_short.txt", "1,0\n")),
                    ParseError);
}

TEST_CASE("the embedding writer skips the low band but keeps detection indices") {
    EmbeddingVector a(2), b(2), c(2);
    a << 0.6, 0.8;
    b << 1.0, 0.0;
    c << 0.0, 1.0;
    std::vector<DetectionObservation> dets(3);
    dets[0] = {1, {0, 0, 10, 10}, 0.9, 1, a};
    dets[1] = {1, {1, 1, 10, 10}, 0.4, 1, b};  // below the threshold
    dets[2] = {1, {2, 2, 10, 10}, 0.95, 1, c};
    const std::string path = scratch_file("emb_band.txt");
    write_embeddings_file(path, dets, 0.6);

    const EmbeddingTable table = read_embeddings_file(path);
    REQUIRE(table.size() == 1);
    REQUIRE(table.at(1).size() == 2);
    CHECK(table.at(1)[0].first == 0);  // index 1 is skipped, not renumbered
    CHECK(table.at(1)[1].first == 2);
    CHECK(table.at(1)[1].second(1) == doctest::Approx(1.0));
}

TEST_CASE("transform tables round trip exactly and reject duplicates") {
    std::map<int, AffineTransform2D> transforms;
    transforms[1] = AffineTransform2D::identity();
    AffineTransform2D T;
    T.m << 0.125, -0.25, 0.5, 1.75;
    T.t << 3.5, -4.75;
    transforms[2] = T;
    const std::string path = scratch_file("tf_rt.txt");
    write_transforms_file(path, transforms);

    const std::map<int, AffineTransform2D> again = read_transforms_file(path);
    REQUIRE(again.size() == 2);
    CHECK((again.at(2).m - T.m).cwiseAbs().maxCoeff() == 0.0);
    CHECK((again.at(2).t - T.t).cwiseAbs().maxCoeff() == 0.0);
    CHECK((again.at(1).m - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() == 0.0);

    CHECK_THROWS_AS((void)read_transforms_file(write_text(
                        "tf_dup.txt", "1,1,0,0,1,0,0\n1,1,0,0,1,5,5\n")),
                    ParseError);
    CHECK_THROWS_AS((void)read_transforms_file(write_text("tf_short.txt", "1,1,0,0,1,0\n")),
                    ParseError);
    CHECK_THROWS_AS((void)read_transforms_file(write_text("tf_frame.txt", "0,1,0,0,1,0,0\n")),
                    ParseError);
}

TEST_CASE("correspondence files group rows by frame in order") {
    std::vector<PointCorrespondenceSet> sets(2);
    sets[0].frame_index = 1;
    sets[0].pairs = {{{0.5, 1.5}, {2.5, 3.5}}, {{4.0, 5.0}, {6.0, 7.0}}};
    sets[1].frame_index = 2;
    sets[1].pairs = {{{8.25, 9.25}, {10.5, 11.5}}};
    const std::string path = scratch_file("cor_rt.txt");
    write_correspondences_file(path, sets);

    const std::vector<PointCorrespondenceSet> again = read_correspondences_file(path);
    REQUIRE(again.size() == 2);
    CHECK(again[0].frame_index == 1);
    REQUIRE(again[0].pairs.size() == 2);
    CHECK(again[0].pairs[1].first.x == 4.0);
    CHECK(again[1].pairs[0].second.y == 11.5);

    // Rows arriving out of frame order still group and sort.
    const std::string shuffled = write_text("cor_shuffled.txt",
                                            "2,1,1,2,2\n"
                                            "1,0,0,1,1\n"
                                            "2,3,3,4,4\n");
    const std::vector<PointCorrespondenceSet> grouped = read_correspondences_file(shuffled);
    REQUIRE(grouped.size() == 2);
    CHECK(grouped[0].frame_index == 1);
    CHECK(grouped[1].pairs.size() == 2);

    CHECK_THROWS_AS((void)read_correspondences_file(write_text("cor_short.txt", "1,0,0,1\n")),
                    ParseError);
}

TEST_CASE("malformed rows point at the offending file location") {
    const std::string bad_field = write_text("bad_field.txt",
                                             "\n"
                                             "1,1,1,1,2,2,1\n"
                                             "bogus,1,1,1,2,2,1\n");
    CHECK_THROWS_WITH_AS((void)read_gt_file(bad_field), doctest::Contains(":3:"), ParseError);
    CHECK_THROWS_WITH_AS((void)read_gt_file(bad_field), doctest::Contains("field 1"), ParseError);

    const std::string bad_count = write_text("bad_count.txt", "1,1,1,1,2\n");
    CHECK_THROWS_WITH_AS((void)read_gt_file(bad_count),
                         doctest::Contains("expected at least 7 fields"), ParseError);

    const std::string bad_real = write_text("bad_real.txt", "1,1,1,oops,2,2,1\n");
    CHECK_THROWS_AS((void)read_detections_file(bad_real), ParseError);

    const std::string bad_frame = write_text("bad_frame.txt", "0,1,1,1,2,2,1\n");
    CHECK_THROWS_AS((void)read_gt_file(bad_frame), ParseError);

    const std::string bad_size = write_text("bad_size.txt", "1,1,0,0,-5,10,1\n");
    CHECK_THROWS_AS((void)read_gt_file(bad_size), NegativeDimensions);
}

TEST_CASE("missing files fail loudly, empty files parse to nothing") {
    const std::string missing = (scratch_dir() / "does_not_exist.txt").string();
    CHECK_THROWS_AS((void)read_gt_file(missing), IoFailure);
    CHECK_THROWS_AS((void)read_transforms_file(missing), IoFailure);

    const std::string empty = write_text("empty.txt", "");
    CHECK(read_gt_file(empty).empty());
    CHECK(read_detections_file(empty).empty());
    CHECK(read_result_file(empty).empty());
    CHECK(read_embeddings_file(empty).empty());
    CHECK(read_transforms_file(empty).empty());
    CHECK(read_correspondences_file(empty).empty());

    const std::string blank = write_text("blank.txt", "\n   \n\t\n");
    CHECK(read_gt_file(blank).empty());
}

TEST_CASE("a simulated bundle writes as five composable files") {
    ScenarioConfig cfg;
    cfg.n_targets = 2;
    cfg.frames = 8;
    cfg.false_positive_rate = 0.3;
    cfg.embedding_dim = 8;
    cfg.seed = 21;
    const ScenarioBundle bundle = generate(cfg);
    const std::string dir = (scratch_dir() / "bundle").string();
    write_bundle(dir, bundle, 0.6);

    const std::filesystem::path base(dir);
    CHECK(read_gt_file((base / "gt.txt").string()).size() == bundle.gt.size());
    CHECK(read_detections_file((base / "det.txt").string()).size() == bundle.detections.size());
    CHECK(read_transforms_file((base / "transforms.txt").string()).size() == 8);
    const auto sets = read_correspondences_file((base / "corresp.txt").string());
    REQUIRE(sets.size() == 8);
    CHECK(sets[0].pairs.size() == 40);

    std::size_t expected_rows = 0;
    for (const DetectionObservation& d : bundle.detections) {
        expected_rows += d.confidence >= 0.6 ? 1 : 0;
    }
    std::size_t actual_rows = 0;
    for (const auto& [frame, rows] : read_embeddings_file((base / "emb.txt").string())) {
        actual_rows += rows.size();
    }
    CHECK(actual_rows == expected_rows);

    // The round-tripped transforms agree with the originals to print precision.
    const auto transforms = read_transforms_file((base / "transforms.txt").string());
    for (const auto& [frame, T] : bundle.transforms) {
        CHECK((transforms.at(frame).m - T.m).cwiseAbs().maxCoeff() <= 5e-10);
        CHECK((transforms.at(frame).t - T.t).cwiseAbs().maxCoeff() <= 5e-10);
    }
}

}  // TEST_SUITE
