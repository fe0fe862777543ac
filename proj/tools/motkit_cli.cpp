#include <algorithm>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "motkit/cmc.hpp"
#include "motkit/config.hpp"
#include "motkit/errors.hpp"
#include "motkit/io.hpp"
#include "motkit/mathcheck.hpp"
#include "motkit/metrics.hpp"
#include "motkit/sim.hpp"
#include "motkit/tracker.hpp"

namespace {

// A --cmc argument may carry either precomputed per-frame transforms
// (7 fields) or raw point correspondences (5 fields); sniff the first
// non-blank row to decide.
motkit::TransformSource load_transform_source(const std::string& path,
                                              const motkit::CmcConfig& cmc) {
    std::ifstream in(path);
    if (!in) throw motkit::IoFailure("cannot open motion input: " + path);
    std::string line;
    long commas = -1;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        commas = std::count(line.begin(), line.end(), ',');
        break;
    }
    if (commas == 6) return motkit::TransformSource::from_file(path);
    if (commas == 4) {
        return motkit::TransformSource::from_correspondences(
            motkit::read_correspondences_file(path), cmc);
    }
    throw motkit::ParseError(path +
                             ": expected transform rows (7 fields) or "
                             "correspondence rows (5 fields)");
}

int cmd_track(const std::string& det_path, const std::string& emb_path,
              const std::string& cmc_path, bool cmc_identity, const std::string& config_path,
              const std::string& out_path, bool interpolate, bool print_config) {
    motkit::RunConfig cfg;
    if (!config_path.empty()) {
        cfg = motkit::load_run_config(config_path);
    } else {
        motkit::validate_config(cfg);
    }
    if (print_config) std::cout << motkit::format_run_config(cfg);

    const std::vector<motkit::DetectionObservation> detections =
        motkit::read_detections_file(det_path);
    motkit::EmbeddingTable embeddings;
    if (!emb_path.empty()) embeddings = motkit::read_embeddings_file(emb_path);

    motkit::TransformSource transforms = motkit::TransformSource::identity();
    if (!cmc_path.empty() && !cmc_identity) {
        transforms = load_transform_source(cmc_path, cfg.cmc);
    }

    std::vector<motkit::FrameResult> frames =
        motkit::run_sequence(detections, embeddings, transforms, cfg.tracker);
    if (interpolate) frames = motkit::interpolate_tracklets(frames, cfg.interpolation_max_gap);
    motkit::write_results_file(out_path, frames);
    return 0;
}

int cmd_eval(const std::string& gt_path, const std::string& res_path,
             const std::string& report_path) {
    const std::vector<motkit::GtEntry> gt = motkit::read_gt_file(gt_path);
    const std::vector<motkit::ResultEntry> res = motkit::read_result_file(res_path);
    const motkit::MetricsReport report = motkit::evaluate(gt, res);
    std::cout << motkit::format_report(report);
    if (!report_path.empty()) {
        std::ofstream out(report_path);
        out << motkit::format_report_keyvalues(report);
        out.close();
        if (!out) throw motkit::IoFailure("failed writing report: " + report_path);
    }
    return 0;
}

int cmd_simulate(const std::string& preset_name, std::uint64_t seed, const std::string& out_dir) {
    motkit::ScenarioConfig scenario = motkit::preset(preset_name);
    scenario.seed = seed;
    const motkit::ScenarioBundle bundle = motkit::generate(scenario);
    motkit::write_bundle(out_dir, bundle, motkit::AssociationConfig{}.detection_threshold);
    return 0;
}

int cmd_mathcheck(const std::string& suite) {
    const std::vector<motkit::MathCheckResult> results = motkit::run_mathcheck(suite);
    std::cout << motkit::format_mathcheck(results);
    const bool all_passed = std::all_of(results.begin(), results.end(),
                                        [](const motkit::MathCheckResult& r) { return r.passed; });
    return all_passed ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"motkit: detection-driven multi-object tracker for moving-camera footage"};
    app.require_subcommand(1);

    std::string det_path, emb_path, cmc_path, config_path, out_path;
    bool cmc_identity = false, interpolate = false, print_config = false;
    CLI::App* track = app.add_subcommand("track", "Run the tracker over a detection file");
    track->add_option("--det", det_path, "Detection file (MOT rows)")->required();
    track->add_option("--emb", emb_path, "Embedding file (frame,det_index,v0,...)")->required();
    CLI::Option* cmc_opt =
        track->add_option("--cmc", cmc_path, "Per-frame transforms or correspondences file");
    track->add_flag("--cmc-identity", cmc_identity, "Disable motion compensation")
        ->excludes(cmc_opt);
    track->add_option("--config", config_path, "key=value configuration file");
    track->add_option("--out", out_path, "Output result file")->required();
    track->add_flag("--interpolate", interpolate, "Fill short per-track gaps offline");
    track->add_flag("--print-config", print_config, "Dump the effective configuration");

    std::string gt_path, res_path, report_path;
    CLI::App* eval = app.add_subcommand("eval", "Score a result file against ground truth");
    eval->add_option("--gt", gt_path, "Ground-truth file")->required();
    eval->add_option("--res", res_path, "Result file")->required();
    eval->add_option("--report", report_path, "Also write a key=value report file");

    std::string preset_name, sim_out;
    std::uint64_t seed = 0;
    CLI::App* simulate = app.add_subcommand("simulate", "Generate a synthetic scenario bundle");
    simulate->add_option("--preset", preset_name, "calm, jitter, occlusion or crowded")
        ->required();
    simulate->add_option("--seed", seed, "Random seed")->required();
    simulate->add_option("--out", sim_out, "Output directory")->required();

    std::string suite = "all";
    CLI::App* mathcheck = app.add_subcommand("mathcheck", "Run numerical self-checks");
    mathcheck->add_option("--suite", suite, "revcol, adaloss, attention or all");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;  // usage problems are validation errors
    }

    try {
        if (track->parsed()) {
            return cmd_track(det_path, emb_path, cmc_path, cmc_identity, config_path, out_path,
                             interpolate, print_config);
        }
        if (eval->parsed()) return cmd_eval(gt_path, res_path, report_path);
        if (simulate->parsed()) return cmd_simulate(preset_name, seed, sim_out);
        if (mathcheck->parsed()) return cmd_mathcheck(suite);
    } catch (const motkit::ConfigInvalid& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const motkit::UnknownPreset& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const motkit::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
