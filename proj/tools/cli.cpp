#include "cli.hpp"

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "dttm/bench.hpp"
#include "dttm/error.hpp"
#include "dttm/io.hpp"
#include "dttm/metrics.hpp"
#include "dttm/simulator.hpp"
#include "dttm/tan_fusion.hpp"
#include "dttm/tracker.hpp"

namespace dttm::cli {

namespace {

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::filesystem::path sibling(const std::string& path, const std::string& suffix) { return path + suffix; }

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Online tracking-by-detection with time-evolving template banks", "dttm"};
    app.require_subcommand(1);

    auto* simulate = app.add_subcommand("simulate", "Generate a synthetic scenario");
    std::string sim_preset, sim_config, out_dets, out_gt, out_first;
    std::optional<std::uint64_t> sim_seed;
    auto* preset_opt = simulate->add_option("--preset", sim_preset, "Preset name (crossing, deformation, occlusion, dense)");
    auto* config_opt = simulate->add_option("--config", sim_config, "Scenario config JSON")->check(CLI::ExistingFile);
    preset_opt->excludes(config_opt);
    simulate->add_option("--out-dets", out_dets, "Detection stream output (JSONL)")->required();
    simulate->add_option("--out-gt", out_gt, "Ground-truth output (JSON)")->required();
    simulate->add_option("--out-first-frame", out_first,
                         "First-frame annotation output (default: <out-dets>.first_frame.jsonl)");
    simulate->add_option("--seed", sim_seed, "Override the scenario seed");

    auto* track = app.add_subcommand("track", "Track a detection stream");
    std::string dets_path, first_path, track_config, track_out, track_mode;
    track->add_option("--dets", dets_path, "Detection stream (JSONL)")->required()->check(CLI::ExistingFile);
    track->add_option("--first-frame-gt", first_path, "First-frame annotation (one-line JSONL)")
        ->required()
        ->check(CLI::ExistingFile);
    track->add_option("--config", track_config, "Run config JSON")->check(CLI::ExistingFile);
    track->add_option("--mode", track_mode, "Override the config mode (dttm, moving_average, iou_only)");
    track->add_option("--out", track_out, "Trajectory output (JSON)")->required();

    auto* eval = app.add_subcommand("eval", "Score trajectories against ground truth");
    std::string trajs_path, gt_path, report_path, csv_path, eval_config;
    eval->add_option("--trajs", trajs_path, "Trajectories (JSON)")->required()->check(CLI::ExistingFile);
    eval->add_option("--gt", gt_path, "Ground truth (JSON)")->required()->check(CLI::ExistingFile);
    eval->add_option("--out-report", report_path, "JSON summary output")->required();
    eval->add_option("--out-csv", csv_path, "Per object-frame CSV (default: <out-report>.csv)");
    eval->add_option("--config", eval_config, "Run config JSON (tolerances)")->check(CLI::ExistingFile);

    auto* tan_check = app.add_subcommand("tan-check", "Run the temporal fusion invariant and gradient suite");
    std::uint64_t tan_seed = 7;
    tan_check->add_option("--seed", tan_seed, "Fixture seed");

    auto* bench = app.add_subcommand("bench", "Time association on a preset scenario");
    std::string bench_preset = "dense", bench_mode;
    std::size_t bench_frames = 1000;
    double bench_limit = 0.0;
    bench->add_option("--preset", bench_preset, "Preset name");
    bench->add_option("--frames", bench_frames, "Number of tracked frames");
    bench->add_option("--mode", bench_mode, "Tracking mode");
    bench->add_option("--max-ms-per-frame", bench_limit, "Exit 1 when slower than this");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    if (!reversed.empty()) reversed.pop_back();  // program name
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return 2;
    }

    try {
        if (*simulate) {
            if (sim_preset.empty() == sim_config.empty()) {
                err << "error: simulate needs exactly one of --preset or --config\n";
                return 2;
            }
            ScenarioConfig sc = sim_config.empty() ? preset(sim_preset) : io::parse_scenario_config(sim_config);
            if (sim_seed) sc.seed = *sim_seed;
            const Scenario s = generate(sc);
            io::write_detection_stream(out_dets, s.stream);
            io::write_file(out_gt, io::ground_truth_json(s.truth));
            const auto first = out_first.empty() ? sibling(out_dets, ".first_frame.jsonl") : std::filesystem::path(out_first);
            io::write_detection_stream(first, {FrameDetections{0, s.first_frame}});
            out << "wrote " << s.stream.size() << " frames, " << s.truth.num_objects() << " objects\n";
            return 0;
        }
        if (*track) {
            RunConfig config = track_config.empty() ? RunConfig{} : io::parse_run_config(track_config);
            if (!track_mode.empty()) config.mode = parse_tracking_mode(track_mode);
            int first_frame = 0;
            const auto gt = io::parse_first_frame(first_path, &first_frame);
            const auto stream = io::parse_detection_stream(std::filesystem::path(dets_path));
            Tracker tracker = Tracker::init_from_first_frame(gt, config, first_frame);
            const RunResult result = run(tracker, stream);
            io::TrackOutput output{result.trajectories, {}};
            for (const auto& t : result.targets) output.banks.push_back(t.bank);
            io::write_trajectories(track_out, output);
            std::size_t matched = 0;
            for (const auto& f : result.frames) matched += f.matches.size();
            out << "tracked " << result.targets.size() << " targets over " << result.frames.size() << " frames, "
                << matched << " matches\n";
            return 0;
        }
        if (*eval) {
            const RunConfig config = eval_config.empty() ? RunConfig{} : io::parse_run_config(eval_config);
            const auto trajs = io::parse_trajectories(trajs_path);
            const auto gt = io::parse_ground_truth(gt_path);
            const EvalReport report = evaluate(trajs.trajectories, gt,
                                               EvalConfig{config.boundary_tolerance, config.id_switch_iou_floor, 0.5});
            io::write_file(report_path, io::report_json(report));
            io::write_file(csv_path.empty() ? sibling(report_path, ".csv") : std::filesystem::path(csv_path),
                           io::report_csv(report));
            out << "J&F " << fixed(report.jf_mean, 4) << "  J " << fixed(report.j_mean, 4) << "  F "
                << fixed(report.f_mean, 4) << "  id_switches " << report.id_switches << "\n";
            return 0;
        }
        if (*tan_check) {
            bool all = true;
            for (const auto& c : tan::run_tan_checks(tan_seed)) {
                out << (c.passed ? "PASS  " : "FAIL  ") << c.name << "  " << c.detail << "\n";
                all = all && c.passed;
            }
            return all ? 0 : 1;
        }
        if (*bench) {
            RunConfig config;
            if (!bench_mode.empty()) config.mode = parse_tracking_mode(bench_mode);
            const BenchResult r = run_benchmark(bench_preset, bench_frames, config);
            out << "preset " << bench_preset << "  mode " << to_string(config.mode) << "  frames " << r.frames
                << "  targets " << r.targets << "  dim " << r.embedding_dim << "  detections " << r.detections
                << "  total_ms " << fixed(1000.0 * r.total_seconds, 3) << "  ms_per_frame " << fixed(r.ms_per_frame, 4)
                << "\n";
            if (bench_limit > 0.0 && r.ms_per_frame > bench_limit) {
                err << "error: " << fixed(r.ms_per_frame, 4) << " ms/frame exceeds the limit of " << bench_limit << "\n";
                return 1;
            }
            return 0;
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

} // namespace dttm::cli
