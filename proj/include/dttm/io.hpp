#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "dttm/config.hpp"
#include "dttm/metrics.hpp"
#include "dttm/simulator.hpp"
#include "dttm/tracker.hpp"

namespace dttm::io {

inline constexpr int kFormatVersion = 1;

// Fixed float formatting used by every writer: 9 significant digits ("%.9g").
std::string format_real(double v);

// --- detection streams (JSONL, one frame per line) ---------------------------

std::string detection_stream_line(const FrameDetections& frame);
std::string detection_stream_string(const std::vector<FrameDetections>& frames);
void write_detection_stream(std::ostream& out, const std::vector<FrameDetections>& frames);
void write_detection_stream(const std::filesystem::path& path, const std::vector<FrameDetections>& frames);

// Blank lines are skipped. Errors are located by line number.
std::vector<FrameDetections> parse_detection_stream(std::istream& in);
std::vector<FrameDetections> parse_detection_stream_string(std::string_view text);
std::vector<FrameDetections> parse_detection_stream(const std::filesystem::path& path);

// First-frame annotation: a detection stream holding exactly one frame.
std::vector<Detection> parse_first_frame(const std::filesystem::path& path, int* frame = nullptr);

// --- trajectories (single JSON document) -------------------------------------

struct TrackOutput {
    std::vector<Trajectory> trajectories;
    std::vector<TemplateBank> banks;  // parallel to trajectories; may be empty

    bool operator==(const TrackOutput&) const = default;
};

std::string trajectories_json(const TrackOutput& output);
void write_trajectories(const std::filesystem::path& path, const TrackOutput& output);
// Errors are located by JSON path, e.g. "targets[1].entries[4].bbox".
TrackOutput parse_trajectories_json(std::string_view text);
TrackOutput parse_trajectories(const std::filesystem::path& path);

// --- ground truth --------------------------------------------------------------

std::string ground_truth_json(const GroundTruth& gt);
GroundTruth parse_ground_truth_json(std::string_view text);
GroundTruth parse_ground_truth(const std::filesystem::path& path);

// --- configuration ---------------------------------------------------------------

std::string run_config_json(const RunConfig& config);
// Unknown keys are rejected; "momentum" is required in moving_average mode.
RunConfig parse_run_config_json(std::string_view text);
RunConfig parse_run_config(const std::filesystem::path& path);

std::string scenario_config_json(const ScenarioConfig& config);
ScenarioConfig parse_scenario_config_json(std::string_view text);
ScenarioConfig parse_scenario_config(const std::filesystem::path& path);

// --- evaluation reports ------------------------------------------------------------

// Header: object,frame,j,f,attributed (attributed is empty when unattributed).
std::string report_csv(const EvalReport& report);
std::string report_json(const EvalReport& report);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

} // namespace dttm::io
