#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "dttm/config.hpp"
#include "dttm/detection.hpp"
#include "dttm/matching.hpp"

namespace dttm {

struct TrajectoryEntry {
    int frame = 0;
    BBox bbox;
    std::optional<BinaryMask> mask;
    double weight = 0.0;

    bool operator==(const TrajectoryEntry&) const = default;
};

// Entries are strictly increasing in frame; frames without a match are absent.
struct Trajectory {
    int target_id = 0;
    std::vector<TrajectoryEntry> entries;

    const TrajectoryEntry* find(int frame) const;
    bool operator==(const Trajectory&) const = default;
};

struct Match {
    int target_id = 0;
    std::size_t detection_index = 0;
    double weight = 0.0;

    bool operator==(const Match&) const = default;
};

// 0 is background, target_id + 1 elsewhere.
struct LabelMap {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<int> labels;

    int at(std::size_t row, std::size_t col) const { return labels[row * width + col]; }
    bool operator==(const LabelMap&) const = default;
};

struct FrameResult {
    int frame = 0;
    std::vector<Match> matches;
    std::vector<int> unmatched_targets;
    // Includes detections dropped by the sigma_det floor.
    std::vector<std::size_t> unmatched_detections;
    std::optional<LabelMap> label_map;

    bool operator==(const FrameResult&) const = default;
};

struct FrameDetections {
    int frame = 0;
    std::vector<Detection> detections;

    bool operator==(const FrameDetections&) const = default;
};

struct MaskedMatch {
    int target_id = 0;
    double conf = 0.0;
    BinaryMask mask;
};

// Paints masks in descending confidence (ties: lower target_id first); a pixel
// belongs to the first mask that covers it. Throws ShapeError on size mismatch.
LabelMap merge_masks(std::span<const MaskedMatch> masks, std::size_t width, std::size_t height);

// Online tracking-by-detection over a fixed identity set given at the first frame.
class Tracker {
public:
    // Targets get ids 0..N-1 in input order. Throws on empty ground truth.
    static Tracker init_from_first_frame(std::span<const Detection> gt, const RunConfig& config, int frame = 0);

    // Frames must be strictly increasing.
    FrameResult step(int frame, std::span<const Detection> dets);

    const RunConfig& config() const { return config_; }
    const std::vector<TrackedTarget>& targets() const { return targets_; }
    const std::vector<Trajectory>& trajectories() const { return trajectories_; }
    std::size_t embedding_dim() const { return embedding_dim_; }
    int last_frame() const { return last_frame_; }

private:
    Tracker() = default;

    RunConfig config_;
    std::size_t embedding_dim_ = 0;
    int last_frame_ = 0;
    std::vector<TrackedTarget> targets_;
    std::vector<Trajectory> trajectories_;
};

struct RunResult {
    std::vector<Trajectory> trajectories;
    std::vector<TrackedTarget> targets;
    std::vector<FrameResult> frames;
};

RunResult run(Tracker& tracker, std::span<const FrameDetections> stream);

} // namespace dttm
