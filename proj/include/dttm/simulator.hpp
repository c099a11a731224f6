#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "dttm/detection.hpp"
#include "dttm/tracker.hpp"

namespace dttm {

// Center position at frame t: start + velocity * t + amplitude * sin(2 pi t / period).
// A period of 0 disables the oscillation.
struct ObjectMotion {
    double x0 = 0.0;
    double y0 = 0.0;
    double w = 1.0;
    double h = 1.0;
    double vx = 0.0;
    double vy = 0.0;
    double amplitude_x = 0.0;
    double amplitude_y = 0.0;
    double period = 0.0;

    bool operator==(const ObjectMotion&) const = default;
};

// From `frame` on, the object's true embedding is pulled toward `direction`
// every frame: e <- normalize((1 - blend_rate) e + blend_rate * direction).
// An empty direction is drawn from the seed.
struct DriftEvent {
    std::size_t object = 0;
    int frame = 0;
    Embedding direction;
    double blend_rate = 1.0;

    bool operator==(const DriftEvent&) const = default;
};

// Inclusive frame range during which the object is invisible.
struct OcclusionWindow {
    std::size_t object = 0;
    int first_frame = 0;
    int last_frame = 0;

    bool operator==(const OcclusionWindow&) const = default;
};

// Confidences are uniform in [mean - spread, mean + spread], clipped to [0, 1].
struct ConfidenceModel {
    double matched_mean = 0.9;
    double fp_mean = 0.4;
    double spread = 0.0;

    bool operator==(const ConfidenceModel&) const = default;
};

struct ScenarioConfig {
    std::size_t num_objects = 1;
    int num_frames = 1;
    std::size_t scene_width = 160;   // scene units are pixels of the mask grid
    std::size_t scene_height = 120;
    std::size_t embedding_dim = 16;
    std::vector<ObjectMotion> motion;          // one per object
    std::vector<Embedding> base_embeddings;    // empty: drawn from the seed
    std::vector<DriftEvent> drift_events;
    std::vector<OcclusionWindow> occlusion_windows;
    double fp_rate = 0.0;           // probability of one false positive per frame
    double box_jitter_sigma = 0.0;  // gaussian noise on x, y, w, h
    double embedding_noise = 0.0;   // angular noise scale (radians)
    ConfidenceModel conf_model;
    double miss_rate = 0.0;
    bool shuffle_detections = true;
    bool emit_masks = true;
    std::uint64_t seed = 0;

    bool operator==(const ScenarioConfig&) const = default;
};

// Throws ConfigError naming the offending field.
void validate(const ScenarioConfig& config);

struct GroundTruthState {
    BBox bbox;
    bool visible = true;
    Embedding embedding;  // unit norm

    bool operator==(const GroundTruthState&) const = default;
};

struct GroundTruth {
    std::size_t width = 0;
    std::size_t height = 0;
    int num_frames = 0;
    std::vector<std::vector<GroundTruthState>> objects;  // [object][frame]

    std::size_t num_objects() const { return objects.size(); }
    // Rasterized box when visible, empty otherwise.
    BinaryMask mask(std::size_t object, int frame) const;

    bool operator==(const GroundTruth&) const = default;
};

struct Scenario {
    GroundTruth truth;
    // Frame-0 annotation: exact boxes, conf 1.0, true embeddings, rasterized masks.
    std::vector<Detection> first_frame;
    // Frames 1 .. num_frames - 1, one record per frame (possibly empty).
    std::vector<FrameDetections> stream;
};

Scenario generate(const ScenarioConfig& config);

// "crossing", "deformation", "occlusion", "dense".
std::vector<std::string> preset_names();
// Throws ConfigError listing the available presets for an unknown name.
ScenarioConfig preset(std::string_view name);

} // namespace dttm
