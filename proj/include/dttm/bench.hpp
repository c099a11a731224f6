#pragma once

#include <cstddef>
#include <string>

#include "dttm/config.hpp"

namespace dttm {

struct BenchResult {
    std::size_t frames = 0;
    std::size_t targets = 0;
    std::size_t embedding_dim = 0;
    std::size_t detections = 0;
    double total_seconds = 0.0;
    double ms_per_frame = 0.0;
};

// Generates the preset scenario (frames overriding its length when nonzero)
// and times Tracker::step over the whole stream. Scenario generation is not timed.
BenchResult run_benchmark(const std::string& preset_name, std::size_t frames, const RunConfig& config = {});

} // namespace dttm
