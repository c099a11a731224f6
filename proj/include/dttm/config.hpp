#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

#include "dttm/template_bank.hpp"

namespace dttm {

enum class TrackingMode { Dttm, MovingAverage, IouOnly };

std::string_view to_string(TrackingMode mode);
// Accepts "dttm", "moving_average", "iou_only"; throws ConfigError otherwise.
TrackingMode parse_tracking_mode(std::string_view name);

struct RunConfig {
    TrackingMode mode = TrackingMode::Dttm;
    MatchingThresholds thresholds;
    std::size_t bank_capacity = 5;
    std::size_t embedding_dim = 0;  // 0: taken from the first-frame ground truth
    std::size_t boundary_tolerance = 1;
    double id_switch_iou_floor = 0.5;
    std::uint64_t seed = 0;

    bool operator==(const RunConfig&) const = default;
};

void validate(const RunConfig& config);

} // namespace dttm
