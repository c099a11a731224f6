#include "dttm/config.hpp"

#include <cmath>

#include "dttm/error.hpp"

namespace dttm {

std::string_view to_string(TrackingMode mode) {
    switch (mode) {
    case TrackingMode::Dttm: return "dttm";
    case TrackingMode::MovingAverage: return "moving_average";
    case TrackingMode::IouOnly: return "iou_only";
    }
    return "dttm";
}

TrackingMode parse_tracking_mode(std::string_view name) {
    if (name == "dttm") return TrackingMode::Dttm;
    if (name == "moving_average") return TrackingMode::MovingAverage;
    if (name == "iou_only") return TrackingMode::IouOnly;
    throw ConfigError("mode: unknown tracking mode '" + std::string(name) +
                      "' (expected dttm, moving_average or iou_only)");
}

void validate(const RunConfig& config) {
    validate(config.thresholds);
    if (config.bank_capacity < 1) throw ConfigError("bank_capacity must be at least 1");
    if (!std::isfinite(config.id_switch_iou_floor) || config.id_switch_iou_floor < 0.0 ||
        config.id_switch_iou_floor > 1.0)
        throw ConfigError("id_switch_iou_floor must lie in [0, 1]");
}

} // namespace dttm
