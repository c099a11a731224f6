#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "dttm/detection.hpp"

namespace dttm {

struct Template {
    Embedding embedding;
    int born_frame = 0;
    std::uint64_t use_count = 0;

    bool operator==(const Template&) const = default;
};

struct MatchingThresholds {
    double sigma_det = 0.5;        // detections with conf <= sigma_det are dropped
    double sigma_conf = 0.5;       // template growth needs conf > sigma_conf ...
    double sigma_app = 0.5;        // ... and appearance similarity < sigma_app
    double min_match_weight = 0.1; // assigned pairs need omega > min_match_weight
    double momentum = 0.3;         // moving-average baseline

    bool operator==(const MatchingThresholds&) const = default;
};

// Throws ConfigError naming the out-of-range field. sigma_app may also be -1,
// which disables template growth.
void validate(const MatchingThresholds& t);

class TemplateBank {
public:
    TemplateBank() = default;
    TemplateBank(std::size_t capacity, std::vector<Template> templates);

    std::size_t capacity() const { return capacity_; }
    std::size_t size() const { return templates_.size(); }
    bool empty() const { return templates_.empty(); }
    const std::vector<Template>& templates() const { return templates_; }
    const Template& operator[](std::size_t i) const { return templates_[i]; }

    bool operator==(const TemplateBank&) const = default;

private:
    std::size_t capacity_ = 0;
    std::vector<Template> templates_;
};

// Best-matching template of a bank for one detection embedding.
struct AppearanceMatch {
    double similarity = 0.0;
    std::size_t template_index = 0;
};

struct BankUpdate {
    TemplateBank bank;
    bool added = false;
    std::optional<Template> evicted;
};

TemplateBank init_bank(const Detection& gt, std::size_t capacity, int frame = 0);

// One DTTM step for an accepted match: bump the attaining template, append a
// new template when conf > sigma_conf and similarity < sigma_app, then evict
// the least-used (oldest among ties) template while over capacity.
BankUpdate dttm_update(const TemplateBank& bank, const Detection& matched, const AppearanceMatch& match,
                       const MatchingThresholds& thresholds, int frame);

// (1 - mnt) * template + mnt * observation, no renormalization.
Template moving_average_update(const Template& t, const Embedding& observation, double momentum);

} // namespace dttm
