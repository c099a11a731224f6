#include "dttm/template_bank.hpp"

#include <algorithm>
#include <cmath>

#include "dttm/error.hpp"

namespace dttm {

namespace {

void check_unit(const char* name, double v) {
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) throw ConfigError(std::string(name) + " must lie in [0, 1]");
}

} // namespace

void validate(const MatchingThresholds& t) {
    check_unit("sigma_det", t.sigma_det);
    check_unit("sigma_conf", t.sigma_conf);
    if (t.sigma_app != -1.0) check_unit("sigma_app", t.sigma_app);
    check_unit("momentum", t.momentum);
    if (!std::isfinite(t.min_match_weight) || t.min_match_weight < 0.0 || t.min_match_weight > 2.0)
        throw ConfigError("min_match_weight must lie in [0, 2]");
}

TemplateBank::TemplateBank(std::size_t capacity, std::vector<Template> templates)
    : capacity_(capacity), templates_(std::move(templates)) {
    if (capacity_ < 1) throw ConfigError("bank_capacity must be at least 1");
    if (templates_.empty() || templates_.size() > capacity_)
        throw Error("template bank must hold between 1 and capacity templates");
}

TemplateBank init_bank(const Detection& gt, std::size_t capacity, int frame) {
    if (capacity < 1) throw ConfigError("bank_capacity must be at least 1");
    return TemplateBank(capacity, {Template{gt.embedding, frame, 0}});
}

BankUpdate dttm_update(const TemplateBank& bank, const Detection& matched, const AppearanceMatch& match,
                       const MatchingThresholds& thresholds, int frame) {
    std::vector<Template> templates = bank.templates();
    if (match.template_index >= templates.size()) throw Error("attaining template index out of range");
    ++templates[match.template_index].use_count;

    BankUpdate out;
    if (matched.conf > thresholds.sigma_conf && match.similarity < thresholds.sigma_app) {
        templates.push_back(Template{matched.embedding, frame, 0});
        out.added = true;
    }
    while (templates.size() > bank.capacity()) {
        auto victim = std::min_element(templates.begin(), templates.end(), [](const Template& a, const Template& b) {
            if (a.use_count != b.use_count) return a.use_count < b.use_count;
            return a.born_frame < b.born_frame;
        });
        out.evicted = *victim;
        templates.erase(victim);
    }
    out.bank = TemplateBank(bank.capacity(), std::move(templates));
    return out;
}

Template moving_average_update(const Template& t, const Embedding& observation, double momentum) {
    if (observation.size() != t.embedding.size()) throw ShapeError("embedding dimension mismatch");
    Template out = t;
    for (std::size_t i = 0; i < out.embedding.size(); ++i)
        out.embedding[i] = (1.0 - momentum) * t.embedding[i] + momentum * observation[i];
    return out;
}

} // namespace dttm
