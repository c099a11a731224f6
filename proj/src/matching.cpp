#include "dttm/matching.hpp"

#include <algorithm>
#include <cmath>

#include "dttm/error.hpp"

namespace dttm {

double cosine_similarity(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size()) throw ShapeError("embedding dimension mismatch");
    double dot = 0.0, uu = 0.0, vv = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        dot += u[i] * v[i];
        uu += u[i] * u[i];
        vv += v[i] * v[i];
    }
    if (uu == 0.0 || vv == 0.0) return 0.0;
    const double s = dot / std::sqrt(uu * vv);
    return std::clamp(s, -1.0, 1.0);
}

double location_weight(const BBox& target_box, const BBox& det_box) { return iou(target_box, det_box); }

AppearanceMatch appearance_weight(const TemplateBank& bank, const Detection& d) {
    if (bank.empty()) throw Error("appearance weight requested against an empty template bank");
    AppearanceMatch best{cosine_similarity(bank[0].embedding, d.embedding), 0};
    for (std::size_t k = 1; k < bank.size(); ++k) {
        const double s = cosine_similarity(bank[k].embedding, d.embedding);
        if (s > best.similarity) best = {s, k};
    }
    return best;
}

AssociationCosts build_cost_matrix(std::span<const TrackedTarget> targets, std::span<const Detection> dets,
                                   bool use_appearance) {
    AssociationCosts costs;
    costs.weights = WeightMatrix(targets.size(), dets.size());
    costs.appearance.resize(targets.size() * dets.size());
    for (std::size_t i = 0; i < targets.size(); ++i) {
        for (std::size_t j = 0; j < dets.size(); ++j) {
            AppearanceMatch app;
            if (use_appearance) app = appearance_weight(targets[i].bank, dets[j]);
            costs.appearance[i * dets.size() + j] = app;
            costs.weights(i, j) = location_weight(targets[i].last_box, dets[j].bbox) + app.similarity;
        }
    }
    return costs;
}

} // namespace dttm
