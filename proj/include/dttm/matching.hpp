#pragma once

#include <span>
#include <vector>

#include "dttm/assignment.hpp"
#include "dttm/detection.hpp"
#include "dttm/template_bank.hpp"

namespace dttm {

struct TrackedTarget {
    int id = 0;
    TemplateBank bank;
    BBox last_box;
    int last_seen_frame = 0;

    bool operator==(const TrackedTarget&) const = default;
};

// Cosine of the angle between u and v; 0 when either vector has zero norm.
// Throws ShapeError on dimension mismatch.
double cosine_similarity(std::span<const double> u, std::span<const double> v);

// IoU between the target's reference box and the detection box.
double location_weight(const BBox& target_box, const BBox& det_box);

// Maximum cosine similarity over the bank; ties go to the lowest template index.
AppearanceMatch appearance_weight(const TemplateBank& bank, const Detection& d);

// Association weights for every target x detection pair, together with the
// attaining template of each entry (row-major, same layout as the matrix).
struct AssociationCosts {
    WeightMatrix weights;
    std::vector<AppearanceMatch> appearance;

    const AppearanceMatch& appearance_at(std::size_t row, std::size_t col) const {
        return appearance[row * weights.cols() + col];
    }
};

// Entry (i, j) = location_weight + appearance_weight. With use_appearance false
// the appearance term is forced to 0 (plain IoU association).
AssociationCosts build_cost_matrix(std::span<const TrackedTarget> targets, std::span<const Detection> dets,
                                   bool use_appearance = true);

} // namespace dttm
