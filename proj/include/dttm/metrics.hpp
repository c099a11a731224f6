#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dttm/geometry.hpp"
#include "dttm/simulator.hpp"
#include "dttm/tracker.hpp"

namespace dttm {

double region_j(const BinaryMask& pred, const BinaryMask& gt);

// Boundary pixels are set pixels with an unset 4-neighbour or on the grid edge.
// Matching uses Chebyshev distance <= tol.
double boundary_f(const BinaryMask& pred, const BinaryMask& gt, std::size_t tol);

// Each predicted box is attributed to the visible ground-truth object of
// maximal IoU (ties: lowest object index) when that IoU >= iou_floor; a switch
// is one change of attributed object between consecutive attributed frames.
int id_switches(std::span<const Trajectory> trajs, const GroundTruth& gt, double iou_floor);

struct EvalConfig {
    std::size_t boundary_tolerance = 1;
    double id_switch_iou_floor = 0.5;
    double recall_iou = 0.5;
};

struct ObjectFrameScore {
    std::size_t object = 0;
    int frame = 0;
    double j = 0.0;
    double f = 0.0;
    std::optional<std::size_t> attributed;  // GT object the same-id target's box was attributed to

    bool operator==(const ObjectFrameScore&) const = default;
};

struct EvalReport {
    std::vector<ObjectFrameScore> scores;  // object-major, then frame
    double j_mean = 0.0;
    double f_mean = 0.0;
    double jf_mean = 0.0;
    int id_switches = 0;
    double track_recall = 0.0;

    bool operator==(const EvalReport&) const = default;
};

// Target k is scored against ground-truth object k over every ground-truth
// frame. A frame without an entry predicts an empty mask; an entry without a
// mask is scored by its rasterized box. Throws Error if any trajectory entry
// lies outside the ground-truth frame range.
EvalReport evaluate(std::span<const Trajectory> trajs, const GroundTruth& gt, const EvalConfig& config = {});


} // namespace dttm
