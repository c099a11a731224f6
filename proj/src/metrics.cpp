#include "dttm/metrics.hpp"

#include <algorithm>
#include <map>

#include "dttm/error.hpp"

namespace dttm {

namespace {

BitGrid boundary_of(const BitGrid& g) {
    BitGrid b(g.width, g.height);
    for (std::size_t r = 0; r < g.height; ++r) {
        for (std::size_t c = 0; c < g.width; ++c) {
            if (!g.at(r, c)) continue;
            const bool edge = r == 0 || c == 0 || r + 1 == g.height || c + 1 == g.width;
            if (edge || !g.at(r - 1, c) || !g.at(r + 1, c) || !g.at(r, c - 1) || !g.at(r, c + 1)) b.at(r, c) = 1;
        }
    }
    return b;
}

// Square (Chebyshev) dilation with radius `tol`, separable via prefix sums.
BitGrid dilate(const BitGrid& g, std::size_t tol) {
    if (tol == 0) return g;
    const std::size_t w = g.width, h = g.height;
    BitGrid rows(w, h);
    std::vector<std::size_t> prefix(std::max(w, h) + 1);
    for (std::size_t r = 0; r < h; ++r) {
        for (std::size_t c = 0; c < w; ++c) prefix[c + 1] = prefix[c] + g.at(r, c);
        for (std::size_t c = 0; c < w; ++c) {
            const std::size_t lo = c > tol ? c - tol : 0, hi = std::min(w, c + tol + 1);
            rows.at(r, c) = prefix[hi] - prefix[lo] > 0;
        }
    }
    BitGrid out(w, h);
    for (std::size_t c = 0; c < w; ++c) {
        for (std::size_t r = 0; r < h; ++r) prefix[r + 1] = prefix[r] + rows.at(r, c);
        for (std::size_t r = 0; r < h; ++r) {
            const std::size_t lo = r > tol ? r - tol : 0, hi = std::min(h, r + tol + 1);
            out.at(r, c) = prefix[hi] - prefix[lo] > 0;
        }
    }
    return out;
}

std::size_t count_within(const BitGrid& points, const BitGrid& reach) {
    std::size_t n = 0;
    for (std::size_t i = 0; i < points.bits.size(); ++i) n += points.bits[i] && reach.bits[i];
    return n;
}

std::size_t count(const BitGrid& g) { return static_cast<std::size_t>(std::count(g.bits.begin(), g.bits.end(), 1)); }

std::optional<std::size_t> attribute(const BBox& box, const GroundTruth& gt, int frame, double iou_floor) {
    std::optional<std::size_t> best;
    double best_iou = -1.0;
    for (std::size_t o = 0; o < gt.num_objects(); ++o) {
        const auto& s = gt.objects[o][static_cast<std::size_t>(frame)];
        if (!s.visible) continue;
        const double v = iou(box, s.bbox);
        if (v > best_iou) {
            best_iou = v;
            best = o;
        }
    }
    if (!best || best_iou < iou_floor) return std::nullopt;
    return best;
}

bool in_range(const GroundTruth& gt, int frame) { return frame >= 0 && frame < gt.num_frames; }

} // namespace

double region_j(const BinaryMask& pred, const BinaryMask& gt) { return mask_iou(pred, gt); }

double boundary_f(const BinaryMask& pred, const BinaryMask& gt, std::size_t tol) {
    if (!pred.same_shape(gt)) throw ShapeError("mask dimensions differ");
    const BitGrid pb = boundary_of(rle_decode(pred));
    const BitGrid gb = boundary_of(rle_decode(gt));
    const std::size_t np = count(pb), ng = count(gb);
    if (np == 0 && ng == 0) return 1.0;
    if (np == 0 || ng == 0) return 0.0;
    const double precision = static_cast<double>(count_within(pb, dilate(gb, tol))) / static_cast<double>(np);
    const double recall = static_cast<double>(count_within(gb, dilate(pb, tol))) / static_cast<double>(ng);
    if (precision + recall == 0.0) return 0.0;
    return 2.0 * precision * recall / (precision + recall);
}

int id_switches(std::span<const Trajectory> trajs, const GroundTruth& gt, double iou_floor) {
    int switches = 0;
    for (const auto& traj : trajs) {
        std::optional<std::size_t> last;
        for (const auto& e : traj.entries) {
            if (!in_range(gt, e.frame)) continue;
            const auto who = attribute(e.bbox, gt, e.frame, iou_floor);
            if (!who) continue;
            if (last && *last != *who) ++switches;
            last = who;
        }
    }
    return switches;
}

EvalReport evaluate(std::span<const Trajectory> trajs, const GroundTruth& gt, const EvalConfig& config) {
    std::map<int, const Trajectory*> by_id;
    for (const auto& t : trajs) {
        for (const auto& e : t.entries)
            if (!in_range(gt, e.frame))
                throw Error("trajectory " + std::to_string(t.target_id) + " has frame " + std::to_string(e.frame) +
                            " outside the ground-truth range [0, " + std::to_string(gt.num_frames) + ")");
        by_id[t.target_id] = &t;
    }

    EvalReport report;
    double j_sum = 0.0, f_sum = 0.0;
    std::size_t visible = 0, recalled = 0;
    for (std::size_t o = 0; o < gt.num_objects(); ++o) {
        auto it = by_id.find(static_cast<int>(o));
        const Trajectory* traj = it == by_id.end() ? nullptr : it->second;
        for (int t = 0; t < gt.num_frames; ++t) {
            const auto& state = gt.objects[o][static_cast<std::size_t>(t)];
            const TrajectoryEntry* entry = traj ? traj->find(t) : nullptr;
            const BinaryMask truth = gt.mask(o, t);
            BinaryMask pred = BinaryMask::empty(gt.width, gt.height);
            ObjectFrameScore s{o, t, 0.0, 0.0, std::nullopt};
            if (entry) {
                pred = entry->mask ? *entry->mask : rasterize_box(entry->bbox, gt.width, gt.height);
                s.attributed = attribute(entry->bbox, gt, t, config.id_switch_iou_floor);
            }
            s.j = region_j(pred, truth);
            s.f = boundary_f(pred, truth, config.boundary_tolerance);
            if (state.visible) {
                ++visible;
                if (entry && iou(entry->bbox, state.bbox) >= config.recall_iou) ++recalled;
            }
            j_sum += s.j;
            f_sum += s.f;
            report.scores.push_back(s);
        }
    }
    const double n = static_cast<double>(report.scores.size());
    report.j_mean = report.scores.empty() ? 1.0 : j_sum / n;
    report.f_mean = report.scores.empty() ? 1.0 : f_sum / n;
    report.jf_mean = (report.j_mean + report.f_mean) / 2.0;
    report.id_switches = id_switches(trajs, gt, config.id_switch_iou_floor);
    report.track_recall = visible == 0 ? 1.0 : static_cast<double>(recalled) / static_cast<double>(visible);
    return report;
}

} // namespace dttm
