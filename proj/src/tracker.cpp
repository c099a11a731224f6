#include "dttm/tracker.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "dttm/error.hpp"

namespace dttm {

const TrajectoryEntry* Trajectory::find(int frame) const {
    auto it = std::lower_bound(entries.begin(), entries.end(), frame,
                               [](const TrajectoryEntry& e, int f) { return e.frame < f; });
    if (it == entries.end() || it->frame != frame) return nullptr;
    return &*it;
}

LabelMap merge_masks(std::span<const MaskedMatch> masks, std::size_t width, std::size_t height) {
    LabelMap out{width, height, std::vector<int>(width * height, 0)};
    std::vector<std::size_t> order(masks.size());
    std::iota(order.begin(), order.end(), 0);
    for (const auto& m : masks)
        if (m.mask.width() != width || m.mask.height() != height) throw ShapeError("mask dimensions differ from label map");
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (masks[a].conf != masks[b].conf) return masks[a].conf > masks[b].conf;
        return masks[a].target_id < masks[b].target_id;
    });
    for (std::size_t k : order) {
        const BitGrid bits = rle_decode(masks[k].mask);
        for (std::size_t p = 0; p < bits.bits.size(); ++p)
            if (bits.bits[p] && out.labels[p] == 0) out.labels[p] = masks[k].target_id + 1;
    }
    return out;
}

Tracker Tracker::init_from_first_frame(std::span<const Detection> gt, const RunConfig& config, int frame) {
    validate(config);
    if (gt.empty()) throw Error("first-frame ground truth is empty; at least one annotated object is required");
    Tracker t;
    t.config_ = config;
    t.embedding_dim_ = config.embedding_dim != 0 ? config.embedding_dim : gt.front().embedding.size();
    t.last_frame_ = frame;
    const double self_weight = config.mode == TrackingMode::IouOnly ? 1.0 : 2.0;
    for (std::size_t i = 0; i < gt.size(); ++i) {
        validate(gt[i]);
        if (gt[i].embedding.size() != t.embedding_dim_)
            throw ShapeError("ground truth " + std::to_string(i) + ": embedding dimension " +
                             std::to_string(gt[i].embedding.size()) + ", expected " + std::to_string(t.embedding_dim_));
        const int id = static_cast<int>(i);
        t.targets_.push_back(TrackedTarget{id, init_bank(gt[i], config.bank_capacity, frame), gt[i].bbox, frame});
        t.trajectories_.push_back(Trajectory{id, {TrajectoryEntry{frame, gt[i].bbox, gt[i].mask, self_weight}}});
    }
    return t;
}

FrameResult Tracker::step(int frame, std::span<const Detection> dets) {
    if (frame <= last_frame_)
        throw Error("frame " + std::to_string(frame) + " is not after the previous frame " + std::to_string(last_frame_));
    for (std::size_t j = 0; j < dets.size(); ++j) {
        validate(dets[j]);
        if (dets[j].embedding.size() != embedding_dim_)
            throw ShapeError("detection " + std::to_string(j) + ": embedding dimension " +
                             std::to_string(dets[j].embedding.size()) + ", expected " + std::to_string(embedding_dim_));
    }
    last_frame_ = frame;

    const auto& th = config_.thresholds;
    std::vector<std::size_t> kept;
    std::vector<Detection> candidates;
    for (std::size_t j = 0; j < dets.size(); ++j) {
        if (dets[j].conf > th.sigma_det) {
            kept.push_back(j);
            candidates.push_back(dets[j]);
        }
    }

    const AssociationCosts costs = build_cost_matrix(targets_, candidates, config_.mode != TrackingMode::IouOnly);
    const Assignment assignment = solve_max_assignment(costs.weights);

    FrameResult result;
    result.frame = frame;
    std::vector<char> target_matched(targets_.size(), 0);
    std::vector<char> det_matched(dets.size(), 0);
    std::vector<MaskedMatch> masks;
    for (const auto& [row, col] : assignment.pairs) {
        const double weight = costs.weights(row, col);
        if (!(weight > th.min_match_weight)) continue;
        const Detection& det = candidates[col];
        TrackedTarget& target = targets_[row];
        target_matched[row] = 1;
        det_matched[kept[col]] = 1;
        result.matches.push_back(Match{target.id, kept[col], weight});

        trajectories_[row].entries.push_back(TrajectoryEntry{frame, det.bbox, det.mask, weight});
        target.last_box = det.bbox;
        target.last_seen_frame = frame;
        switch (config_.mode) {
        case TrackingMode::Dttm:
            target.bank = dttm_update(target.bank, det, costs.appearance_at(row, col), th, frame).bank;
            break;
        case TrackingMode::MovingAverage: {
            Template updated = moving_average_update(target.bank[0], det.embedding, th.momentum);
            ++updated.use_count;
            target.bank = TemplateBank(target.bank.capacity(), {std::move(updated)});
            break;
        }
        case TrackingMode::IouOnly: break;
        }
        if (det.mask) masks.push_back(MaskedMatch{target.id, det.conf, *det.mask});
    }
    for (std::size_t i = 0; i < targets_.size(); ++i)
        if (!target_matched[i]) result.unmatched_targets.push_back(targets_[i].id);
    for (std::size_t j = 0; j < dets.size(); ++j)
        if (!det_matched[j]) result.unmatched_detections.push_back(j);
    if (!masks.empty()) {
        const auto w = masks.front().mask.width(), h = masks.front().mask.height();
        result.label_map = merge_masks(masks, w, h);
    }
    return result;
}

RunResult run(Tracker& tracker, std::span<const FrameDetections> stream) {
    RunResult out;
    out.frames.reserve(stream.size());
    for (const auto& f : stream) out.frames.push_back(tracker.step(f.frame, f.detections));
    out.trajectories = tracker.trajectories();
    out.targets = tracker.targets();
    return out;
}

} // namespace dttm
