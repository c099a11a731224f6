#include "dttm/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dttm/error.hpp"
#include "dttm/random.hpp"

namespace dttm {

namespace {

// Stream tags for CounterRng paths.
enum Tag : std::uint64_t { kBase = 1, kDrift = 2, kObjectFrame = 3, kFalsePositive = 4, kShuffle = 5 };

double norm(const Embedding& e) {
    double s = 0.0;
    for (double x : e) s += x * x;
    return std::sqrt(s);
}

Embedding normalized(Embedding e) {
    const double n = norm(e);
    for (double& x : e) x /= n;
    return e;
}

Embedding random_unit(CounterRng& rng, std::size_t dim) {
    Embedding e(dim);
    do {
        for (double& x : e) x = rng.normal();
    } while (norm(e) < 1e-12);
    return normalized(std::move(e));
}

// Rotates the unit vector e by angle `theta` toward a random tangent direction.
Embedding perturb_on_sphere(const Embedding& e, double noise_scale, CounterRng& rng) {
    Embedding tangent(e.size());
    for (double& x : tangent) x = rng.normal();
    const double theta = noise_scale * std::abs(rng.normal());
    if (theta == 0.0) return e;
    double dot = 0.0;
    for (std::size_t i = 0; i < e.size(); ++i) dot += tangent[i] * e[i];
    for (std::size_t i = 0; i < e.size(); ++i) tangent[i] -= dot * e[i];
    const double n = norm(tangent);
    if (n < 1e-12) return e;
    Embedding out(e.size());
    const double c = std::cos(theta), s = std::sin(theta);
    for (std::size_t i = 0; i < e.size(); ++i) out[i] = c * e[i] + s * tangent[i] / n;
    return normalized(std::move(out));
}

double sample_conf(double mean, double spread, CounterRng& rng) {
    const double u = rng.uniform();
    if (spread == 0.0) return std::clamp(mean, 0.0, 1.0);
    return std::clamp(mean + spread * (2.0 * u - 1.0), 0.0, 1.0);
}

void check_rate(const char* field, double v) {
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) throw ConfigError(std::string(field) + " must lie in [0, 1]");
}

void check_nonneg(const char* field, double v) {
    if (!std::isfinite(v) || v < 0.0) throw ConfigError(std::string(field) + " must be finite and non-negative");
}

Embedding basis(std::size_t dim, std::size_t axis) {
    Embedding e(dim, 0.0);
    e[axis] = 1.0;
    return e;
}

Embedding blend(const Embedding& a, const Embedding& b, double angle) {
    Embedding out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = std::cos(angle) * a[i] + std::sin(angle) * b[i];
    return out;
}

} // namespace

double CounterRng::normal() {
    // Avoid log(0).
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

void validate(const ScenarioConfig& c) {
    if (c.num_objects < 1) throw ConfigError("num_objects must be at least 1");
    if (c.num_frames < 1) throw ConfigError("num_frames must be at least 1");
    if (c.scene_width < 1 || c.scene_height < 1) throw ConfigError("scene must have positive width and height");
    if (static_cast<std::uint64_t>(c.scene_width) * c.scene_height > BinaryMask::kMaxPixels)
        throw ConfigError("scene is too large");
    if (c.embedding_dim < 2) throw ConfigError("embedding_dim must be at least 2");
    if (c.motion.size() != c.num_objects) throw ConfigError("motion must list one entry per object");
    for (const auto& m : c.motion) {
        for (double v : {m.x0, m.y0, m.vx, m.vy, m.amplitude_x, m.amplitude_y})
            if (!std::isfinite(v)) throw ConfigError("motion values must be finite");
        if (!(m.w > 0.0) || !(m.h > 0.0) || !std::isfinite(m.w) || !std::isfinite(m.h))
            throw ConfigError("motion box size must be positive");
        check_nonneg("motion period", m.period);
    }
    if (!c.base_embeddings.empty()) {
        if (c.base_embeddings.size() != c.num_objects) throw ConfigError("base_embeddings must list one entry per object");
        for (const auto& e : c.base_embeddings) {
            if (e.size() != c.embedding_dim) throw ConfigError("base_embeddings dimension must equal embedding_dim");
            if (!std::isfinite(norm(e)) || norm(e) < 1e-12) throw ConfigError("base_embeddings must be nonzero and finite");
        }
    }
    for (const auto& d : c.drift_events) {
        if (d.object >= c.num_objects) throw ConfigError("drift_events object index out of range");
        if (!d.direction.empty()) {
            if (d.direction.size() != c.embedding_dim) throw ConfigError("drift_events direction dimension must equal embedding_dim");
            if (!std::isfinite(norm(d.direction)) || norm(d.direction) < 1e-12)
                throw ConfigError("drift_events direction must be nonzero and finite");
        }
        check_rate("drift_events blend_rate", d.blend_rate);
    }
    for (const auto& o : c.occlusion_windows) {
        if (o.object >= c.num_objects) throw ConfigError("occlusion_windows object index out of range");
        if (o.first_frame > o.last_frame) throw ConfigError("occlusion_windows first_frame must not exceed last_frame");
    }
    check_rate("fp_rate", c.fp_rate);
    check_rate("miss_rate", c.miss_rate);
    check_nonneg("box_jitter_sigma", c.box_jitter_sigma);
    check_nonneg("embedding_noise", c.embedding_noise);
    check_rate("conf_model matched_mean", c.conf_model.matched_mean);
    check_rate("conf_model fp_mean", c.conf_model.fp_mean);
    check_rate("conf_model spread", c.conf_model.spread);
}

BinaryMask GroundTruth::mask(std::size_t object, int frame) const {
    const auto& s = objects.at(object).at(static_cast<std::size_t>(frame));
    if (!s.visible) return BinaryMask::empty(width, height);
    return rasterize_box(s.bbox, width, height);
}

Scenario generate(const ScenarioConfig& config) {
    validate(config);
    const std::size_t dim = config.embedding_dim;
    const auto frames = static_cast<std::size_t>(config.num_frames);

    std::vector<Embedding> base(config.num_objects);
    for (std::size_t o = 0; o < config.num_objects; ++o) {
        if (!config.base_embeddings.empty()) {
            base[o] = normalized(config.base_embeddings[o]);
        } else {
            CounterRng rng(config.seed, {kBase, o});
            base[o] = random_unit(rng, dim);
        }
    }
    std::vector<Embedding> drift_dirs(config.drift_events.size());
    for (std::size_t k = 0; k < config.drift_events.size(); ++k) {
        const auto& d = config.drift_events[k];
        if (!d.direction.empty()) {
            drift_dirs[k] = normalized(d.direction);
        } else {
            CounterRng rng(config.seed, {kDrift, k});
            drift_dirs[k] = random_unit(rng, dim);
        }
    }

    Scenario out;
    GroundTruth& gt = out.truth;
    gt.width = config.scene_width;
    gt.height = config.scene_height;
    gt.num_frames = config.num_frames;
    gt.objects.assign(config.num_objects, {});
    for (std::size_t o = 0; o < config.num_objects; ++o) {
        const ObjectMotion& m = config.motion[o];
        Embedding e = base[o];
        auto& states = gt.objects[o];
        states.reserve(frames);
        for (int t = 0; t < config.num_frames; ++t) {
            for (std::size_t k = 0; k < config.drift_events.size(); ++k) {
                const auto& d = config.drift_events[k];
                if (d.object != o || t < d.frame) continue;
                Embedding mixed(dim);
                for (std::size_t i = 0; i < dim; ++i) mixed[i] = (1.0 - d.blend_rate) * e[i] + d.blend_rate * drift_dirs[k][i];
                e = norm(mixed) < 1e-12 ? drift_dirs[k] : normalized(std::move(mixed));
            }
            const double phase = m.period > 0.0 ? std::sin(2.0 * std::numbers::pi * t / m.period) : 0.0;
            const BBox box{m.x0 + m.vx * t + m.amplitude_x * phase, m.y0 + m.vy * t + m.amplitude_y * phase, m.w, m.h};
            bool visible = true;
            for (const auto& w : config.occlusion_windows)
                if (w.object == o && t >= w.first_frame && t <= w.last_frame) visible = false;
            states.push_back(GroundTruthState{box, visible, e});
        }
    }

    for (std::size_t o = 0; o < config.num_objects; ++o) {
        const auto& s = gt.objects[o][0];
        Detection d{s.bbox, 1.0, s.embedding, std::nullopt};
        if (config.emit_masks) d.mask = rasterize_box(s.bbox, gt.width, gt.height);
        out.first_frame.push_back(std::move(d));
    }

    double min_w = config.motion[0].w, max_w = min_w, min_h = config.motion[0].h, max_h = min_h;
    for (const auto& m : config.motion) {
        min_w = std::min(min_w, m.w);
        max_w = std::max(max_w, m.w);
        min_h = std::min(min_h, m.h);
        max_h = std::max(max_h, m.h);
    }

    const double jitter = config.box_jitter_sigma;
    for (int t = 1; t < config.num_frames; ++t) {
        FrameDetections frame{t, {}};
        for (std::size_t o = 0; o < config.num_objects; ++o) {
            const auto& s = gt.objects[o][static_cast<std::size_t>(t)];
            CounterRng rng(config.seed, {kObjectFrame, o, static_cast<std::uint64_t>(t)});
            const bool missed = rng.uniform() < config.miss_rate;
            if (!s.visible || missed) continue;
            BBox box = s.bbox;
            if (jitter > 0.0) {
                box.x += jitter * rng.normal();
                box.y += jitter * rng.normal();
                box.w = std::max(1.0, box.w + jitter * rng.normal());
                box.h = std::max(1.0, box.h + jitter * rng.normal());
            }
            Detection d{box, sample_conf(config.conf_model.matched_mean, config.conf_model.spread, rng),
                        config.embedding_noise > 0.0 ? perturb_on_sphere(s.embedding, config.embedding_noise, rng)
                                                     : s.embedding,
                        std::nullopt};
            if (config.emit_masks) d.mask = rasterize_box(box, gt.width, gt.height);
            frame.detections.push_back(std::move(d));
        }
        CounterRng fp_rng(config.seed, {kFalsePositive, static_cast<std::uint64_t>(t)});
        if (fp_rng.uniform() < config.fp_rate) {
            const double w = min_w + (max_w - min_w) * fp_rng.uniform();
            const double h = min_h + (max_h - min_h) * fp_rng.uniform();
            const BBox box{static_cast<double>(gt.width) * fp_rng.uniform(), static_cast<double>(gt.height) * fp_rng.uniform(), w, h};
            Detection d{box, sample_conf(config.conf_model.fp_mean, config.conf_model.spread, fp_rng),
                        random_unit(fp_rng, dim), std::nullopt};
            if (config.emit_masks) d.mask = rasterize_box(box, gt.width, gt.height);
            frame.detections.push_back(std::move(d));
        }
        if (config.shuffle_detections && frame.detections.size() > 1) {
            CounterRng shuffle(config.seed, {kShuffle, static_cast<std::uint64_t>(t)});
            for (std::size_t i = frame.detections.size() - 1; i > 0; --i) {
                const std::size_t j = static_cast<std::size_t>(shuffle.next_u64() % (i + 1));
                std::swap(frame.detections[i], frame.detections[j]);
            }
        }
        out.stream.push_back(std::move(frame));
    }
    return out;
}

std::vector<std::string> preset_names() { return {"crossing", "deformation", "occlusion", "dense"}; }

ScenarioConfig preset(std::string_view name) {
    ScenarioConfig c;
    c.scene_width = 160;
    c.scene_height = 120;
    c.embedding_dim = 16;
    c.box_jitter_sigma = 0.5;
    c.embedding_noise = 0.05;
    c.fp_rate = 0.1;
    c.miss_rate = 0.02;
    c.conf_model = ConfidenceModel{0.9, 0.4, 0.05};
    c.seed = 1;

    if (name == "crossing") {
        // Two same-size boxes on one scanline swap sides; at frame 16 each box
        // lands exactly where the other was.
        c.num_objects = 2;
        c.num_frames = 40;
        c.motion = {ObjectMotion{30.0, 60.0, 24.0, 24.0, 3.0, 0.0, 0.0, 0.0, 0.0},
                    ObjectMotion{129.0, 60.0, 24.0, 24.0, -3.0, 0.0, 0.0, 0.0, 0.0}};
        c.base_embeddings = {basis(c.embedding_dim, 0), basis(c.embedding_dim, 1)};
        return c;
    }
    if (name == "deformation") {
        // Object 0 changes appearance abruptly just as it passes a distractor
        // that looks like object 0's original appearance (cosine 0.955).
        c.num_objects = 2;
        c.num_frames = 36;
        c.scene_width = 240;
        c.motion = {ObjectMotion{40.0, 60.0, 24.0, 24.0, 5.0, 0.0, 0.0, 0.0, 0.0},
                    ObjectMotion{205.0, 60.0, 24.0, 24.0, -5.0, 0.0, 0.0, 0.0, 0.0}};
        c.base_embeddings = {basis(c.embedding_dim, 0), blend(basis(c.embedding_dim, 0), basis(c.embedding_dim, 1), 0.3)};
        c.drift_events = {DriftEvent{0, 16, basis(c.embedding_dim, 2), 1.0}};
        return c;
    }
    if (name == "occlusion") {
        c.num_objects = 2;
        c.num_frames = 50;
        c.motion = {ObjectMotion{20.0, 40.0, 20.0, 28.0, 2.5, 0.0, 0.0, 6.0, 25.0},
                    ObjectMotion{140.0, 85.0, 24.0, 24.0, -2.0, 0.0, 0.0, 0.0, 0.0}};
        c.base_embeddings = {basis(c.embedding_dim, 0), basis(c.embedding_dim, 1)};
        c.occlusion_windows = {OcclusionWindow{0, 15, 26}};
        return c;
    }
    if (name == "dense") {
        // Ten objects on a 5x2 lattice with independent oscillations.
        c.num_objects = 10;
        c.num_frames = 1000;
        c.scene_width = 640;
        c.scene_height = 480;
        c.embedding_dim = 128;
        c.emit_masks = false;
        for (std::size_t o = 0; o < c.num_objects; ++o) {
            const double col = static_cast<double>(o % 5), row = static_cast<double>(o / 5);
            c.motion.push_back(ObjectMotion{80.0 + 120.0 * col, 140.0 + 200.0 * row, 40.0, 60.0, 0.0, 0.0,
                                            30.0, 20.0, 60.0 + 7.0 * static_cast<double>(o)});
        }
        return c;
    }
    std::string names;
    for (const auto& n : preset_names()) names += (names.empty() ? "" : ", ") + n;
    throw ConfigError("preset: unknown name '" + std::string(name) + "' (available: " + names + ")");
}

} // namespace dttm
