#include "dttm/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "dttm/error.hpp"

namespace dttm::io {

using nlohmann::json;

std::string format_real(double v) {
    if (!std::isfinite(v)) throw Error("cannot serialize a non-finite number");
    if (v == 0.0) return "0";  // folds -0
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

namespace {

// ---------------------------------------------------------------- writing

std::string json_string(std::string_view s) {
    std::string out = "\"";
    for (char ch : s) {
        switch (ch) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        default:
            if (static_cast<unsigned char>(ch) < 0x20) {
                char buf[8];
                std::snprintf(buf, sizeof buf, "\\u%04x", ch);
                out += buf;
            } else {
                out += ch;
            }
        }
    }
    return out + "\"";
}

std::string real_array(std::span<const double> values) {
    std::string out = "[";
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ',';
        out += format_real(values[i]);
    }
    return out + "]";
}

std::string bbox_array(const BBox& b) {
    const double v[4] = {b.x, b.y, b.w, b.h};
    return real_array(v);
}

std::string mask_value(const std::optional<BinaryMask>& m) { return m ? json_string(to_rle_string(*m)) : "null"; }

// ---------------------------------------------------------------- reading

std::string join(const std::string& path, std::string_view key) {
    return path.empty() ? std::string(key) : path + "." + std::string(key);
}

std::string index_path(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

const json& require_object(const json& j, const std::string& path) {
    if (!j.is_object()) throw ParseError(path.empty() ? "$" : path, "expected an object");
    return j;
}

const json& field(const json& obj, std::string_view key, const std::string& path) {
    require_object(obj, path);
    auto it = obj.find(std::string(key));
    if (it == obj.end()) throw ParseError(path.empty() ? "$" : path, "missing field '" + std::string(key) + "'");
    return *it;
}

const json* optional_field(const json& obj, std::string_view key) {
    auto it = obj.find(std::string(key));
    return it == obj.end() ? nullptr : &*it;
}

void reject_unknown(const json& obj, std::initializer_list<std::string_view> known, const std::string& path) {
    require_object(obj, path);
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (auto k : known) ok = ok || it.key() == k;
        if (!ok) throw ParseError(path.empty() ? "$" : path, "unknown field '" + it.key() + "'");
    }
}

double real(const json& j, const std::string& path) {
    if (!j.is_number()) throw ParseError(path, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ParseError(path, "expected a finite number");
    return v;
}

long long integer(const json& j, const std::string& path, long long lo = std::numeric_limits<int>::min(),
                  long long hi = std::numeric_limits<int>::max()) {
    long long v = 0;
    if (j.is_number_integer()) {
        if (j.is_number_unsigned() && j.get<unsigned long long>() > static_cast<unsigned long long>(hi))
            throw ParseError(path, "integer out of range");
        v = j.get<long long>();
    } else if (j.is_number_float()) {
        const double d = j.get<double>();
        if (!std::isfinite(d) || d != std::floor(d) || d < static_cast<double>(lo) || d > static_cast<double>(hi))
            throw ParseError(path, "expected an integer");
        v = static_cast<long long>(d);
    } else {
        throw ParseError(path, "expected an integer");
    }
    if (v < lo || v > hi) throw ParseError(path, "integer out of range");
    return v;
}

std::uint64_t unsigned_integer(const json& j, const std::string& path) {
    if (j.is_number_unsigned()) return j.get<std::uint64_t>();
    return static_cast<std::uint64_t>(integer(j, path, 0, std::numeric_limits<long long>::max()));
}

std::size_t size_value(const json& j, const std::string& path) {
    return static_cast<std::size_t>(integer(j, path, 0, std::numeric_limits<int>::max()));
}

bool boolean(const json& j, const std::string& path) {
    if (!j.is_boolean()) throw ParseError(path, "expected true or false");
    return j.get<bool>();
}

const std::string& string_value(const json& j, const std::string& path) {
    if (!j.is_string()) throw ParseError(path, "expected a string");
    return j.get_ref<const std::string&>();
}

const json& array(const json& j, const std::string& path) {
    if (!j.is_array()) throw ParseError(path, "expected an array");
    return j;
}

std::vector<double> real_vector(const json& j, const std::string& path) {
    array(j, path);
    std::vector<double> out;
    out.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(real(j[i], index_path(path, i)));
    return out;
}

BBox bbox_value(const json& j, const std::string& path) {
    const auto v = real_vector(j, path);
    if (v.size() != 4) throw ParseError(path, "expected [x, y, w, h]");
    const BBox b{v[0], v[1], v[2], v[3]};
    if (!is_valid(b)) throw ParseError(path, "box width and height must be positive");
    return b;
}

std::optional<BinaryMask> mask_field(const json& obj, const std::string& path) {
    const json* m = optional_field(obj, "mask");
    if (!m || m->is_null()) return std::nullopt;
    const std::string p = join(path, "mask");
    try {
        return parse_rle_string(string_value(*m, p));
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        throw ParseError(p, e.what());
    }
}

json parse_json(std::string_view text, const std::string& location) {
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::exception& e) {
        throw ParseError(location, std::string("malformed JSON: ") + e.what());
    }
}

void check_version(const json& doc) {
    const long long version = integer(field(doc, "format_version", ""), "format_version");
    if (version != kFormatVersion)
        throw ParseError("format_version",
                         "unsupported format version " + std::to_string(version) + " (expected " +
                             std::to_string(kFormatVersion) + ")");
}

Detection parse_detection(const json& j, const std::string& path) {
    reject_unknown(j, {"bbox", "conf", "embedding", "mask"}, path);
    Detection d;
    d.bbox = bbox_value(field(j, "bbox", path), join(path, "bbox"));
    d.conf = real(field(j, "conf", path), join(path, "conf"));
    if (d.conf < 0.0 || d.conf > 1.0) throw ParseError(join(path, "conf"), "conf out of range");
    d.embedding = real_vector(field(j, "embedding", path), join(path, "embedding"));
    if (d.embedding.empty()) throw ParseError(join(path, "embedding"), "embedding must not be empty");
    d.mask = mask_field(j, path);
    return d;
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    return in;
}

} // namespace

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in = open_input(path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error("failed writing " + path.string());
}

// ---------------------------------------------------------------- detection streams

std::string detection_stream_line(const FrameDetections& frame) {
    std::string out = "{\"frame\":" + std::to_string(frame.frame) + ",\"detections\":[";
    for (std::size_t i = 0; i < frame.detections.size(); ++i) {
        const Detection& d = frame.detections[i];
        if (i) out += ',';
        out += "{\"bbox\":" + bbox_array(d.bbox) + ",\"conf\":" + format_real(d.conf) +
               ",\"embedding\":" + real_array(d.embedding) + ",\"mask\":" + mask_value(d.mask) + "}";
    }
    return out + "]}";
}

void write_detection_stream(std::ostream& out, const std::vector<FrameDetections>& frames) {
    for (const auto& f : frames) out << detection_stream_line(f) << '\n';
}

std::string detection_stream_string(const std::vector<FrameDetections>& frames) {
    std::ostringstream s;
    write_detection_stream(s, frames);
    return s.str();
}

void write_detection_stream(const std::filesystem::path& path, const std::vector<FrameDetections>& frames) {
    write_file(path, detection_stream_string(frames));
}

std::vector<FrameDetections> parse_detection_stream(std::istream& in) {
    std::vector<FrameDetections> frames;
    std::size_t dim = 0;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const std::string where = "line " + std::to_string(line_no);
        try {
            const json j = parse_json(line, "");
            reject_unknown(j, {"frame", "detections"}, "");
            FrameDetections f;
            f.frame = static_cast<int>(integer(field(j, "frame", ""), "frame"));
            if (!frames.empty() && f.frame <= frames.back().frame)
                throw ParseError("frame", "frame " + std::to_string(f.frame) + " does not increase (previous " +
                                              std::to_string(frames.back().frame) + ")");
            const json& dets = array(field(j, "detections", ""), "detections");
            for (std::size_t i = 0; i < dets.size(); ++i) {
                const std::string p = index_path("detections", i);
                Detection d = parse_detection(dets[i], p);
                if (dim == 0) dim = d.embedding.size();
                if (d.embedding.size() != dim)
                    throw ParseError(join(p, "embedding"), "embedding dimension " + std::to_string(d.embedding.size()) +
                                                               " differs from " + std::to_string(dim));
                f.detections.push_back(std::move(d));
            }
            frames.push_back(std::move(f));
        } catch (const ParseError& e) {
            throw ParseError(where, e.what());
        } catch (const json::exception& e) {
            throw ParseError(where, e.what());
        }
    }
    return frames;
}

std::vector<FrameDetections> parse_detection_stream_string(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse_detection_stream(in);
}

std::vector<FrameDetections> parse_detection_stream(const std::filesystem::path& path) {
    std::ifstream in = open_input(path);
    return parse_detection_stream(in);
}

std::vector<Detection> parse_first_frame(const std::filesystem::path& path, int* frame) {
    auto frames = parse_detection_stream(path);
    if (frames.size() != 1)
        throw ParseError(path.string(), "first-frame file must hold exactly one frame record, found " +
                                            std::to_string(frames.size()));
    if (frame) *frame = frames[0].frame;
    return std::move(frames[0].detections);
}

// ---------------------------------------------------------------- trajectories

std::string trajectories_json(const TrackOutput& output) {
    if (!output.banks.empty() && output.banks.size() != output.trajectories.size())
        throw Error("bank list must be empty or parallel to the trajectory list");
    std::string out = "{\n  \"format_version\": " + std::to_string(kFormatVersion) + ",\n  \"targets\": [";
    for (std::size_t k = 0; k < output.trajectories.size(); ++k) {
        const Trajectory& t = output.trajectories[k];
        out += k ? ",\n" : "\n";
        out += "    {\n      \"id\": " + std::to_string(t.target_id) + ",\n      \"entries\": [";
        for (std::size_t i = 0; i < t.entries.size(); ++i) {
            const auto& e = t.entries[i];
            out += i ? ",\n" : "\n";
            out += "        {\"frame\": " + std::to_string(e.frame) + ", \"bbox\": " + bbox_array(e.bbox) +
                   ", \"mask\": " + mask_value(e.mask) + ", \"weight\": " + format_real(e.weight) + "}";
        }
        out += t.entries.empty() ? "]" : "\n      ]";
        if (!output.banks.empty()) {
            const TemplateBank& b = output.banks[k];
            out += ",\n      \"bank\": {\"capacity\": " + std::to_string(b.capacity()) + ", \"templates\": [";
            for (std::size_t i = 0; i < b.size(); ++i) {
                out += i ? ",\n" : "\n";
                out += "        {\"born_frame\": " + std::to_string(b[i].born_frame) +
                       ", \"use_count\": " + std::to_string(b[i].use_count) +
                       ", \"embedding\": " + real_array(b[i].embedding) + "}";
            }
            out += "\n      ]}";
        }
        out += "\n    }";
    }
    out += output.trajectories.empty() ? "]\n}\n" : "\n  ]\n}\n";
    return out;
}

void write_trajectories(const std::filesystem::path& path, const TrackOutput& output) {
    write_file(path, trajectories_json(output));
}

TrackOutput parse_trajectories_json(std::string_view text) {
    const json doc = parse_json(text, "$");
    require_object(doc, "");
    reject_unknown(doc, {"format_version", "targets"}, "");
    check_version(doc);
    TrackOutput out;
    const json& targets = array(field(doc, "targets", ""), "targets");
    bool any_bank = false, all_banks = true;
    std::vector<TemplateBank> banks;
    for (std::size_t k = 0; k < targets.size(); ++k) {
        const std::string p = index_path("targets", k);
        const json& t = targets[k];
        reject_unknown(t, {"id", "entries", "bank"}, p);
        Trajectory traj;
        traj.target_id = static_cast<int>(integer(field(t, "id", p), join(p, "id")));
        const json& entries = array(field(t, "entries", p), join(p, "entries"));
        for (std::size_t i = 0; i < entries.size(); ++i) {
            const std::string ep = index_path(join(p, "entries"), i);
            reject_unknown(entries[i], {"frame", "bbox", "mask", "weight"}, ep);
            TrajectoryEntry e;
            e.frame = static_cast<int>(integer(field(entries[i], "frame", ep), join(ep, "frame")));
            if (!traj.entries.empty() && e.frame <= traj.entries.back().frame)
                throw ParseError(join(ep, "frame"), "entry frames must strictly increase");
            e.bbox = bbox_value(field(entries[i], "bbox", ep), join(ep, "bbox"));
            e.mask = mask_field(entries[i], ep);
            e.weight = real(field(entries[i], "weight", ep), join(ep, "weight"));
            traj.entries.push_back(std::move(e));
        }
        if (const json* b = optional_field(t, "bank")) {
            any_bank = true;
            const std::string bp = join(p, "bank");
            reject_unknown(*b, {"capacity", "templates"}, bp);
            const std::size_t capacity = size_value(field(*b, "capacity", bp), join(bp, "capacity"));
            const json& templates = array(field(*b, "templates", bp), join(bp, "templates"));
            std::vector<Template> ts;
            for (std::size_t i = 0; i < templates.size(); ++i) {
                const std::string tp = index_path(join(bp, "templates"), i);
                reject_unknown(templates[i], {"born_frame", "use_count", "embedding"}, tp);
                Template tmpl;
                tmpl.born_frame = static_cast<int>(integer(field(templates[i], "born_frame", tp), join(tp, "born_frame")));
                tmpl.use_count = unsigned_integer(field(templates[i], "use_count", tp), join(tp, "use_count"));
                tmpl.embedding = real_vector(field(templates[i], "embedding", tp), join(tp, "embedding"));
                ts.push_back(std::move(tmpl));
            }
            try {
                banks.emplace_back(capacity, std::move(ts));
            } catch (const Error& e) {
                throw ParseError(bp, e.what());
            }
        } else {
            all_banks = false;
        }
        out.trajectories.push_back(std::move(traj));
    }
    if (any_bank && !all_banks) throw ParseError("targets", "either every target or no target carries a bank");
    out.banks = std::move(banks);
    return out;
}

TrackOutput parse_trajectories(const std::filesystem::path& path) { return parse_trajectories_json(read_file(path)); }

// ---------------------------------------------------------------- ground truth

std::string ground_truth_json(const GroundTruth& gt) {
    std::string out = "{\n  \"format_version\": " + std::to_string(kFormatVersion) +
                      ",\n  \"width\": " + std::to_string(gt.width) + ",\n  \"height\": " + std::to_string(gt.height) +
                      ",\n  \"num_frames\": " + std::to_string(gt.num_frames) + ",\n  \"objects\": [";
    for (std::size_t o = 0; o < gt.objects.size(); ++o) {
        out += o ? ",\n" : "\n";
        out += "    {\"id\": " + std::to_string(o) + ", \"frames\": [";
        for (std::size_t t = 0; t < gt.objects[o].size(); ++t) {
            const auto& s = gt.objects[o][t];
            out += t ? ",\n" : "\n";
            out += "      {\"frame\": " + std::to_string(t) + ", \"visible\": " + (s.visible ? "true" : "false") +
                   ", \"bbox\": " + bbox_array(s.bbox) + ", \"embedding\": " + real_array(s.embedding) + "}";
        }
        out += "\n    ]}";
    }
    out += gt.objects.empty() ? "]\n}\n" : "\n  ]\n}\n";
    return out;
}

GroundTruth parse_ground_truth_json(std::string_view text) {
    const json doc = parse_json(text, "$");
    require_object(doc, "");
    reject_unknown(doc, {"format_version", "width", "height", "num_frames", "objects"}, "");
    check_version(doc);
    GroundTruth gt;
    gt.width = size_value(field(doc, "width", ""), "width");
    gt.height = size_value(field(doc, "height", ""), "height");
    if (gt.width == 0 || gt.height == 0 ||
        static_cast<std::uint64_t>(gt.width) * gt.height > BinaryMask::kMaxPixels)
        throw ParseError("width", "grid dimensions out of range");
    gt.num_frames = static_cast<int>(integer(field(doc, "num_frames", ""), "num_frames", 1));
    const json& objects = array(field(doc, "objects", ""), "objects");
    for (std::size_t o = 0; o < objects.size(); ++o) {
        const std::string p = index_path("objects", o);
        reject_unknown(objects[o], {"id", "frames"}, p);
        if (integer(field(objects[o], "id", p), join(p, "id")) != static_cast<long long>(o))
            throw ParseError(join(p, "id"), "object ids must be 0..N-1 in order");
        const json& frames = array(field(objects[o], "frames", p), join(p, "frames"));
        if (frames.size() != static_cast<std::size_t>(gt.num_frames))
            throw ParseError(join(p, "frames"), "expected one record per frame");
        std::vector<GroundTruthState> states;
        for (std::size_t t = 0; t < frames.size(); ++t) {
            const std::string fp = index_path(join(p, "frames"), t);
            reject_unknown(frames[t], {"frame", "visible", "bbox", "embedding"}, fp);
            if (integer(field(frames[t], "frame", fp), join(fp, "frame")) != static_cast<long long>(t))
                throw ParseError(join(fp, "frame"), "frame records must be 0..T-1 in order");
            GroundTruthState s;
            s.visible = boolean(field(frames[t], "visible", fp), join(fp, "visible"));
            s.bbox = bbox_value(field(frames[t], "bbox", fp), join(fp, "bbox"));
            s.embedding = real_vector(field(frames[t], "embedding", fp), join(fp, "embedding"));
            states.push_back(std::move(s));
        }
        gt.objects.push_back(std::move(states));
    }
    return gt;
}

GroundTruth parse_ground_truth(const std::filesystem::path& path) { return parse_ground_truth_json(read_file(path)); }

// ---------------------------------------------------------------- run config

std::string run_config_json(const RunConfig& c) {
    const auto& t = c.thresholds;
    return "{\n  \"mode\": " + json_string(to_string(c.mode)) + ",\n  \"sigma_det\": " + format_real(t.sigma_det) +
           ",\n  \"sigma_conf\": " + format_real(t.sigma_conf) + ",\n  \"sigma_app\": " + format_real(t.sigma_app) +
           ",\n  \"min_match_weight\": " + format_real(t.min_match_weight) +
           ",\n  \"momentum\": " + format_real(t.momentum) + ",\n  \"bank_capacity\": " + std::to_string(c.bank_capacity) +
           ",\n  \"embedding_dim\": " + std::to_string(c.embedding_dim) +
           ",\n  \"boundary_tolerance\": " + std::to_string(c.boundary_tolerance) +
           ",\n  \"id_switch_iou_floor\": " + format_real(c.id_switch_iou_floor) + ",\n  \"seed\": " +
           std::to_string(c.seed) + "\n}\n";
}

RunConfig parse_run_config_json(std::string_view text) {
    const json doc = parse_json(text, "$");
    reject_unknown(doc,
                   {"mode", "sigma_det", "sigma_conf", "sigma_app", "min_match_weight", "momentum", "bank_capacity",
                    "embedding_dim", "boundary_tolerance", "id_switch_iou_floor", "seed"},
                   "");
    RunConfig c;
    if (const json* m = optional_field(doc, "mode")) {
        try {
            c.mode = parse_tracking_mode(string_value(*m, "mode"));
        } catch (const ConfigError& e) {
            throw ParseError("mode", e.what());
        }
    }
    auto opt_real = [&](std::string_view key, double& target) {
        if (const json* v = optional_field(doc, key)) target = real(*v, std::string(key));
    };
    opt_real("sigma_det", c.thresholds.sigma_det);
    opt_real("sigma_conf", c.thresholds.sigma_conf);
    opt_real("sigma_app", c.thresholds.sigma_app);
    opt_real("min_match_weight", c.thresholds.min_match_weight);
    if (c.mode == TrackingMode::MovingAverage && !optional_field(doc, "momentum"))
        throw ParseError("$", "missing field 'momentum' (required in moving_average mode)");
    opt_real("momentum", c.thresholds.momentum);
    opt_real("id_switch_iou_floor", c.id_switch_iou_floor);
    if (const json* v = optional_field(doc, "bank_capacity")) c.bank_capacity = size_value(*v, "bank_capacity");
    if (const json* v = optional_field(doc, "embedding_dim")) c.embedding_dim = size_value(*v, "embedding_dim");
    if (const json* v = optional_field(doc, "boundary_tolerance"))
        c.boundary_tolerance = size_value(*v, "boundary_tolerance");
    if (const json* v = optional_field(doc, "seed")) c.seed = unsigned_integer(*v, "seed");
    try {
        validate(c);
    } catch (const ConfigError& e) {
        throw ParseError("$", e.what());
    }
    return c;
}

RunConfig parse_run_config(const std::filesystem::path& path) { return parse_run_config_json(read_file(path)); }

// ---------------------------------------------------------------- scenario config

std::string scenario_config_json(const ScenarioConfig& c) {
    std::string out = "{\n  \"num_objects\": " + std::to_string(c.num_objects) +
                      ",\n  \"num_frames\": " + std::to_string(c.num_frames) + ",\n  \"scene\": [" +
                      std::to_string(c.scene_width) + "," + std::to_string(c.scene_height) +
                      "],\n  \"embedding_dim\": " + std::to_string(c.embedding_dim) + ",\n  \"motion\": [";
    for (std::size_t i = 0; i < c.motion.size(); ++i) {
        const auto& m = c.motion[i];
        out += i ? ",\n    " : "\n    ";
        out += "{\"x0\": " + format_real(m.x0) + ", \"y0\": " + format_real(m.y0) + ", \"w\": " + format_real(m.w) +
               ", \"h\": " + format_real(m.h) + ", \"vx\": " + format_real(m.vx) + ", \"vy\": " + format_real(m.vy) +
               ", \"amplitude_x\": " + format_real(m.amplitude_x) + ", \"amplitude_y\": " + format_real(m.amplitude_y) +
               ", \"period\": " + format_real(m.period) + "}";
    }
    out += "\n  ],\n  \"base_embeddings\": [";
    for (std::size_t i = 0; i < c.base_embeddings.size(); ++i) out += (i ? ", " : "") + real_array(c.base_embeddings[i]);
    out += "],\n  \"drift_events\": [";
    for (std::size_t i = 0; i < c.drift_events.size(); ++i) {
        const auto& d = c.drift_events[i];
        out += (i ? ", " : "") + std::string("{\"object\": ") + std::to_string(d.object) +
               ", \"frame\": " + std::to_string(d.frame) + ", \"direction\": " + real_array(d.direction) +
               ", \"blend_rate\": " + format_real(d.blend_rate) + "}";
    }
    out += "],\n  \"occlusion_windows\": [";
    for (std::size_t i = 0; i < c.occlusion_windows.size(); ++i) {
        const auto& w = c.occlusion_windows[i];
        out += (i ? ", " : "") + std::string("{\"object\": ") + std::to_string(w.object) +
               ", \"first_frame\": " + std::to_string(w.first_frame) + ", \"last_frame\": " + std::to_string(w.last_frame) +
               "}";
    }
    out += "],\n  \"fp_rate\": " + format_real(c.fp_rate) + ",\n  \"box_jitter_sigma\": " + format_real(c.box_jitter_sigma) +
           ",\n  \"embedding_noise\": " + format_real(c.embedding_noise) + ",\n  \"conf_model\": {\"matched_mean\": " +
           format_real(c.conf_model.matched_mean) + ", \"fp_mean\": " + format_real(c.conf_model.fp_mean) +
           ", \"spread\": " + format_real(c.conf_model.spread) + "},\n  \"miss_rate\": " + format_real(c.miss_rate) +
           ",\n  \"shuffle_detections\": " + (c.shuffle_detections ? "true" : "false") +
           ",\n  \"emit_masks\": " + (c.emit_masks ? "true" : "false") + ",\n  \"seed\": " + std::to_string(c.seed) +
           "\n}\n";
    return out;
}

ScenarioConfig parse_scenario_config_json(std::string_view text) {
    const json doc = parse_json(text, "$");
    reject_unknown(doc,
                   {"num_objects", "num_frames", "scene", "embedding_dim", "motion", "base_embeddings", "drift_events",
                    "occlusion_windows", "fp_rate", "box_jitter_sigma", "embedding_noise", "conf_model", "miss_rate",
                    "shuffle_detections", "emit_masks", "seed"},
                   "");
    ScenarioConfig c;
    c.num_objects = size_value(field(doc, "num_objects", ""), "num_objects");
    c.num_frames = static_cast<int>(integer(field(doc, "num_frames", ""), "num_frames"));
    const auto scene = real_vector(field(doc, "scene", ""), "scene");
    if (scene.size() != 2 || scene[0] < 1 || scene[1] < 1 || scene[0] != std::floor(scene[0]) ||
        scene[1] != std::floor(scene[1]) || scene[0] > 1e8 || scene[1] > 1e8)
        throw ParseError("scene", "expected [width, height] as positive integers");
    c.scene_width = static_cast<std::size_t>(scene[0]);
    c.scene_height = static_cast<std::size_t>(scene[1]);
    c.embedding_dim = size_value(field(doc, "embedding_dim", ""), "embedding_dim");
    const json& motion = array(field(doc, "motion", ""), "motion");
    for (std::size_t i = 0; i < motion.size(); ++i) {
        const std::string p = index_path("motion", i);
        reject_unknown(motion[i], {"x0", "y0", "w", "h", "vx", "vy", "amplitude_x", "amplitude_y", "period"}, p);
        ObjectMotion m;
        m.x0 = real(field(motion[i], "x0", p), join(p, "x0"));
        m.y0 = real(field(motion[i], "y0", p), join(p, "y0"));
        m.w = real(field(motion[i], "w", p), join(p, "w"));
        m.h = real(field(motion[i], "h", p), join(p, "h"));
        auto opt = [&](std::string_view key, double& target) {
            if (const json* v = optional_field(motion[i], key)) target = real(*v, join(p, key));
        };
        opt("vx", m.vx);
        opt("vy", m.vy);
        opt("amplitude_x", m.amplitude_x);
        opt("amplitude_y", m.amplitude_y);
        opt("period", m.period);
        c.motion.push_back(m);
    }
    if (const json* b = optional_field(doc, "base_embeddings")) {
        array(*b, "base_embeddings");
        for (std::size_t i = 0; i < b->size(); ++i)
            c.base_embeddings.push_back(real_vector((*b)[i], index_path("base_embeddings", i)));
    }
    if (const json* d = optional_field(doc, "drift_events")) {
        array(*d, "drift_events");
        for (std::size_t i = 0; i < d->size(); ++i) {
            const std::string p = index_path("drift_events", i);
            const json& e = (*d)[i];
            reject_unknown(e, {"object", "frame", "direction", "blend_rate"}, p);
            DriftEvent ev;
            ev.object = size_value(field(e, "object", p), join(p, "object"));
            ev.frame = static_cast<int>(integer(field(e, "frame", p), join(p, "frame")));
            if (const json* dir = optional_field(e, "direction")) ev.direction = real_vector(*dir, join(p, "direction"));
            ev.blend_rate = real(field(e, "blend_rate", p), join(p, "blend_rate"));
            c.drift_events.push_back(std::move(ev));
        }
    }
    if (const json* w = optional_field(doc, "occlusion_windows")) {
        array(*w, "occlusion_windows");
        for (std::size_t i = 0; i < w->size(); ++i) {
            const std::string p = index_path("occlusion_windows", i);
            const json& e = (*w)[i];
            reject_unknown(e, {"object", "first_frame", "last_frame"}, p);
            c.occlusion_windows.push_back(OcclusionWindow{size_value(field(e, "object", p), join(p, "object")),
                                                          static_cast<int>(integer(field(e, "first_frame", p), join(p, "first_frame"))),
                                                          static_cast<int>(integer(field(e, "last_frame", p), join(p, "last_frame")))});
        }
    }
    auto opt_real = [&](std::string_view key, double& target) {
        if (const json* v = optional_field(doc, key)) target = real(*v, std::string(key));
    };
    opt_real("fp_rate", c.fp_rate);
    opt_real("box_jitter_sigma", c.box_jitter_sigma);
    opt_real("embedding_noise", c.embedding_noise);
    opt_real("miss_rate", c.miss_rate);
    if (const json* m = optional_field(doc, "conf_model")) {
        reject_unknown(*m, {"matched_mean", "fp_mean", "spread"}, "conf_model");
        if (const json* v = optional_field(*m, "matched_mean")) c.conf_model.matched_mean = real(*v, "conf_model.matched_mean");
        if (const json* v = optional_field(*m, "fp_mean")) c.conf_model.fp_mean = real(*v, "conf_model.fp_mean");
        if (const json* v = optional_field(*m, "spread")) c.conf_model.spread = real(*v, "conf_model.spread");
    }
    if (const json* v = optional_field(doc, "shuffle_detections")) c.shuffle_detections = boolean(*v, "shuffle_detections");
    if (const json* v = optional_field(doc, "emit_masks")) c.emit_masks = boolean(*v, "emit_masks");
    if (const json* v = optional_field(doc, "seed")) c.seed = unsigned_integer(*v, "seed");
    try {
        validate(c);
    } catch (const ConfigError& e) {
        throw ParseError("$", e.what());
    }
    return c;
}

ScenarioConfig parse_scenario_config(const std::filesystem::path& path) {
    return parse_scenario_config_json(read_file(path));
}

// ---------------------------------------------------------------- reports

std::string report_csv(const EvalReport& report) {
    std::string out = "object,frame,j,f,attributed\n";
    for (const auto& s : report.scores) {
        out += std::to_string(s.object) + "," + std::to_string(s.frame) + "," + format_real(s.j) + "," + format_real(s.f) +
               "," + (s.attributed ? std::to_string(*s.attributed) : "") + "\n";
    }
    return out;
}

std::string report_json(const EvalReport& report) {
    std::string per_object = "[";
    std::size_t objects = 0;
    for (const auto& s : report.scores) objects = std::max(objects, s.object + 1);
    for (std::size_t o = 0; o < objects; ++o) {
        double sum = 0.0;
        std::size_t n = 0;
        for (const auto& s : report.scores)
            if (s.object == o) {
                sum += s.j;
                ++n;
            }
        per_object += (o ? "," : "") + format_real(n ? sum / static_cast<double>(n) : 1.0);
    }
    per_object += "]";
    return "{\n  \"j_mean\": " + format_real(report.j_mean) + ",\n  \"f_mean\": " + format_real(report.f_mean) +
           ",\n  \"jf_mean\": " + format_real(report.jf_mean) + ",\n  \"id_switches\": " +
           std::to_string(report.id_switches) + ",\n  \"track_recall\": " + format_real(report.track_recall) +
           ",\n  \"per_object_j_mean\": " + per_object + ",\n  \"object_frames\": " +
           std::to_string(report.scores.size()) + "\n}\n";
}

} // namespace dttm::io
