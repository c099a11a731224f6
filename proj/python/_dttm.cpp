#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dttm/assignment.hpp"
#include "dttm/bench.hpp"
#include "dttm/error.hpp"
#include "dttm/io.hpp"
#include "dttm/matching.hpp"
#include "dttm/metrics.hpp"
#include "dttm/simulator.hpp"
#include "dttm/tan_fusion.hpp"
#include "dttm/template_bank.hpp"
#include "dttm/tracker.hpp"

namespace py = pybind11;
using namespace dttm;

namespace {

WeightMatrix to_matrix(const std::vector<std::vector<double>>& rows) {
    const std::size_t cols = rows.empty() ? 0 : rows[0].size();
    std::vector<double> flat;
    for (const auto& r : rows) {
        if (r.size() != cols) throw ShapeError("weight rows differ in length");
        flat.insert(flat.end(), r.begin(), r.end());
    }
    return WeightMatrix(rows.size(), cols, std::move(flat));
}

} // namespace

PYBIND11_MODULE(_dttm, m) {
    m.doc() = "Online multi-object tracking with time-evolving template banks";

    auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", error.ptr());
    py::register_exception<ShapeError>(m, "ShapeError", error.ptr());
    py::register_exception<ParseError>(m, "ParseError", error.ptr());

    py::class_<BBox>(m, "BBox")
        .def(py::init([](double x, double y, double w, double h) { return make_bbox(x, y, w, h); }), py::arg("x"),
             py::arg("y"), py::arg("w"), py::arg("h"))
        .def_readwrite("x", &BBox::x)
        .def_readwrite("y", &BBox::y)
        .def_readwrite("w", &BBox::w)
        .def_readwrite("h", &BBox::h)
        .def("area", &BBox::area)
        .def(py::self == py::self)
        .def("__repr__", [](const BBox& b) {
            return "BBox(" + io::format_real(b.x) + ", " + io::format_real(b.y) + ", " + io::format_real(b.w) + ", " +
                   io::format_real(b.h) + ")";
        });
    m.def("iou", &iou);

    py::class_<BinaryMask>(m, "BinaryMask")
        .def(py::init<std::size_t, std::size_t, std::vector<std::uint32_t>>(), py::arg("width"), py::arg("height"),
             py::arg("runs"))
        .def_property_readonly("width", &BinaryMask::width)
        .def_property_readonly("height", &BinaryMask::height)
        .def_property_readonly("runs", &BinaryMask::runs)
        .def("count", &BinaryMask::count)
        .def("to_bits", [](const BinaryMask& mk) { return rle_decode(mk).bits; })
        .def(py::self == py::self)
        .def("__str__", &to_rle_string);
    m.def(
        "rle_encode",
        [](std::size_t w, std::size_t h, const std::vector<std::uint8_t>& bits) {
            if (bits.size() != w * h) throw ShapeError("bits: expected width * height values");
            BitGrid g(w, h);
            for (std::size_t i = 0; i < bits.size(); ++i) g.bits[i] = bits[i] != 0;
            return rle_encode(g);
        },
        py::arg("width"), py::arg("height"), py::arg("bits"));
    m.def("parse_rle_string", [](const std::string& s) { return parse_rle_string(s); });
    m.def("mask_iou", &mask_iou);
    m.def("rasterize_box", &rasterize_box, py::arg("box"), py::arg("width"), py::arg("height"));

    m.def("solve_max_assignment", [](const std::vector<std::vector<double>>& w) { return solve_max_assignment(to_matrix(w)).pairs; });
    m.def("brute_force_assignment", [](const std::vector<std::vector<double>>& w) { return brute_force_assignment(to_matrix(w)).pairs; });
    m.def("cosine_similarity", [](const std::vector<double>& u, const std::vector<double>& v) { return cosine_similarity(u, v); });

    py::class_<Detection>(m, "Detection")
        .def(py::init([](BBox b, double conf, Embedding e, std::optional<BinaryMask> mask) {
                 Detection d{b, conf, std::move(e), std::move(mask)};
                 validate(d);
                 return d;
             }),
             py::arg("bbox"), py::arg("conf"), py::arg("embedding"), py::arg("mask") = std::nullopt)
        .def_readonly("bbox", &Detection::bbox)
        .def_readonly("conf", &Detection::conf)
        .def_readonly("embedding", &Detection::embedding)
        .def_readonly("mask", &Detection::mask);

    py::class_<Template>(m, "Template")
        .def_readonly("embedding", &Template::embedding)
        .def_readonly("born_frame", &Template::born_frame)
        .def_readonly("use_count", &Template::use_count);
    py::class_<TemplateBank>(m, "TemplateBank")
        .def_property_readonly("capacity", &TemplateBank::capacity)
        .def_property_readonly("templates", &TemplateBank::templates)
        .def("__len__", &TemplateBank::size);
    py::class_<MatchingThresholds>(m, "MatchingThresholds")
        .def(py::init<>())
        .def_readwrite("sigma_det", &MatchingThresholds::sigma_det)
        .def_readwrite("sigma_conf", &MatchingThresholds::sigma_conf)
        .def_readwrite("sigma_app", &MatchingThresholds::sigma_app)
        .def_readwrite("min_match_weight", &MatchingThresholds::min_match_weight)
        .def_readwrite("momentum", &MatchingThresholds::momentum);
    m.def("init_bank", &init_bank, py::arg("gt"), py::arg("capacity"), py::arg("frame") = 0);
    m.def(
        "dttm_update",
        [](const TemplateBank& bank, const Detection& d, const MatchingThresholds& th, int frame) {
            return dttm_update(bank, d, appearance_weight(bank, d), th, frame).bank;
        },
        py::arg("bank"), py::arg("detection"), py::arg("thresholds"), py::arg("frame"));
    m.def(
        "moving_average_update",
        [](const Embedding& e, const Embedding& obs, double mnt) { return moving_average_update(Template{e, 0, 0}, obs, mnt).embedding; },
        py::arg("embedding"), py::arg("observation"), py::arg("momentum"));

    py::class_<RunConfig>(m, "RunConfig")
        .def(py::init([](const std::string& mode) {
                 RunConfig c;
                 c.mode = parse_tracking_mode(mode);
                 return c;
             }),
             py::arg("mode") = "dttm")
        .def_property(
            "mode", [](const RunConfig& c) { return std::string(to_string(c.mode)); },
            [](RunConfig& c, const std::string& s) { c.mode = parse_tracking_mode(s); })
        .def_readwrite("thresholds", &RunConfig::thresholds)
        .def_readwrite("bank_capacity", &RunConfig::bank_capacity);

    py::class_<TrajectoryEntry>(m, "TrajectoryEntry")
        .def_readonly("frame", &TrajectoryEntry::frame)
        .def_readonly("bbox", &TrajectoryEntry::bbox)
        .def_readonly("mask", &TrajectoryEntry::mask)
        .def_readonly("weight", &TrajectoryEntry::weight);
    py::class_<Trajectory>(m, "Trajectory")
        .def_readonly("target_id", &Trajectory::target_id)
        .def_readonly("entries", &Trajectory::entries);
    py::class_<Match>(m, "Match")
        .def_readonly("target_id", &Match::target_id)
        .def_readonly("detection_index", &Match::detection_index)
        .def_readonly("weight", &Match::weight);
    py::class_<FrameResult>(m, "FrameResult")
        .def_readonly("frame", &FrameResult::frame)
        .def_readonly("matches", &FrameResult::matches)
        .def_readonly("unmatched_targets", &FrameResult::unmatched_targets)
        .def_readonly("unmatched_detections", &FrameResult::unmatched_detections);
    py::class_<TrackedTarget>(m, "TrackedTarget")
        .def_readonly("id", &TrackedTarget::id)
        .def_readonly("bank", &TrackedTarget::bank)
        .def_readonly("last_box", &TrackedTarget::last_box);

    py::class_<Tracker>(m, "Tracker")
        .def(py::init([](const std::vector<Detection>& gt, const RunConfig& config) {
                 return Tracker::init_from_first_frame(gt, config);
             }),
             py::arg("first_frame"), py::arg("config") = RunConfig{})
        .def("step", [](Tracker& t, int frame, const std::vector<Detection>& dets) { return t.step(frame, dets); })
        .def_property_readonly("targets", &Tracker::targets)
        .def_property_readonly("trajectories", &Tracker::trajectories);

    py::class_<FrameDetections>(m, "FrameDetections")
        .def_readonly("frame", &FrameDetections::frame)
        .def_readonly("detections", &FrameDetections::detections);
    py::class_<ScenarioConfig>(m, "ScenarioConfig")
        .def_readwrite("num_frames", &ScenarioConfig::num_frames)
        .def_readwrite("seed", &ScenarioConfig::seed)
        .def_readwrite("fp_rate", &ScenarioConfig::fp_rate)
        .def_readwrite("miss_rate", &ScenarioConfig::miss_rate)
        .def_readwrite("box_jitter_sigma", &ScenarioConfig::box_jitter_sigma)
        .def_readwrite("embedding_noise", &ScenarioConfig::embedding_noise)
        .def_readonly("num_objects", &ScenarioConfig::num_objects)
        .def_readonly("embedding_dim", &ScenarioConfig::embedding_dim);
    py::class_<GroundTruth>(m, "GroundTruth")
        .def_readonly("width", &GroundTruth::width)
        .def_readonly("height", &GroundTruth::height)
        .def_readonly("num_frames", &GroundTruth::num_frames)
        .def("box", [](const GroundTruth& g, std::size_t o, int f) { return g.objects.at(o).at(static_cast<std::size_t>(f)).bbox; })
        .def("mask", &GroundTruth::mask);
    py::class_<Scenario>(m, "Scenario")
        .def_readonly("truth", &Scenario::truth)
        .def_readonly("first_frame", &Scenario::first_frame)
        .def_readonly("stream", &Scenario::stream);
    m.def("preset_names", &preset_names);
    m.def("preset", [](const std::string& name) { return preset(name); });
    m.def("generate", &generate);

    m.def(
        "track",
        [](const Scenario& s, const RunConfig& config) {
            Tracker t = Tracker::init_from_first_frame(s.first_frame, config);
            return run(t, s.stream).trajectories;
        },
        py::arg("scenario"), py::arg("config") = RunConfig{});

    py::class_<EvalReport>(m, "EvalReport")
        .def_readonly("j_mean", &EvalReport::j_mean)
        .def_readonly("f_mean", &EvalReport::f_mean)
        .def_readonly("jf_mean", &EvalReport::jf_mean)
        .def_readonly("id_switches", &EvalReport::id_switches)
        .def_readonly("track_recall", &EvalReport::track_recall);
    m.def("evaluate", [](const std::vector<Trajectory>& trajs, const GroundTruth& gt) { return evaluate(trajs, gt); });
    m.def("id_switches", [](const std::vector<Trajectory>& trajs, const GroundTruth& gt, double floor) {
        return id_switches(trajs, gt, floor);
    }, py::arg("trajectories"), py::arg("truth"), py::arg("iou_floor") = 0.5);

    m.def("run_tan_checks", [](std::uint64_t seed) {
        std::vector<std::tuple<std::string, bool, std::string>> out;
        for (const auto& c : tan::run_tan_checks(seed)) out.emplace_back(c.name, c.passed, c.detail);
        return out;
    }, py::arg("seed") = 7);

    py::class_<BenchResult>(m, "BenchResult")
        .def_readonly("frames", &BenchResult::frames)
        .def_readonly("targets", &BenchResult::targets)
        .def_readonly("embedding_dim", &BenchResult::embedding_dim)
        .def_readonly("total_seconds", &BenchResult::total_seconds)
        .def_readonly("ms_per_frame", &BenchResult::ms_per_frame);
    m.def("run_benchmark", [](const std::string& name, std::size_t frames, const RunConfig& config) {
        return run_benchmark(name, frames, config);
    }, py::arg("preset") = "dense", py::arg("frames") = 1000, py::arg("config") = RunConfig{});

    m.def("detection_stream_string", &io::detection_stream_string);
    m.def("parse_detection_stream_string", [](const std::string& s) { return io::parse_detection_stream_string(s); });
    m.def("trajectories_json", [](const std::vector<Trajectory>& trajs) { return io::trajectories_json(io::TrackOutput{trajs, {}}); });
}
