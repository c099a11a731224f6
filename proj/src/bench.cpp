#include "dttm/bench.hpp"

#include <chrono>

#include "dttm/simulator.hpp"
#include "dttm/tracker.hpp"

namespace dttm {

BenchResult run_benchmark(const std::string& preset_name, std::size_t frames, const RunConfig& config) {
    ScenarioConfig sc = preset(preset_name);
    if (frames > 0) sc.num_frames = static_cast<int>(frames + 1);
    sc.emit_masks = false;
    const Scenario scenario = generate(sc);

    Tracker tracker = Tracker::init_from_first_frame(scenario.first_frame, config);
    BenchResult r;
    r.targets = scenario.first_frame.size();
    r.embedding_dim = sc.embedding_dim;
    r.frames = scenario.stream.size();
    const auto start = std::chrono::steady_clock::now();
    for (const auto& f : scenario.stream) {
        r.detections += f.detections.size();
        tracker.step(f.frame, f.detections);
    }
    const auto stop = std::chrono::steady_clock::now();
    r.total_seconds = std::chrono::duration<double>(stop - start).count();
    r.ms_per_frame = r.frames ? 1000.0 * r.total_seconds / static_cast<double>(r.frames) : 0.0;
    return r;
}

} // namespace dttm
