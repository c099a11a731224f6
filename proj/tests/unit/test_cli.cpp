#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "cli.hpp"
#include "dttm/io.hpp"

namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code = 0;
    std::string out, err;
};

Outcome cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    args.insert(args.begin(), "dttm");
    const int code = dttm::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("dttm_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("simulate, track and eval pipeline") {
    const fs::path dir = scratch("pipeline");
    const std::string dets = (dir / "dets.jsonl").string(), gt = (dir / "gt.json").string(),
                      first = (dir / "first.jsonl").string(), trajs = (dir / "trajs.json").string(),
                      report = (dir / "report.json").string(), csv = (dir / "report.csv").string();
    REQUIRE(cli({"simulate", "--preset", "crossing", "--out-dets", dets, "--out-gt", gt, "--out-first-frame", first}).code == 0);
    for (const char* mode : {"dttm", "moving_average", "iou_only"}) {
        const Outcome t = cli({"track", "--dets", dets, "--first-frame-gt", first, "--mode", mode, "--out", trajs});
        REQUIRE_MESSAGE(t.code == 0, t.err);
        const Outcome e = cli({"eval", "--trajs", trajs, "--gt", gt, "--out-report", report, "--out-csv", csv});
        REQUIRE_MESSAGE(e.code == 0, e.err);
        const std::string text = dttm::io::read_file(report);
        CHECK(text.find("j_mean") != std::string::npos);
        CHECK(text.find("id_switches") != std::string::npos);
        CHECK(dttm::io::read_file(csv).rfind("object,frame,j,f,attributed", 0) == 0);
    }
    fs::remove_all(dir);
}

TEST_CASE("track output is deterministic") {
    const fs::path dir = scratch("determinism");
    const std::string dets = (dir / "d.jsonl").string(), gt = (dir / "g.json").string(), first = (dir / "f.jsonl").string();
    REQUIRE(cli({"simulate", "--preset", "occlusion", "--seed", "4", "--out-dets", dets, "--out-gt", gt, "--out-first-frame", first}).code == 0);
    REQUIRE(cli({"track", "--dets", dets, "--first-frame-gt", first, "--out", (dir / "a.json").string()}).code == 0);
    REQUIRE(cli({"track", "--dets", dets, "--first-frame-gt", first, "--out", (dir / "b.json").string()}).code == 0);
    CHECK(dttm::io::read_file(dir / "a.json") == dttm::io::read_file(dir / "b.json"));
    fs::remove_all(dir);
}

TEST_CASE("missing required flag is a usage error naming the flag") {
    const Outcome o = cli({"track", "--dets", "x.jsonl", "--out", "y.json"});
    CHECK(o.code == 2);
    CHECK(o.err.find("--first-frame-gt") != std::string::npos);
}

TEST_CASE("unknown subcommand and flag are usage errors") {
    CHECK(cli({"frobnicate"}).code == 2);
    CHECK(cli({"tan-check", "--bogus"}).code == 2);
    CHECK(cli({}).code == 2);
}

TEST_CASE("missing input files are usage errors") {
    const Outcome o = cli({"track", "--dets", "/nonexistent/d.jsonl", "--first-frame-gt", "/nonexistent/f.jsonl", "--out", "o.json"});
    CHECK(o.code == 2);
    CHECK(o.err.find("/nonexistent/d.jsonl") != std::string::npos);
}

TEST_CASE("runtime failures exit 1 with a one-line reason") {
    const fs::path dir = scratch("runtime");
    dttm::io::write_file(dir / "bad.jsonl", "{\"frame\":1,\"detections\":[{\"bbox\":[1,1,2,2],\"conf\":1.5,\"embedding\":[1],\"mask\":null}]}\n");
    const Outcome o = cli({"track", "--dets", (dir / "bad.jsonl").string(), "--first-frame-gt", (dir / "bad.jsonl").string(),
                           "--out", (dir / "o.json").string()});
    CHECK(o.code == 1);
    CHECK(o.err.find("line 1") != std::string::npos);
    CHECK(o.err.rfind("error: ", 0) == 0);
    CHECK(std::count(o.err.begin(), o.err.end(), '\n') == 1);
    CHECK(cli({"simulate", "--preset", "nope", "--out-dets", "a", "--out-gt", "b"}).code == 1);
    fs::remove_all(dir);
}

TEST_CASE("tan-check passes") {
    const Outcome o = cli({"tan-check"});
    CHECK(o.code == 0);
    CHECK(o.out.find("FAIL") == std::string::npos);
}

TEST_CASE("bench reports timing") {
    const Outcome o = cli({"bench", "--preset", "dense", "--frames", "50"});
    CHECK(o.code == 0);
    CHECK(o.out.find("ms_per_frame") != std::string::npos);
}
