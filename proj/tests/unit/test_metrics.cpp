#include <doctest.h>

#include <random>
#include <set>

#include "dttm/error.hpp"
#include "dttm/metrics.hpp"
#include "oracles.hpp"

using namespace dttm;

namespace {

// Boundary pixels by definition, matched by exhaustive Chebyshev search.
double boundary_f_reference(const BitGrid& p, const BitGrid& g, long tol) {
    auto boundary = [](const BitGrid& m) {
        std::vector<std::pair<long, long>> pts;
        const long h = static_cast<long>(m.height), w = static_cast<long>(m.width);
        for (long r = 0; r < h; ++r)
            for (long c = 0; c < w; ++c) {
                if (!m.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c))) continue;
                bool edge = r == 0 || c == 0 || r == h - 1 || c == w - 1;
                const long dr[4] = {-1, 1, 0, 0}, dc[4] = {0, 0, -1, 1};
                for (int k = 0; k < 4 && !edge; ++k)
                    edge = !m.at(static_cast<std::size_t>(r + dr[k]), static_cast<std::size_t>(c + dc[k]));
                if (edge) pts.emplace_back(r, c);
            }
        return pts;
    };
    const auto bp = boundary(p), bg = boundary(g);
    if (bp.empty() && bg.empty()) return 1.0;
    if (bp.empty() || bg.empty()) return 0.0;
    auto covered = [tol](const auto& from, const auto& to) {
        std::size_t hit = 0;
        for (const auto& [r, c] : from)
            for (const auto& [r2, c2] : to)
                if (std::max(std::abs(r - r2), std::abs(c - c2)) <= tol) {
                    ++hit;
                    break;
                }
        return static_cast<double>(hit) / static_cast<double>(from.size());
    };
    const double prec = covered(bp, bg), rec = covered(bg, bp);
    return prec + rec == 0 ? 0.0 : 2 * prec * rec / (prec + rec);
}

GroundTruth one_object(std::vector<BBox> boxes, std::size_t w = 8, std::size_t h = 6) {
    GroundTruth gt;
    gt.width = w;
    gt.height = h;
    gt.num_frames = static_cast<int>(boxes.size());
    gt.objects.emplace_back();
    for (const BBox& b : boxes) gt.objects[0].push_back(GroundTruthState{b, true, {1, 0}});
    return gt;
}

Trajectory traj(int id, std::vector<std::pair<int, BBox>> entries) {
    Trajectory t{id, {}};
    for (auto& [f, b] : entries) t.entries.push_back(TrajectoryEntry{f, b, std::nullopt, 1.0});
    return t;
}

} // namespace

TEST_CASE("region_j fixtures") {
    const BinaryMask a = rasterize_box(BBox{2, 2, 2, 2}, 6, 4);
    CHECK(region_j(a, a) == 1.0);
    CHECK(region_j(a, rasterize_box(BBox{5, 2, 2, 2}, 6, 4)) == 0.0);
    CHECK(region_j(a, rasterize_box(BBox{3, 2, 2, 2}, 6, 4)) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK_THROWS_AS(region_j(a, BinaryMask::empty(5, 4)), ShapeError);
}

TEST_CASE("boundary_f fixtures") {
    const BinaryMask a = rasterize_box(BBox{5, 5, 6, 6}, 12, 12);
    for (std::size_t tol : {0u, 1u, 3u}) CHECK(boundary_f(a, a, tol) == 1.0);
    CHECK(boundary_f(BinaryMask::empty(12, 12), a, 1) == 0.0);
    CHECK(boundary_f(BinaryMask::empty(12, 12), BinaryMask::empty(12, 12), 1) == 1.0);

    const BinaryMask shifted = rasterize_box(BBox{6, 5, 6, 6}, 12, 12);
    CHECK(boundary_f(shifted, a, 1) == 1.0);
    const double direct = boundary_f_reference(rle_decode(shifted), rle_decode(a), 0);
    // 6x6 squares offset by one column share 5 pixels of the top row and 5 of
    // the bottom row out of 20 boundary pixels each: P = R = 1/2.
    CHECK(direct == 0.5);
    CHECK(boundary_f(shifted, a, 0) == doctest::Approx(direct).epsilon(1e-15));
}

TEST_CASE("boundary_f agrees with the reference and is monotone in tol") {
    std::mt19937_64 rng(17);
    for (int k = 0; k < 150; ++k) {
        const BitGrid p = dttm::testing::random_grid(rng, 11, 9, 0.5), g = dttm::testing::random_grid(rng, 11, 9, 0.5);
        const BinaryMask mp = rle_encode(p), mg = rle_encode(g);
        double last = 0.0;
        for (long tol = 0; tol <= 3; ++tol) {
            const double f = boundary_f(mp, mg, static_cast<std::size_t>(tol));
            CHECK(f == doctest::Approx(boundary_f_reference(p, g, tol)).epsilon(1e-14));
            CHECK(f >= last);
            CHECK(f >= 0.0);
            CHECK(f <= 1.0);
            last = f;
        }
    }
}

TEST_CASE("id switch traces") {
    GroundTruth gt;
    gt.width = 40;
    gt.height = 10;
    gt.num_frames = 4;
    const BBox left{5, 5, 4, 4}, right{30, 5, 4, 4};
    gt.objects = {std::vector<GroundTruthState>(4, {left, true, {1, 0}}), std::vector<GroundTruthState>(4, {right, true, {0, 1}})};

    const std::vector<Trajectory> perfect{traj(0, {{0, left}, {1, left}, {2, left}, {3, left}}),
                                          traj(1, {{0, right}, {1, right}, {2, right}, {3, right}})};
    CHECK(id_switches(perfect, gt, 0.5) == 0);

    const std::vector<Trajectory> swapped{traj(0, {{0, left}, {1, left}, {2, right}, {3, right}}),
                                          traj(1, {{0, right}, {1, right}, {2, left}, {3, left}})};
    CHECK(id_switches(swapped, gt, 0.5) == 2);

    const std::vector<Trajectory> gap{traj(0, {{0, left}, {3, left}}), traj(1, {{0, right}, {1, BBox{18, 5, 4, 4}}, {2, right}})};
    CHECK(id_switches(gap, gt, 0.5) == 0);
}

TEST_CASE("two-frame J mean") {
    const BBox g{2, 2, 2, 2};
    const GroundTruth gt = one_object({g, g});
    const std::vector<Trajectory> trajs{traj(0, {{0, g}, {1, BBox{3, 2, 2, 2}}})};
    const EvalReport r = evaluate(trajs, gt);
    REQUIRE(r.scores.size() == 2);
    CHECK(r.scores[0].j == 1.0);
    CHECK(r.scores[1].j == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(r.j_mean == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(r.jf_mean == (r.j_mean + r.f_mean) / 2);
}

TEST_CASE("evaluate edge cases") {
    const BBox g{2, 2, 2, 2};
    GroundTruth gt = one_object({g, g, g});
    const EvalReport perfect = evaluate(std::vector<Trajectory>{traj(0, {{0, g}, {1, g}, {2, g}})}, gt);
    CHECK(perfect.j_mean == 1.0);
    CHECK(perfect.f_mean == 1.0);
    CHECK(perfect.id_switches == 0);
    CHECK(perfect.track_recall == 1.0);

    const EvalReport nothing = evaluate(std::vector<Trajectory>{traj(0, {})}, gt);
    CHECK(nothing.j_mean == 0.0);
    CHECK(nothing.track_recall == 0.0);

    gt.objects[0][1].visible = false;
    const EvalReport absent = evaluate(std::vector<Trajectory>{traj(0, {{0, g}, {2, g}})}, gt);
    CHECK(absent.j_mean == 1.0);
    CHECK(absent.f_mean == 1.0);

    CHECK_THROWS_AS(evaluate(std::vector<Trajectory>{traj(0, {{5, g}})}, gt), Error);
}

TEST_CASE("evaluate is invariant to object listing order") {
    GroundTruth gt;
    gt.width = 40;
    gt.height = 12;
    gt.num_frames = 3;
    const BBox a{6, 6, 6, 6}, b{28, 6, 6, 6};
    gt.objects = {std::vector<GroundTruthState>(3, {a, true, {1, 0}}), std::vector<GroundTruthState>(3, {b, true, {0, 1}})};
    const Trajectory ta = traj(0, {{0, a}, {1, BBox{7, 6, 6, 6}}, {2, a}});
    const Trajectory tb = traj(1, {{0, b}, {2, BBox{28, 7, 6, 6}}});
    const EvalReport r = evaluate(std::vector<Trajectory>{ta, tb}, gt);

    GroundTruth flipped = gt;
    std::swap(flipped.objects[0], flipped.objects[1]);
    Trajectory fa = tb, fb = ta;
    fa.target_id = 0;
    fb.target_id = 1;
    const EvalReport rf = evaluate(std::vector<Trajectory>{fa, fb}, flipped);
    CHECK(r.j_mean == doctest::Approx(rf.j_mean).epsilon(1e-15));
    CHECK(r.f_mean == doctest::Approx(rf.f_mean).epsilon(1e-15));
    CHECK(r.id_switches == rf.id_switches);
    CHECK(r.track_recall == rf.track_recall);
}
