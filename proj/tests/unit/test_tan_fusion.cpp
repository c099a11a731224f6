#include <doctest.h>

#include <random>

#include "dttm/error.hpp"
#include "dttm/tan_fusion.hpp"
#include "tan_oracle.hpp"

using namespace dttm;
using namespace dttm::tan;
using dttm::testing::max_abs_diff;
using dttm::testing::random_kernel;
using dttm::testing::random_tensor4;

TEST_CASE("zero kernel gives zero output") {
    std::mt19937_64 rng(1);
    const Tensor4 x = random_tensor4(rng, 2, 3, 4, 5);
    const Tensor4 y = conv3d(x, Conv3dKernel::zeros(3, 2, KernelShape::Spatial));
    CHECK(y == Tensor4(3, 3, 4, 5));
}

TEST_CASE("identity temporal kernel") {
    std::mt19937_64 rng(2);
    const Tensor4 x = random_tensor4(rng, 1, 4, 3, 3);
    Conv3dKernel k = Conv3dKernel::zeros(1, 1, KernelShape::Temporal);
    k.weights[k.index(0, 0, 1, 0, 0)] = 1.0;
    CHECK(conv3d(x, k) == x);
    Conv3dKernel s = Conv3dKernel::zeros(1, 1, KernelShape::Spatial);
    s.weights[s.index(0, 0, 0, 1, 1)] = 1.0;
    CHECK(conv3d(x, s) == x);
}

TEST_CASE("conv3d matches the direct oracle") {
    std::mt19937_64 rng(3);
    for (int k = 0; k < 50; ++k) {
        const KernelShape shape = k % 2 ? KernelShape::Spatial : KernelShape::Temporal;
        const Tensor4 x = random_tensor4(rng, 2, 4, 5, 5);
        const Conv3dKernel kern = random_kernel(rng, 3, 2, shape);
        CHECK(max_abs_diff(conv3d(x, kern).data, dttm::testing::naive_conv3d(x, kern).data) <= 1e-12);
    }
    // Degenerate extents exercise the padding on every side.
    const Tensor4 x = random_tensor4(rng, 1, 1, 1, 2);
    const Conv3dKernel kern = random_kernel(rng, 2, 1, KernelShape::Spatial);
    CHECK(max_abs_diff(conv3d(x, kern).data, dttm::testing::naive_conv3d(x, kern).data) <= 1e-12);
}

TEST_CASE("conv3d is linear without bias") {
    std::mt19937_64 rng(4);
    for (int k = 0; k < 20; ++k) {
        const Tensor4 x = random_tensor4(rng, 2, 3, 4, 4), y = random_tensor4(rng, 2, 3, 4, 4);
        const Conv3dKernel kern = random_kernel(rng, 2, 2, k % 2 ? KernelShape::Spatial : KernelShape::Temporal, false);
        const double a = 1.7, b = -0.4;
        Tensor4 mix = x;
        for (std::size_t i = 0; i < mix.data.size(); ++i) mix.data[i] = a * x.data[i] + b * y.data[i];
        const Tensor4 lhs = conv3d(mix, kern), cx = conv3d(x, kern), cy = conv3d(y, kern);
        for (std::size_t i = 0; i < lhs.data.size(); ++i) CHECK(std::abs(lhs.data[i] - (a * cx.data[i] + b * cy.data[i])) <= 1e-10);
    }
}

TEST_CASE("conv3d shape errors name the axis") {
    const Tensor4 x(2, 3, 4, 4);
    try {
        conv3d(x, Conv3dKernel::zeros(1, 3, KernelShape::Temporal));
        FAIL("expected ShapeError");
    } catch (const ShapeError& e) {
        CHECK(std::string(e.what()).find("channel") != std::string::npos);
    }
    Conv3dKernel odd = Conv3dKernel::zeros(1, 2, KernelShape::Temporal);
    odd.kt = 5;
    odd.weights.resize(10);
    CHECK_THROWS_AS(conv3d(x, odd), ShapeError);
}

TEST_CASE("temporal max pool fixtures") {
    std::mt19937_64 rng(5);
    const Tensor4 one = random_tensor4(rng, 2, 1, 3, 3);
    const Tensor3 p1 = temporal_max_pool(one);
    CHECK(p1.data == one.data);

    Tensor4 same(2, 3, 2, 2);
    for (std::size_t c = 0; c < 2; ++c)
        for (std::size_t t = 0; t < 3; ++t)
            for (std::size_t h = 0; h < 2; ++h)
                for (std::size_t w = 0; w < 2; ++w) same.at(c, t, h, w) = static_cast<double>(c * 10 + h * 2 + w);
    const Tensor3 ps = temporal_max_pool(same);
    for (std::size_t c = 0; c < 2; ++c)
        for (std::size_t h = 0; h < 2; ++h)
            for (std::size_t w = 0; w < 2; ++w) CHECK(ps.at(c, h, w) == same.at(c, 0, h, w));

    Tensor4 two(1, 2, 1, 3);
    two.data = {1.0, -2.0, 5.0, 0.5, 4.0, -1.0};
    CHECK(temporal_max_pool(two).data == std::vector<double>{1.0, 4.0, 5.0});
}

TEST_CASE("fuse_stage fixtures") {
    std::mt19937_64 rng(6);
    const Tensor4 clip = random_tensor4(rng, 2, 3, 4, 5);
    Tensor3 frame(3, 4, 5);
    for (auto& v : frame.data) v = std::uniform_real_distribution<double>(-1, 1)(rng);

    CHECK(fuse_stage(frame, clip, FusionParams::zeros(2, 4, 3)) == frame);

    FusionParams p{random_kernel(rng, 4, 2, KernelShape::Temporal), random_kernel(rng, 3, 4, KernelShape::Spatial)};
    const Tensor3 zero_frame(3, 4, 5);
    CHECK(fuse_stage(zero_frame, clip, p) == fusion_branch(clip, p));

    // Composition from the individual operations, each via the direct oracle.
    Tensor4 mid = dttm::testing::naive_conv3d(clip, p.temporal);
    for (auto& v : mid.data) v = std::max(v, 0.0);
    const Tensor4 out = dttm::testing::naive_conv3d(mid, p.spatial);
    Tensor3 expected(3, 4, 5);
    for (std::size_t c = 0; c < 3; ++c)
        for (std::size_t h = 0; h < 4; ++h)
            for (std::size_t w = 0; w < 5; ++w) {
                double m = out.at(c, 0, h, w);
                for (std::size_t t = 1; t < 3; ++t) m = std::max(m, out.at(c, t, h, w));
                expected.at(c, h, w) = frame.at(c, h, w) + m;
            }
    CHECK(max_abs_diff(fuse_stage(frame, clip, p).data, expected.data) <= 1e-12);
    CHECK(fuse_stage(frame, clip, p).channels == frame.channels);

    CHECK_THROWS_AS(fuse_stage(Tensor3(2, 4, 5), clip, p), ShapeError);
    CHECK_THROWS_AS(fuse_stage(Tensor3(3, 4, 6), clip, p), ShapeError);
}

TEST_CASE("gradient checks") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const GradientFixture fx = make_gradient_fixture(seed);
        const GradientCheck conv = finite_diff_check(CheckedOp::Conv3d, fx, 1e-5);
        CHECK(conv.max_relative_error < 1e-6);
        CHECK(conv.parameters_checked > 0);
        CHECK(finite_diff_check(CheckedOp::TemporalMaxPool, fx, 1e-5).max_relative_error < 1e-6);
        const GradientCheck fuse = finite_diff_check(CheckedOp::FuseStage, fx, 1e-5);
        CHECK(fuse.max_relative_error < 1e-4);
        CHECK(fuse.parameters_checked == fx.frame.data.size() + fx.clip.data.size() + fx.params.temporal.weights.size() +
                                             fx.params.temporal.bias.size() + fx.params.spatial.weights.size() +
                                             fx.params.spatial.bias.size());
    }
}

TEST_CASE("epsilon range") {
    const GradientFixture fx = make_gradient_fixture(1);
    CHECK_THROWS_AS(finite_diff_check(CheckedOp::Conv3d, fx, 1e-8), ConfigError);
    CHECK_THROWS_AS(finite_diff_check(CheckedOp::Conv3d, fx, 1e-2), ConfigError);
    CHECK_NOTHROW(finite_diff_check(CheckedOp::Conv3d, fx, 1e-7));
    CHECK_NOTHROW(finite_diff_check(CheckedOp::Conv3d, fx, 1e-3));
}

TEST_CASE("the check suite passes") {
    for (const CheckOutcome& c : run_tan_checks()) {
        INFO(c.name << ": " << c.detail);
        CHECK(c.passed);
    }
}
