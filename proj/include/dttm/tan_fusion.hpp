#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace dttm::tan {

// Clip feature, row-major over (channels, frames, height, width).
struct Tensor4 {
    std::size_t channels = 0, frames = 0, height = 0, width = 0;
    std::vector<double> data;

    Tensor4() = default;
    Tensor4(std::size_t c, std::size_t t, std::size_t h, std::size_t w, double fill = 0.0)
        : channels(c), frames(t), height(h), width(w), data(c * t * h * w, fill) {}

    std::size_t index(std::size_t c, std::size_t t, std::size_t h, std::size_t w) const {
        return ((c * frames + t) * height + h) * width + w;
    }
    double at(std::size_t c, std::size_t t, std::size_t h, std::size_t w) const { return data[index(c, t, h, w)]; }
    double& at(std::size_t c, std::size_t t, std::size_t h, std::size_t w) { return data[index(c, t, h, w)]; }

    bool operator==(const Tensor4&) const = default;
};

// Frame feature, row-major over (channels, height, width).
struct Tensor3 {
    std::size_t channels = 0, height = 0, width = 0;
    std::vector<double> data;

    Tensor3() = default;
    Tensor3(std::size_t c, std::size_t h, std::size_t w, double fill = 0.0)
        : channels(c), height(h), width(w), data(c * h * w, fill) {}

    std::size_t index(std::size_t c, std::size_t h, std::size_t w) const { return (c * height + h) * width + w; }
    double at(std::size_t c, std::size_t h, std::size_t w) const { return data[index(c, h, w)]; }
    double& at(std::size_t c, std::size_t h, std::size_t w) { return data[index(c, h, w)]; }

    bool operator==(const Tensor3&) const = default;
};

enum class KernelShape {
    Temporal,  // 3 x 1 x 1
    Spatial,   // 1 x 3 x 3
};

// Weights laid out (out_channels, in_channels, kt, kh, kw).
struct Conv3dKernel {
    std::size_t out_channels = 0, in_channels = 0;
    std::size_t kt = 1, kh = 1, kw = 1;
    std::vector<double> weights;
    std::vector<double> bias;

    static Conv3dKernel zeros(std::size_t out_channels, std::size_t in_channels, KernelShape shape);

    std::size_t index(std::size_t o, std::size_t i, std::size_t t, std::size_t h, std::size_t w) const {
        return (((o * in_channels + i) * kt + t) * kh + h) * kw + w;
    }

    bool operator==(const Conv3dKernel&) const = default;
};

struct FusionParams {
    Conv3dKernel temporal;  // C_mid x C_in x 3 x 1 x 1
    Conv3dKernel spatial;   // C_out x C_mid x 1 x 3 x 3

    static FusionParams zeros(std::size_t in_channels, std::size_t mid_channels, std::size_t out_channels);
    bool operator==(const FusionParams&) const = default;
};

// Stride-1 cross-correlation with zero "same" padding. Only the two
// factorized kernel shapes are accepted; mismatches throw ShapeError naming
// the axis.
Tensor4 conv3d(const Tensor4& input, const Conv3dKernel& kernel);
Tensor4 relu(const Tensor4& x);
Tensor3 temporal_max_pool(const Tensor4& x);

// The fusion branch: temporal conv -> relu -> spatial conv -> temporal max pool.
Tensor3 fusion_branch(const Tensor4& clip, const FusionParams& params);
// frame + fusion_branch(clip).
Tensor3 fuse_stage(const Tensor3& frame, const Tensor4& clip, const FusionParams& params);

struct Conv3dGrad {
    Tensor4 input;
    Conv3dKernel kernel;  // weights/bias hold the gradients
};

Conv3dGrad conv3d_backward(const Tensor4& input, const Conv3dKernel& kernel, const Tensor4& grad_out);
// Routes each output gradient to the first frame attaining the maximum.
Tensor4 temporal_max_pool_backward(const Tensor4& x, const Tensor3& grad_out);

struct FusionGrad {
    Tensor3 frame;
    Tensor4 clip;
    FusionParams params;
};

FusionGrad fuse_stage_backward(const Tensor3& frame, const Tensor4& clip, const FusionParams& params,
                               const Tensor3& grad_out);

enum class CheckedOp { Conv3d, TemporalMaxPool, FuseStage };

// Inputs for gradient checks. Conv3d uses (clip, params.temporal);
// TemporalMaxPool uses clip; FuseStage uses everything.
struct GradientFixture {
    Tensor3 frame;
    Tensor4 clip;
    FusionParams params;
};

// Random fixture whose relu inputs stay at least `margin` away from 0 and whose
// pooled values are separated by at least `margin` along time, so central
// differences with epsilon << margin never cross a kink.
GradientFixture make_gradient_fixture(std::uint64_t seed, std::size_t in_channels = 2, std::size_t mid_channels = 3,
                                      std::size_t frames = 3, std::size_t height = 4, std::size_t width = 5,
                                      double margin = 1e-3);

struct GradientCheck {
    double max_relative_error = 0.0;
    std::size_t parameters_checked = 0;
};

// Central differences of loss = sum(outputs) against the analytic gradient,
// over every input and parameter. Relative error is |a - n| / max(1, |a|, |n|).
// Throws dttm::ConfigError unless epsilon lies in [1e-7, 1e-3].
GradientCheck finite_diff_check(CheckedOp op, const GradientFixture& inputs, double epsilon);

struct CheckOutcome {
    std::string name;
    bool passed = false;
    std::string detail;
};

// Invariant and gradient suite run by the `tan-check` subcommand.
std::vector<CheckOutcome> run_tan_checks(std::uint64_t seed = 7);

} // namespace dttm::tan
