#include "dttm/tan_fusion.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "dttm/error.hpp"
#include "dttm/random.hpp"

namespace dttm::tan {

namespace {

void check_kernel(const Tensor4& input, const Conv3dKernel& k) {
    const bool temporal = k.kt == 3 && k.kh == 1 && k.kw == 1;
    const bool spatial = k.kt == 1 && k.kh == 3 && k.kw == 3;
    if (!temporal && !spatial)
        throw ShapeError("kernel axes: expected 3x1x1 or 1x3x3, got " + std::to_string(k.kt) + "x" +
                         std::to_string(k.kh) + "x" + std::to_string(k.kw));
    if (k.in_channels != input.channels)
        throw ShapeError("channel axis: kernel expects " + std::to_string(k.in_channels) + " input channels, input has " +
                         std::to_string(input.channels));
    if (k.weights.size() != k.out_channels * k.in_channels * k.kt * k.kh * k.kw)
        throw ShapeError("kernel weights: size does not match kernel shape");
    if (k.bias.size() != k.out_channels) throw ShapeError("kernel bias: size does not match output channels");
    if (input.data.size() != input.channels * input.frames * input.height * input.width)
        throw ShapeError("input: data size does not match shape");
}

// Output index range [lo, hi) for which out + tap - pad stays inside [0, n).
void valid_range(std::size_t n, std::size_t tap, std::size_t pad, std::size_t& lo, std::size_t& hi) {
    lo = tap < pad ? pad - tap : 0;
    hi = tap > pad ? (n > tap - pad ? n - (tap - pad) : 0) : n;
    if (lo > hi) lo = hi;
}

template <typename Fn>
void for_each_tap(const Tensor4& input, const Conv3dKernel& k, Fn&& fn) {
    const std::size_t pt = k.kt / 2, ph = k.kh / 2, pw = k.kw / 2;
    for (std::size_t o = 0; o < k.out_channels; ++o)
        for (std::size_t ci = 0; ci < k.in_channels; ++ci)
            for (std::size_t dt = 0; dt < k.kt; ++dt)
                for (std::size_t dy = 0; dy < k.kh; ++dy)
                    for (std::size_t dx = 0; dx < k.kw; ++dx) {
                        std::size_t t0, t1, y0, y1, x0, x1;
                        valid_range(input.frames, dt, pt, t0, t1);
                        valid_range(input.height, dy, ph, y0, y1);
                        valid_range(input.width, dx, pw, x0, x1);
                        const std::size_t widx = k.index(o, ci, dt, dy, dx);
                        for (std::size_t t = t0; t < t1; ++t)
                            for (std::size_t y = y0; y < y1; ++y)
                                for (std::size_t x = x0; x < x1; ++x)
                                    fn(widx, o, t, y, x, input.index(ci, t + dt - pt, y + dy - ph, x + dx - pw));
                    }
}

} // namespace

Conv3dKernel Conv3dKernel::zeros(std::size_t out_channels, std::size_t in_channels, KernelShape shape) {
    Conv3dKernel k;
    k.out_channels = out_channels;
    k.in_channels = in_channels;
    if (shape == KernelShape::Temporal) {
        k.kt = 3;
    } else {
        k.kh = 3;
        k.kw = 3;
    }
    k.weights.assign(out_channels * in_channels * k.kt * k.kh * k.kw, 0.0);
    k.bias.assign(out_channels, 0.0);
    return k;
}

FusionParams FusionParams::zeros(std::size_t in_channels, std::size_t mid_channels, std::size_t out_channels) {
    return FusionParams{Conv3dKernel::zeros(mid_channels, in_channels, KernelShape::Temporal),
                        Conv3dKernel::zeros(out_channels, mid_channels, KernelShape::Spatial)};
}

Tensor4 conv3d(const Tensor4& input, const Conv3dKernel& kernel) {
    check_kernel(input, kernel);
    Tensor4 out(kernel.out_channels, input.frames, input.height, input.width);
    for (std::size_t o = 0; o < kernel.out_channels; ++o)
        for (std::size_t t = 0; t < out.frames; ++t)
            for (std::size_t y = 0; y < out.height; ++y)
                for (std::size_t x = 0; x < out.width; ++x) out.at(o, t, y, x) = kernel.bias[o];
    for_each_tap(input, kernel, [&](std::size_t widx, std::size_t o, std::size_t t, std::size_t y, std::size_t x,
                                    std::size_t in_idx) {
        out.at(o, t, y, x) += kernel.weights[widx] * input.data[in_idx];
    });
    return out;
}

Tensor4 relu(const Tensor4& x) {
    Tensor4 out = x;
    for (double& v : out.data) v = std::max(v, 0.0);
    return out;
}

Tensor3 temporal_max_pool(const Tensor4& x) {
    if (x.frames < 1) throw ShapeError("frame axis: temporal max pooling needs at least one frame");
    Tensor3 out(x.channels, x.height, x.width);
    for (std::size_t c = 0; c < x.channels; ++c)
        for (std::size_t y = 0; y < x.height; ++y)
            for (std::size_t w = 0; w < x.width; ++w) {
                double m = x.at(c, 0, y, w);
                for (std::size_t t = 1; t < x.frames; ++t) m = std::max(m, x.at(c, t, y, w));
                out.at(c, y, w) = m;
            }
    return out;
}

Tensor3 fusion_branch(const Tensor4& clip, const FusionParams& params) {
    return temporal_max_pool(conv3d(relu(conv3d(clip, params.temporal)), params.spatial));
}

Tensor3 fuse_stage(const Tensor3& frame, const Tensor4& clip, const FusionParams& params) {
    if (params.spatial.out_channels != frame.channels)
        throw ShapeError("channel axis: fusion branch yields " + std::to_string(params.spatial.out_channels) +
                         " channels, frame feature has " + std::to_string(frame.channels));
    if (clip.height != frame.height) throw ShapeError("height axis: clip and frame features differ");
    if (clip.width != frame.width) throw ShapeError("width axis: clip and frame features differ");
    Tensor3 out = fusion_branch(clip, params);
    for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += frame.data[i];
    return out;
}

Conv3dGrad conv3d_backward(const Tensor4& input, const Conv3dKernel& kernel, const Tensor4& grad_out) {
    check_kernel(input, kernel);
    Conv3dGrad g;
    g.input = Tensor4(input.channels, input.frames, input.height, input.width);
    g.kernel = kernel;
    std::fill(g.kernel.weights.begin(), g.kernel.weights.end(), 0.0);
    std::fill(g.kernel.bias.begin(), g.kernel.bias.end(), 0.0);
    for (std::size_t o = 0; o < kernel.out_channels; ++o)
        for (std::size_t t = 0; t < input.frames; ++t)
            for (std::size_t y = 0; y < input.height; ++y)
                for (std::size_t x = 0; x < input.width; ++x) g.kernel.bias[o] += grad_out.at(o, t, y, x);
    for_each_tap(input, kernel, [&](std::size_t widx, std::size_t o, std::size_t t, std::size_t y, std::size_t x,
                                    std::size_t in_idx) {
        const double go = grad_out.at(o, t, y, x);
        g.input.data[in_idx] += kernel.weights[widx] * go;
        g.kernel.weights[widx] += input.data[in_idx] * go;
    });
    return g;
}

Tensor4 temporal_max_pool_backward(const Tensor4& x, const Tensor3& grad_out) {
    Tensor4 g(x.channels, x.frames, x.height, x.width);
    for (std::size_t c = 0; c < x.channels; ++c)
        for (std::size_t y = 0; y < x.height; ++y)
            for (std::size_t w = 0; w < x.width; ++w) {
                std::size_t arg = 0;
                for (std::size_t t = 1; t < x.frames; ++t)
                    if (x.at(c, t, y, w) > x.at(c, arg, y, w)) arg = t;
                g.at(c, arg, y, w) += grad_out.at(c, y, w);
            }
    return g;
}

FusionGrad fuse_stage_backward([[maybe_unused]] const Tensor3& frame, const Tensor4& clip, const FusionParams& params,
                               const Tensor3& grad_out) {
    const Tensor4 pre = conv3d(clip, params.temporal);
    const Tensor4 act = relu(pre);
    const Tensor4 spatial = conv3d(act, params.spatial);

    FusionGrad g;
    g.frame = grad_out;
    const Tensor4 g_spatial = temporal_max_pool_backward(spatial, grad_out);
    Conv3dGrad gs = conv3d_backward(act, params.spatial, g_spatial);
    Tensor4 g_pre = gs.input;
    for (std::size_t i = 0; i < g_pre.data.size(); ++i)
        if (!(pre.data[i] > 0.0)) g_pre.data[i] = 0.0;
    Conv3dGrad gt = conv3d_backward(clip, params.temporal, g_pre);
    g.clip = std::move(gt.input);
    g.params.temporal = std::move(gt.kernel);
    g.params.spatial = std::move(gs.kernel);
    return g;
}

GradientFixture make_gradient_fixture(std::uint64_t seed, std::size_t in_channels, std::size_t mid_channels,
                                      std::size_t frames, std::size_t height, std::size_t width, double margin) {
    for (std::uint64_t attempt = 0;; ++attempt) {
        CounterRng rng(seed, {0x7A9ULL, attempt});
        auto fill = [&](std::vector<double>& v) {
            for (double& x : v) x = 2.0 * rng.uniform() - 1.0;
        };
        GradientFixture f;
        f.frame = Tensor3(mid_channels, height, width);
        f.clip = Tensor4(in_channels, frames, height, width);
        f.params = FusionParams::zeros(in_channels, mid_channels, mid_channels);
        fill(f.frame.data);
        fill(f.clip.data);
        fill(f.params.temporal.weights);
        fill(f.params.temporal.bias);
        fill(f.params.spatial.weights);
        fill(f.params.spatial.bias);

        bool ok = true;
        for (std::size_t c = 0; c < in_channels && ok; ++c)
            for (std::size_t y = 0; y < height && ok; ++y)
                for (std::size_t x = 0; x < width && ok; ++x)
                    for (std::size_t a = 0; a < frames && ok; ++a)
                        for (std::size_t b = a + 1; b < frames && ok; ++b)
                            ok = std::abs(f.clip.at(c, a, y, x) - f.clip.at(c, b, y, x)) >= margin;
        const Tensor4 pre = conv3d(f.clip, f.params.temporal);
        for (double v : pre.data) ok = ok && std::abs(v) >= margin;
        const Tensor4 spatial = conv3d(relu(pre), f.params.spatial);
        for (std::size_t c = 0; c < spatial.channels && ok; ++c)
            for (std::size_t y = 0; y < height && ok; ++y)
                for (std::size_t x = 0; x < width && ok; ++x)
                    for (std::size_t a = 0; a < frames && ok; ++a)
                        for (std::size_t b = a + 1; b < frames && ok; ++b)
                            ok = std::abs(spatial.at(c, a, y, x) - spatial.at(c, b, y, x)) >= margin;
        if (ok) return f;
    }
}

namespace {

double sum(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
}

double relative_error(double analytic, double numeric) {
    return std::abs(analytic - numeric) / std::max({1.0, std::abs(analytic), std::abs(numeric)});
}

} // namespace

GradientCheck finite_diff_check(CheckedOp op, const GradientFixture& inputs, double epsilon) {
    if (!(epsilon >= 1e-7 && epsilon <= 1e-3)) throw ConfigError("epsilon must lie in [1e-7, 1e-3]");

    GradientFixture x = inputs;
    std::function<double()> loss;
    // Pairs of (perturbable value, analytic gradient).
    std::vector<std::pair<double*, double>> slots;
    auto attach = [&](std::vector<double>& values, const std::vector<double>& grads) {
        for (std::size_t i = 0; i < values.size(); ++i) slots.emplace_back(&values[i], grads[i]);
    };

    switch (op) {
    case CheckedOp::Conv3d: {
        loss = [&] { return sum(conv3d(x.clip, x.params.temporal).data); };
        const Tensor4 out = conv3d(x.clip, x.params.temporal);
        Tensor4 ones(out.channels, out.frames, out.height, out.width, 1.0);
        const Conv3dGrad g = conv3d_backward(x.clip, x.params.temporal, ones);
        attach(x.clip.data, g.input.data);
        attach(x.params.temporal.weights, g.kernel.weights);
        attach(x.params.temporal.bias, g.kernel.bias);
        break;
    }
    case CheckedOp::TemporalMaxPool: {
        loss = [&] { return sum(temporal_max_pool(x.clip).data); };
        Tensor3 ones(x.clip.channels, x.clip.height, x.clip.width, 1.0);
        const Tensor4 g = temporal_max_pool_backward(x.clip, ones);
        attach(x.clip.data, g.data);
        break;
    }
    case CheckedOp::FuseStage: {
        loss = [&] { return sum(fuse_stage(x.frame, x.clip, x.params).data); };
        Tensor3 ones(x.frame.channels, x.frame.height, x.frame.width, 1.0);
        const FusionGrad g = fuse_stage_backward(x.frame, x.clip, x.params, ones);
        attach(x.frame.data, g.frame.data);
        attach(x.clip.data, g.clip.data);
        attach(x.params.temporal.weights, g.params.temporal.weights);
        attach(x.params.temporal.bias, g.params.temporal.bias);
        attach(x.params.spatial.weights, g.params.spatial.weights);
        attach(x.params.spatial.bias, g.params.spatial.bias);
        break;
    }
    }

    GradientCheck report;
    for (auto& [value, analytic] : slots) {
        const double saved = *value;
        *value = saved + epsilon;
        const double up = loss();
        *value = saved - epsilon;
        const double down = loss();
        *value = saved;
        const double numeric = (up - down) / (2.0 * epsilon);
        report.max_relative_error = std::max(report.max_relative_error, relative_error(analytic, numeric));
        ++report.parameters_checked;
    }
    return report;
}

namespace {

// Direct per-output summation with explicit bounds tests.
Tensor4 conv3d_direct(const Tensor4& in, const Conv3dKernel& k) {
    Tensor4 out(k.out_channels, in.frames, in.height, in.width);
    const long pt = static_cast<long>(k.kt / 2), ph = static_cast<long>(k.kh / 2), pw = static_cast<long>(k.kw / 2);
    for (std::size_t o = 0; o < k.out_channels; ++o)
        for (long t = 0; t < static_cast<long>(in.frames); ++t)
            for (long y = 0; y < static_cast<long>(in.height); ++y)
                for (long x = 0; x < static_cast<long>(in.width); ++x) {
                    double acc = 0.0;
                    for (std::size_t ci = 0; ci < k.in_channels; ++ci)
                        for (long dt = 0; dt < static_cast<long>(k.kt); ++dt)
                            for (long dy = 0; dy < static_cast<long>(k.kh); ++dy)
                                for (long dx = 0; dx < static_cast<long>(k.kw); ++dx) {
                                    const long st = t + dt - pt, sy = y + dy - ph, sx = x + dx - pw;
                                    if (st < 0 || sy < 0 || sx < 0 || st >= static_cast<long>(in.frames) ||
                                        sy >= static_cast<long>(in.height) || sx >= static_cast<long>(in.width))
                                        continue;
                                    acc += k.weights[k.index(o, ci, static_cast<std::size_t>(dt), static_cast<std::size_t>(dy),
                                                             static_cast<std::size_t>(dx))] *
                                           in.at(ci, static_cast<std::size_t>(st), static_cast<std::size_t>(sy),
                                                 static_cast<std::size_t>(sx));
                                }
                    out.at(o, static_cast<std::size_t>(t), static_cast<std::size_t>(y), static_cast<std::size_t>(x)) =
                        acc + k.bias[o];
                }
    return out;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

std::string sci(double v) {
    std::ostringstream s;
    s.precision(3);
    s << std::scientific << v;
    return s.str();
}

} // namespace

std::vector<CheckOutcome> run_tan_checks(std::uint64_t seed) {
    std::vector<CheckOutcome> out;
    auto record = [&](std::string name, bool passed, std::string detail) {
        out.push_back(CheckOutcome{std::move(name), passed, std::move(detail)});
    };

    const GradientFixture f = make_gradient_fixture(seed);

    {
        const FusionParams zero = FusionParams::zeros(f.clip.channels, f.params.temporal.out_channels, f.frame.channels);
        const Tensor3 fused = fuse_stage(f.frame, f.clip, zero);
        record("zero-branch identity", fused == f.frame, "zero parameters return the frame feature bit-exactly");
    }
    {
        const Tensor3 fused = fuse_stage(f.frame, f.clip, f.params);
        const bool same = fused.channels == f.frame.channels && fused.height == f.frame.height &&
                          fused.width == f.frame.width;
        record("shape contract", same, "fused feature keeps the frame feature's shape");
    }
    {
        double worst = 0.0;
        for (std::uint64_t k = 0; k < 50; ++k) {
            const GradientFixture r = make_gradient_fixture(seed * 1000 + k, 2, 3, 4, 5, 5, 0.0);
            worst = std::max(worst, max_abs_diff(conv3d(r.clip, r.params.temporal).data,
                                                 conv3d_direct(r.clip, r.params.temporal).data));
            const Tensor4 mid = conv3d(r.clip, r.params.temporal);
            worst = std::max(worst, max_abs_diff(conv3d(mid, r.params.spatial).data,
                                                 conv3d_direct(mid, r.params.spatial).data));
        }
        record("conv3d direct oracle", worst <= 1e-12, "max abs diff " + sci(worst) + " (limit 1e-12)");
    }
    {
        const GradientFixture a = make_gradient_fixture(seed + 1, 2, 3, 3, 4, 5, 0.0);
        const GradientFixture b = make_gradient_fixture(seed + 2, 2, 3, 3, 4, 5, 0.0);
        Conv3dKernel k = a.params.temporal;
        std::fill(k.bias.begin(), k.bias.end(), 0.0);
        const double alpha = 0.75, beta = -1.25;
        Tensor4 mix = a.clip;
        for (std::size_t i = 0; i < mix.data.size(); ++i) mix.data[i] = alpha * a.clip.data[i] + beta * b.clip.data[i];
        const Tensor4 lhs = conv3d(mix, k);
        const Tensor4 ya = conv3d(a.clip, k), yb = conv3d(b.clip, k);
        double worst = 0.0;
        for (std::size_t i = 0; i < lhs.data.size(); ++i)
            worst = std::max(worst, std::abs(lhs.data[i] - (alpha * ya.data[i] + beta * yb.data[i])));
        record("conv3d linearity", worst <= 1e-10, "max abs diff " + sci(worst) + " (limit 1e-10)");
    }
    const double eps = 1e-5;
    {
        const auto g = finite_diff_check(CheckedOp::Conv3d, f, eps);
        record("conv3d gradient", g.max_relative_error < 1e-6, "max rel err " + sci(g.max_relative_error) + " (limit 1e-6)");
    }
    {
        const auto g = finite_diff_check(CheckedOp::TemporalMaxPool, f, eps);
        record("max-pool gradient", g.max_relative_error < 1e-6,
               "max rel err " + sci(g.max_relative_error) + " (limit 1e-6)");
    }
    {
        const auto g = finite_diff_check(CheckedOp::FuseStage, f, eps);
        record("fuse_stage gradient", g.max_relative_error < 1e-4,
               "max rel err " + sci(g.max_relative_error) + " (limit 1e-4)");
    }
    return out;
}

} // namespace dttm::tan
