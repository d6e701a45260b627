#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "acz/tensor.hpp"

namespace acz::nn {

// Plain free-function layer math. Tensors are [N,C,H,W] (conv/pool) or
// [N,D] (fully connected). Weight gradients are averaged over the batch;
// the loss tensors flowing backward hold per-sample gradients, so the
// 1/N factor appears exactly once, here.

struct ConvGeometry {
    std::size_t in_channels, out_channels;
    std::size_t kernel_h, kernel_w;
    std::size_t stride = 1;
    std::size_t pad = 0;

    std::size_t out_h(std::size_t in_h) const {
        const std::size_t padded = in_h + 2 * pad;
        if (padded < kernel_h) throw ShapeError("conv kernel larger than padded input");
        return (padded - kernel_h) / stride + 1;
    }
    std::size_t out_w(std::size_t in_w) const {
        const std::size_t padded = in_w + 2 * pad;
        if (padded < kernel_w) throw ShapeError("conv kernel larger than padded input");
        return (padded - kernel_w) / stride + 1;
    }
};

template <class T>
struct ConvGrad {
    TensorT<T> weights; // averaged over the batch
    TensorT<T> input;   // per-sample, depends on loss and weights only
};

template <class T>
TensorT<T> conv2d_forward(const TensorT<T>& input, const TensorT<T>& weights,
                          const ConvGeometry& g) {
    if (input.rank() != 4 || weights.rank() != 4) throw ShapeError("conv2d expects 4-D tensors");
    if (input.extent(1) != g.in_channels || weights.extent(0) != g.out_channels ||
        weights.extent(1) != g.in_channels || weights.extent(2) != g.kernel_h ||
        weights.extent(3) != g.kernel_w)
        throw ShapeError("conv2d: tensor shapes do not match the geometry");

    const std::size_t batch = input.extent(0), in_h = input.extent(2), in_w = input.extent(3);
    const std::size_t oh = g.out_h(in_h), ow = g.out_w(in_w);
    std::vector<T> out(batch * g.out_channels * oh * ow, T(0));

    const std::int64_t pad = static_cast<std::int64_t>(g.pad);
    for (std::size_t b = 0; b < batch; ++b)
        for (std::size_t k = 0; k < g.out_channels; ++k)
            for (std::size_t y = 0; y < oh; ++y)
                for (std::size_t x = 0; x < ow; ++x) {
                    double acc = 0.0;
                    for (std::size_t c = 0; c < g.in_channels; ++c)
                        for (std::size_t i = 0; i < g.kernel_h; ++i)
                            for (std::size_t j = 0; j < g.kernel_w; ++j) {
                                const std::int64_t sy =
                                    static_cast<std::int64_t>(y * g.stride + i) - pad;
                                const std::int64_t sx =
                                    static_cast<std::int64_t>(x * g.stride + j) - pad;
                                if (sy < 0 || sx < 0 ||
                                    sy >= static_cast<std::int64_t>(in_h) ||
                                    sx >= static_cast<std::int64_t>(in_w))
                                    continue;
                                acc += static_cast<double>(
                                           input[input.idx4(b, c, static_cast<std::size_t>(sy),
                                                            static_cast<std::size_t>(sx))]) *
                                       static_cast<double>(
                                           weights[weights.idx4(k, c, i, j)]);
                            }
                    out[((b * g.out_channels + k) * oh + y) * ow + x] = static_cast<T>(acc);
                }
    return TensorT<T>({batch, g.out_channels, oh, ow}, std::move(out));
}

template <class T>
ConvGrad<T> conv2d_backward(const TensorT<T>& input, const TensorT<T>& weights,
                            const TensorT<T>& loss, const ConvGeometry& g) {
    if (loss.rank() != 4) throw ShapeError("conv2d_backward expects a 4-D loss");
    const std::size_t batch = input.extent(0), in_h = input.extent(2), in_w = input.extent(3);
    const std::size_t oh = g.out_h(in_h), ow = g.out_w(in_w);
    if (loss.extent(0) != batch || loss.extent(1) != g.out_channels || loss.extent(2) != oh ||
        loss.extent(3) != ow)
        throw ShapeError("conv2d_backward: loss shape does not match forward output");

    std::vector<double> gw(weights.size(), 0.0);
    std::vector<double> gi(input.size(), 0.0);
    const std::int64_t pad = static_cast<std::int64_t>(g.pad);

    for (std::size_t b = 0; b < batch; ++b)
        for (std::size_t k = 0; k < g.out_channels; ++k)
            for (std::size_t y = 0; y < oh; ++y)
                for (std::size_t x = 0; x < ow; ++x) {
                    const double l =
                        static_cast<double>(loss[loss.idx4(b, k, y, x)]);
                    if (l == 0.0) continue;
                    for (std::size_t c = 0; c < g.in_channels; ++c)
                        for (std::size_t i = 0; i < g.kernel_h; ++i)
                            for (std::size_t j = 0; j < g.kernel_w; ++j) {
                                const std::int64_t sy =
                                    static_cast<std::int64_t>(y * g.stride + i) - pad;
                                const std::int64_t sx =
                                    static_cast<std::int64_t>(x * g.stride + j) - pad;
                                if (sy < 0 || sx < 0 ||
                                    sy >= static_cast<std::int64_t>(in_h) ||
                                    sx >= static_cast<std::int64_t>(in_w))
                                    continue;
                                const std::size_t in_at =
                                    input.idx4(b, c, static_cast<std::size_t>(sy),
                                               static_cast<std::size_t>(sx));
                                gw[weights.idx4(k, c, i, j)] +=
                                    static_cast<double>(input[in_at]) * l;
                                gi[in_at] +=
                                    static_cast<double>(weights[weights.idx4(k, c, i, j)]) * l;
                            }
                }

    const double inv_batch = 1.0 / static_cast<double>(batch);
    std::vector<T> gw_t(gw.size());
    for (std::size_t i = 0; i < gw.size(); ++i) gw_t[i] = static_cast<T>(gw[i] * inv_batch);
    std::vector<T> gi_t(gi.size());
    for (std::size_t i = 0; i < gi.size(); ++i) gi_t[i] = static_cast<T>(gi[i]);

    return {TensorT<T>(weights.shape(), std::move(gw_t)),
            TensorT<T>(input.shape(), std::move(gi_t))};
}

template <class T>
TensorT<T> relu_forward(const TensorT<T>& input) {
    std::vector<T> out(input.size());
    for (std::size_t i = 0; i < input.size(); ++i) out[i] = input[i] > T(0) ? input[i] : T(0);
    return TensorT<T>(input.shape(), std::move(out));
}

/// Gradient gated by input > 0. `gate` may be either the layer input or
/// its output: both have the same positivity pattern.
template <class T>
TensorT<T> relu_backward(const TensorT<T>& gate, const TensorT<T>& grad_out) {
    if (!gate.same_shape(grad_out)) throw ShapeError("relu_backward: shape mismatch");
    std::vector<T> out(gate.size());
    for (std::size_t i = 0; i < gate.size(); ++i)
        out[i] = gate[i] > T(0) ? grad_out[i] : T(0);
    return TensorT<T>(gate.shape(), std::move(out));
}

/// Re-zeroes negative values; idempotent on true post-ReLU data. The
/// alternative zero-restoration path when the codec filter is disabled.
template <class T>
TensorT<T> recompute_relu(const TensorT<T>& activation) {
    return relu_forward(activation);
}

struct PoolGeometry {
    std::size_t window = 2;
    std::size_t stride = 2;
};

template <class T>
struct PoolResult {
    TensorT<T> output;
    std::vector<std::uint32_t> argmax; // flat input index per output element
};

template <class T>
PoolResult<T> maxpool_forward(const TensorT<T>& input, const PoolGeometry& g) {
    if (input.rank() != 4) throw ShapeError("maxpool expects a 4-D tensor");
    const std::size_t batch = input.extent(0), ch = input.extent(1);
    const std::size_t in_h = input.extent(2), in_w = input.extent(3);
    if (in_h < g.window || in_w < g.window) throw ShapeError("maxpool window larger than input");
    const std::size_t oh = (in_h - g.window) / g.stride + 1;
    const std::size_t ow = (in_w - g.window) / g.stride + 1;

    std::vector<T> out(batch * ch * oh * ow);
    std::vector<std::uint32_t> argmax(out.size());
    std::size_t at = 0;
    for (std::size_t b = 0; b < batch; ++b)
        for (std::size_t c = 0; c < ch; ++c)
            for (std::size_t y = 0; y < oh; ++y)
                for (std::size_t x = 0; x < ow; ++x, ++at) {
                    T best = input[input.idx4(b, c, y * g.stride, x * g.stride)];
                    std::size_t best_at = input.idx4(b, c, y * g.stride, x * g.stride);
                    for (std::size_t i = 0; i < g.window; ++i)
                        for (std::size_t j = 0; j < g.window; ++j) {
                            const std::size_t idx =
                                input.idx4(b, c, y * g.stride + i, x * g.stride + j);
                            if (input[idx] > best) { // ties keep the first in scan order
                                best = input[idx];
                                best_at = idx;
                            }
                        }
                    out[at] = best;
                    argmax[at] = static_cast<std::uint32_t>(best_at);
                }
    return {TensorT<T>({batch, ch, oh, ow}, std::move(out)), std::move(argmax)};
}

template <class T>
TensorT<T> maxpool_backward(const std::vector<std::uint32_t>& argmax,
                            const std::vector<std::size_t>& input_shape,
                            const TensorT<T>& grad_out) {
    if (argmax.size() != grad_out.size()) throw ShapeError("maxpool_backward: argmax mismatch");
    std::size_t in_count = 1;
    for (std::size_t e : input_shape) in_count *= e;
    std::vector<T> out(in_count, T(0));
    for (std::size_t i = 0; i < grad_out.size(); ++i) out[argmax[i]] += grad_out[i];
    return TensorT<T>(input_shape, std::move(out));
}

template <class T>
struct FcGrad {
    TensorT<T> weights; // averaged over the batch
    TensorT<T> input;
};

/// input [N, D] x weights [O, D] -> [N, O]
template <class T>
TensorT<T> fc_forward(const TensorT<T>& input, const TensorT<T>& weights) {
    if (input.rank() != 2 || weights.rank() != 2) throw ShapeError("fc expects 2-D tensors");
    if (input.extent(1) != weights.extent(1)) throw ShapeError("fc: feature dim mismatch");
    const std::size_t batch = input.extent(0), dim = input.extent(1), out_dim = weights.extent(0);
    std::vector<T> out(batch * out_dim, T(0));
    for (std::size_t b = 0; b < batch; ++b)
        for (std::size_t o = 0; o < out_dim; ++o) {
            double acc = 0.0;
            for (std::size_t d = 0; d < dim; ++d)
                acc += static_cast<double>(input[b * dim + d]) *
                       static_cast<double>(weights[o * dim + d]);
            out[b * out_dim + o] = static_cast<T>(acc);
        }
    return TensorT<T>({batch, out_dim}, std::move(out));
}

template <class T>
FcGrad<T> fc_backward(const TensorT<T>& input, const TensorT<T>& weights,
                      const TensorT<T>& loss) {
    const std::size_t batch = input.extent(0), dim = input.extent(1), out_dim = weights.extent(0);
    if (loss.extent(0) != batch || loss.extent(1) != out_dim)
        throw ShapeError("fc_backward: loss shape mismatch");
    std::vector<double> gw(weights.size(), 0.0);
    std::vector<double> gi(input.size(), 0.0);
    for (std::size_t b = 0; b < batch; ++b)
        for (std::size_t o = 0; o < out_dim; ++o) {
            const double l = static_cast<double>(loss[b * out_dim + o]);
            if (l == 0.0) continue;
            for (std::size_t d = 0; d < dim; ++d) {
                gw[o * dim + d] += static_cast<double>(input[b * dim + d]) * l;
                gi[b * dim + d] += static_cast<double>(weights[o * dim + d]) * l;
            }
        }
    const double inv_batch = 1.0 / static_cast<double>(batch);
    std::vector<T> gw_t(gw.size());
    for (std::size_t i = 0; i < gw.size(); ++i) gw_t[i] = static_cast<T>(gw[i] * inv_batch);
    std::vector<T> gi_t(gi.size());
    for (std::size_t i = 0; i < gi.size(); ++i) gi_t[i] = static_cast<T>(gi[i]);
    return {TensorT<T>(weights.shape(), std::move(gw_t)),
            TensorT<T>(input.shape(), std::move(gi_t))};
}

template <class T>
struct XentResult {
    double mean_loss;      // over the batch
    TensorT<T> grad;       // per-sample d(loss_b)/d(logits_b), no 1/N
};

/// Softmax cross-entropy from logits [N, K] against integer labels.
template <class T>
XentResult<T> softmax_xent(const TensorT<T>& logits, const std::vector<std::uint16_t>& labels) {
    if (logits.rank() != 2) throw ShapeError("softmax_xent expects [N, K] logits");
    const std::size_t batch = logits.extent(0), classes = logits.extent(1);
    if (labels.size() != batch) throw ShapeError("softmax_xent: label count mismatch");

    std::vector<T> grad(logits.size());
    double total = 0.0;
    for (std::size_t b = 0; b < batch; ++b) {
        if (labels[b] >= classes) throw DomainError("softmax_xent: label out of range");
        double mx = logits[b * classes];
        for (std::size_t k = 1; k < classes; ++k)
            mx = std::max(mx, static_cast<double>(logits[b * classes + k]));
        double denom = 0.0;
        for (std::size_t k = 0; k < classes; ++k)
            denom += std::exp(static_cast<double>(logits[b * classes + k]) - mx);
        for (std::size_t k = 0; k < classes; ++k) {
            const double p =
                std::exp(static_cast<double>(logits[b * classes + k]) - mx) / denom;
            grad[b * classes + k] = static_cast<T>(p - (labels[b] == k ? 1.0 : 0.0));
        }
        const double p_true =
            std::exp(static_cast<double>(logits[b * classes + labels[b]]) - mx) / denom;
        total += -std::log(p_true);
    }
    return {total / static_cast<double>(batch), TensorT<T>(logits.shape(), std::move(grad))};
}

} // namespace acz::nn
