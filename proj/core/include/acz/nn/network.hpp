#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "acz/nn/layers.hpp"
#include "acz/rng.hpp"
#include "acz/tensor.hpp"

namespace acz::nn {

enum class LayerKind { Conv2d, Relu, Maxpool, FullyConnected, SoftmaxXent };

struct LayerSpec {
    LayerKind kind;
    // conv
    std::size_t in_channels = 0, out_channels = 0;
    std::size_t kernel_h = 0, kernel_w = 0;
    std::size_t stride = 1, pad = 0;
    // pool
    std::size_t window = 2, pool_stride = 2;
    // fc
    std::size_t fc_out = 0, fc_in = 0;
};

/// Parses one layer per line, e.g.
///   conv2d out=8 kernel=3 stride=1 pad=1
///   relu
///   maxpool window=2 stride=2
///   fc out=10
///   softmax_xent
/// Unknown keys or kinds raise ConfigError. in_channels / fc_in are
/// inferred when the network is built against an input shape.
std::vector<LayerSpec> parse_architecture(const std::string& text);

/// Resolves inferred dimensions against an input shape [C,H,W] and
/// verifies every layer's output shape is computable.
void resolve_architecture(std::vector<LayerSpec>& specs,
                          const std::vector<std::size_t>& input_chw);

template <class T>
struct TrainStateT {
    std::vector<TensorT<T>> weights;
    std::vector<TensorT<T>> momentum; // mirrors weight shapes
    double learning_rate = 0.01;
    double momentum_coeff = 0.9;
    std::size_t batch_size = 0;
    std::int64_t iteration = 0;
};

using TrainState = TrainStateT<float>;

/// Classic momentum: m <- mu*m + g; w <- w - lr*m. Increments the
/// iteration counter.
template <class T>
void sgd_momentum_step(TrainStateT<T>& state, const std::vector<TensorT<T>>& grads) {
    if (grads.size() != state.weights.size())
        throw ShapeError("sgd_momentum_step: gradient count mismatch");
    for (std::size_t i = 0; i < state.weights.size(); ++i) {
        if (!grads[i].same_shape(state.weights[i]))
            throw ShapeError("sgd_momentum_step: gradient shape mismatch");
        std::vector<T> m(state.momentum[i].size());
        std::vector<T> w(state.weights[i].size());
        for (std::size_t j = 0; j < m.size(); ++j) {
            m[j] = static_cast<T>(state.momentum_coeff * state.momentum[i][j] + grads[i][j]);
            w[j] = static_cast<T>(state.weights[i][j] - state.learning_rate * m[j]);
        }
        state.momentum[i] = TensorT<T>(state.weights[i].shape(), std::move(m));
        state.weights[i] = TensorT<T>(state.weights[i].shape(), std::move(w));
    }
    ++state.iteration;
}

/// Kaiming-uniform init: bound = sqrt(6 / fan_in), seeded.
template <class T>
TensorT<T> kaiming_uniform(const std::vector<std::size_t>& shape, std::size_t fan_in, Rng& rng) {
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
    std::size_t n = 1;
    for (std::size_t e : shape) n *= e;
    std::vector<T> data(n);
    for (auto& v : data) v = static_cast<T>(uniform_pm(rng, bound));
    return TensorT<T>(shape, std::move(data));
}

template <class T>
std::vector<TensorT<T>> init_weights(const std::vector<LayerSpec>& specs, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<TensorT<T>> weights;
    for (const auto& s : specs) {
        switch (s.kind) {
        case LayerKind::Conv2d:
            weights.push_back(kaiming_uniform<T>(
                {s.out_channels, s.in_channels, s.kernel_h, s.kernel_w},
                s.in_channels * s.kernel_h * s.kernel_w, rng));
            break;
        case LayerKind::FullyConnected:
            weights.push_back(kaiming_uniform<T>({s.fc_out, s.fc_in}, s.fc_in, rng));
            break;
        default:
            break;
        }
    }
    return weights;
}

/// Index of the weight tensor owned by each layer, or -1 for
/// parameter-free layers.
std::vector<int> weight_slots(const std::vector<LayerSpec>& specs);

/// Output shape [C,H,W] after running the spec list over input_chw.
std::vector<std::size_t> output_shape(const std::vector<LayerSpec>& specs,
                                      const std::vector<std::size_t>& input_chw);

} // namespace acz::nn
