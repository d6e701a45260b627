#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "acz/controller.hpp"
#include "acz/nn/data.hpp"
#include "acz/nn/network.hpp"

namespace acz {

struct TrainOptions {
    std::vector<nn::LayerSpec> arch; // resolved against the dataset shape
    double learning_rate = 0.01;
    double momentum = 0.9;
    std::size_t batch = 64;
    std::int64_t iterations = 0; // total training steps
    std::int64_t eval_every = 100;
    std::uint64_t seed = 1;
    bool compressed = false;
    ControllerConfig controller;
};

struct IterationRow {
    std::int64_t iteration;
    double loss;
    double eval_accuracy; // -1 when not evaluated at this step
    std::vector<double> conv_ratios;
};

struct TrainResult {
    std::vector<IterationRow> rows;
    double final_train_accuracy = 0.0;
    double final_test_accuracy = 0.0;
    CompressionLedger ledger;
    std::size_t peak_stash_bytes = 0; // conv-activation stash, forward high-water mark
    std::uint64_t conv_bytes_in = 0;
    std::uint64_t conv_bytes_stored = 0;
    double wall_seconds = 0.0;
    nn::TrainState state;
    std::vector<int> conv_layer_ids; // spec indices of conv layers, CSV column order
};

/// Runs `iterations` momentum-SGD steps over the dataset with a fixed
/// shuffle order derived from the seed. With opts.compressed, conv-layer
/// input activations are stashed through the adaptive controller between
/// forward and backward; otherwise they are stashed raw through the same
/// code path. Throws NumericalError when the loss stops being finite.
/// `on_epoch_end(epoch, state)` runs whenever the shuffle order wraps.
TrainResult train(const nn::Dataset& train_set, const nn::Dataset& test_set,
                  const TrainOptions& opts,
                  const std::function<void(std::int64_t, const nn::TrainState&)>& on_epoch_end =
                      nullptr);

/// Forward-only accuracy of the model on a dataset.
double evaluate(const std::vector<nn::LayerSpec>& arch, const std::vector<Tensor>& weights,
                const nn::Dataset& ds, std::size_t batch);

/// Per-iteration CSV: iteration, loss, eval accuracy (blank when not
/// measured), one ratio column per conv layer.
std::string rows_to_csv(const TrainResult& result);

// Checkpoints: TrainState tensors written in the raw tensor format plus a
// small meta.txt, one directory per checkpoint.
void save_checkpoint(const std::string& dir, const nn::TrainState& state);
nn::TrainState load_checkpoint(const std::string& dir);

} // namespace acz
