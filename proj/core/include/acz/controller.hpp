#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "acz/codec.hpp"
#include "acz/config.hpp"
#include "acz/tensor.hpp"

namespace acz {

enum class ZeroRestoration { CodecFilter, ReluRecompute };

/// Knobs of the adaptive compression framework.
struct ControllerConfig {
    std::int64_t collect_interval = 1000; // W: stats refresh period, iterations
    double sigma_fraction = 0.01;         // target sigma as a fraction of mean |momentum|
    double coefficient_a = 0.32;          // estimator coefficient (overridable by a fitted value)
    double eb_min = 1e-8;
    double eb_max = 1e-1;
    ZeroRestoration zero_restoration = ZeroRestoration::CodecFilter;
    Predictor predictor = Predictor::PrevValue;
    std::uint32_t quant_radius = 32768;

    void validate() const;
    static ControllerConfig from_config(const Config& cfg);
    void apply_to(Config& cfg) const;
};

/// Semi-online parameters sampled for one layer every W iterations.
struct LayerStats {
    int layer_id = -1;
    double l_bar = 0.0;  // mean |loss| per element at the layer's output gradient
    double r = 0.0;      // nonzero ratio of the layer's activation
    double m_avg = 0.0;  // mean |momentum| of the layer's weights
    std::size_t batch = 0;
    std::int64_t collected_at = -1;
    bool degenerate = false; // stats unusable; layer stays uncompressed this window
};

struct LedgerRecord {
    std::int64_t iteration; // collection iteration that opened the window
    int layer_id;
    double eb;
    double predicted_sigma;
    double l_bar, r, m_avg;
    double ratio; // aggregate bytes-in / bytes-stored over the window
    bool fallback;
};

/// Append-only per-(layer, window) history of compression decisions.
class CompressionLedger {
public:
    void append(const LedgerRecord& rec) { records_.push_back(rec); }
    const std::vector<LedgerRecord>& records() const { return records_; }
    std::string to_csv() const;
    void write_csv(const std::string& path) const;

private:
    std::vector<LedgerRecord> records_;
};

/// Owns a stashed activation: either the raw tensor (pass-through) or the
/// compressed blob. Exactly one is engaged; a compressed handle never
/// holds the uncompressed data.
struct ActivationHandle {
    std::optional<Tensor> raw;
    std::optional<CompressedTensor> blob;
    bool apply_relu = false;  // stash is a post-ReLU activation; re-zero negatives on unwrap
    bool zero_filter = false; // decompress with the codec's zero filter
    int layer_id = -1;
    std::size_t held_bytes = 0;
    double achieved_ratio = 1.0;

    static ActivationHandle pass_through(Tensor&& t, int layer_id = -1);
};

/// Four-phase adaptive scheme: collect stats every W iterations during
/// the backward pass, derive the acceptable gradient sigma from the mean
/// momentum, invert the sigma estimator into a per-layer error bound,
/// and compress/decompress conv activations between forward and backward.
/// Stats collected at iteration k*W drive compression until the next
/// collection replaces them; the first window runs uncompressed because
/// iteration 0 sees all-zero momentum.
class Controller {
public:
    Controller(const ControllerConfig& cfg, int num_layers);

    void begin_iteration(std::int64_t iteration);
    std::int64_t iteration() const { return iteration_; }
    bool collecting() const; // true on iterations == 0 (mod W)

    /// Phase 1: snapshot L_bar, R and mean |momentum| for one layer.
    /// Degenerate stats (zero loss, zero momentum, all-zero activation)
    /// put the layer in pass-through mode for the window.
    LayerStats collect_stats(int layer, const Tensor& activation, const Tensor& loss,
                             const Tensor& momentum, std::size_t batch);

    /// Phase 2: sigma = sigma_fraction * M_avg.
    static double target_sigma(const LayerStats& stats, const ControllerConfig& cfg);

    /// Phase 3: eb = sigma / (a * L_bar * sqrt(N * R)), clamped to
    /// [eb_min, eb_max].
    static double compute_error_bound(const LayerStats& stats, double sigma,
                                      const ControllerConfig& cfg);

    /// Phase 4, forward side: compress if the layer has a valid bound this
    /// window, otherwise pass through. Codec failures degrade to
    /// pass-through instead of aborting training.
    ActivationHandle wrap_forward(int layer, Tensor&& activation, bool is_post_relu);

    /// Phase 4, backward side. Consumes the handle. Decode failures are
    /// unrecoverable (the handle owned the only copy) and propagate.
    Tensor unwrap_backward(ActivationHandle& handle);

    bool layer_active(int layer) const;
    double layer_eb(int layer) const;
    const LayerStats* layer_stats(int layer) const;

    /// Closes open windows into ledger records. Called at the end of a run
    /// (window boundaries close themselves).
    void finalize();
    const CompressionLedger& ledger() const { return ledger_; }

    std::size_t current_stash_bytes() const { return current_bytes_; }
    std::size_t peak_stash_bytes() const { return peak_bytes_; }
    std::uint64_t total_bytes_in() const { return total_in_; }
    std::uint64_t total_bytes_stored() const { return total_stored_; }

private:
    struct Window {
        LayerStats stats;
        double eb = 0.0;
        double sigma = 0.0;
        bool fallback = true;
        bool open = false;
        std::uint64_t bytes_in = 0;
        std::uint64_t bytes_stored = 0;
    };

    void close_window(int layer);
    void account_add(std::size_t bytes);
    void account_sub(std::size_t bytes);

    ControllerConfig cfg_;
    std::vector<Window> windows_;
    CompressionLedger ledger_;
    std::int64_t iteration_ = 0;
    std::size_t current_bytes_ = 0;
    std::size_t peak_bytes_ = 0;
    std::uint64_t total_in_ = 0;
    std::uint64_t total_stored_ = 0;
};

} // namespace acz
