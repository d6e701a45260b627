#include "acz/controller.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>

#include "acz/error_analysis.hpp"
#include "acz/nn/layers.hpp"
#include "acz/tensor_io.hpp"

namespace acz {

void ControllerConfig::validate() const {
    if (collect_interval < 1) throw ParamError("collect_interval (W) must be >= 1");
    if (!(sigma_fraction > 0.0)) throw ParamError("sigma_fraction must be positive");
    if (!(coefficient_a > 0.0)) throw ParamError("coefficient_a must be positive");
    if (!(eb_min > 0.0) || !(eb_min <= eb_max))
        throw ParamError("error-bound clamps must satisfy 0 < eb_min <= eb_max");
    CodecParams{eb_min, quant_radius, predictor}.validate();
}

ControllerConfig ControllerConfig::from_config(const Config& cfg) {
    ControllerConfig c;
    c.collect_interval = cfg.get_int("W", c.collect_interval);
    c.sigma_fraction = cfg.get_double("sigma_fraction", c.sigma_fraction);
    c.coefficient_a = cfg.get_double("coefficient_a", c.coefficient_a);
    c.eb_min = cfg.get_double("eb_min", c.eb_min);
    c.eb_max = cfg.get_double("eb_max", c.eb_max);
    const std::string zr = cfg.get_string("zero_restoration", "codec-filter");
    if (zr == "codec-filter")
        c.zero_restoration = ZeroRestoration::CodecFilter;
    else if (zr == "relu-recompute")
        c.zero_restoration = ZeroRestoration::ReluRecompute;
    else
        throw ConfigError("zero_restoration must be codec-filter or relu-recompute");
    const std::string pred = cfg.get_string("predictor", "prev");
    if (pred == "prev")
        c.predictor = Predictor::PrevValue;
    else if (pred == "lorenzo2d")
        c.predictor = Predictor::Lorenzo2d;
    else
        throw ConfigError("predictor must be prev or lorenzo2d");
    c.quant_radius = static_cast<std::uint32_t>(cfg.get_int("quant_radius", c.quant_radius));
    c.validate();
    return c;
}

void ControllerConfig::apply_to(Config& cfg) const {
    char buf[64];
    cfg.set("W", std::to_string(collect_interval));
    std::snprintf(buf, sizeof(buf), "%.17g", sigma_fraction);
    cfg.set("sigma_fraction", buf);
    std::snprintf(buf, sizeof(buf), "%.17g", coefficient_a);
    cfg.set("coefficient_a", buf);
    std::snprintf(buf, sizeof(buf), "%.17g", eb_min);
    cfg.set("eb_min", buf);
    std::snprintf(buf, sizeof(buf), "%.17g", eb_max);
    cfg.set("eb_max", buf);
    cfg.set("zero_restoration", zero_restoration == ZeroRestoration::CodecFilter
                                    ? "codec-filter"
                                    : "relu-recompute");
    cfg.set("predictor", predictor == Predictor::PrevValue ? "prev" : "lorenzo2d");
    cfg.set("quant_radius", std::to_string(quant_radius));
}

std::string CompressionLedger::to_csv() const {
    std::string out = "iteration,layer,eb,predicted_sigma,L_bar,R,M_avg,ratio,fallback_flag\n";
    char line[256];
    for (const auto& r : records_) {
        std::snprintf(line, sizeof(line), "%lld,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n",
                      static_cast<long long>(r.iteration), r.layer_id, r.eb, r.predicted_sigma,
                      r.l_bar, r.r, r.m_avg, r.ratio, r.fallback ? 1 : 0);
        out += line;
    }
    return out;
}

void CompressionLedger::write_csv(const std::string& path) const {
    write_file_text(path, to_csv());
}

ActivationHandle ActivationHandle::pass_through(Tensor&& t, int layer_id) {
    ActivationHandle h;
    h.held_bytes = t.size() * sizeof(float);
    h.raw = std::move(t);
    h.layer_id = layer_id;
    h.achieved_ratio = 1.0;
    return h;
}

Controller::Controller(const ControllerConfig& cfg, int num_layers) : cfg_(cfg) {
    cfg_.validate();
    if (num_layers < 0) throw ParamError("controller needs a non-negative layer count");
    windows_.resize(static_cast<std::size_t>(num_layers));
}

void Controller::begin_iteration(std::int64_t iteration) {
    if (iteration < 0) throw ParamError("iteration must be >= 0");
    iteration_ = iteration;
}

bool Controller::collecting() const { return iteration_ % cfg_.collect_interval == 0; }

void Controller::close_window(int layer) {
    Window& w = windows_[static_cast<std::size_t>(layer)];
    if (!w.open) return;
    LedgerRecord rec;
    rec.iteration = w.stats.collected_at;
    rec.layer_id = layer;
    rec.eb = w.fallback ? 0.0 : w.eb;
    rec.predicted_sigma = w.fallback ? 0.0 : w.sigma;
    rec.l_bar = w.stats.l_bar;
    rec.r = w.stats.r;
    rec.m_avg = w.stats.m_avg;
    rec.ratio = w.bytes_stored == 0
                    ? 1.0
                    : static_cast<double>(w.bytes_in) / static_cast<double>(w.bytes_stored);
    rec.fallback = w.fallback;
    ledger_.append(rec);
    w.open = false;
}

LayerStats Controller::collect_stats(int layer, const Tensor& activation, const Tensor& loss,
                                     const Tensor& momentum, std::size_t batch) {
    if (layer < 0 || static_cast<std::size_t>(layer) >= windows_.size())
        throw ParamError("collect_stats: unknown layer id");
    if (!collecting())
        throw ParamError("collect_stats invoked outside a collection iteration");

    LayerStats stats;
    stats.layer_id = layer;
    stats.l_bar = mean_abs(loss);
    stats.r = nonzero_ratio(activation);
    stats.m_avg = mean_abs(momentum);
    stats.batch = batch;
    stats.collected_at = iteration_;
    stats.degenerate = stats.l_bar == 0.0 || stats.m_avg == 0.0 || stats.r == 0.0;

    close_window(layer); // previous window, if any

    Window& w = windows_[static_cast<std::size_t>(layer)];
    w = Window{};
    w.stats = stats;
    w.open = true;
    if (!stats.degenerate) {
        w.sigma = target_sigma(stats, cfg_);
        w.eb = compute_error_bound(stats, w.sigma, cfg_);
        w.fallback = false;
    }
    return stats;
}

double Controller::target_sigma(const LayerStats& stats, const ControllerConfig& cfg) {
    if (!(stats.m_avg > 0.0)) throw ParamError("target_sigma: degenerate M_avg");
    return cfg.sigma_fraction * stats.m_avg;
}

double Controller::compute_error_bound(const LayerStats& stats, double sigma,
                                       const ControllerConfig& cfg) {
    if (!(sigma > 0.0)) throw ParamError("compute_error_bound: sigma must be positive");
    if (!(stats.l_bar > 0.0) || !(stats.r > 0.0))
        throw ParamError("compute_error_bound: degenerate stats");
    const double eb =
        sigma / (cfg.coefficient_a * stats.l_bar *
                 std::sqrt(static_cast<double>(stats.batch) * stats.r));
    return std::clamp(eb, cfg.eb_min, cfg.eb_max);
}

bool Controller::layer_active(int layer) const {
    if (layer < 0 || static_cast<std::size_t>(layer) >= windows_.size()) return false;
    const Window& w = windows_[static_cast<std::size_t>(layer)];
    // Stats drive compression from the iteration after collection.
    return w.open && !w.fallback && iteration_ > w.stats.collected_at;
}

double Controller::layer_eb(int layer) const {
    return layer_active(layer) ? windows_[static_cast<std::size_t>(layer)].eb : 0.0;
}

const LayerStats* Controller::layer_stats(int layer) const {
    if (layer < 0 || static_cast<std::size_t>(layer) >= windows_.size()) return nullptr;
    const Window& w = windows_[static_cast<std::size_t>(layer)];
    return w.open ? &w.stats : nullptr;
}

void Controller::account_add(std::size_t bytes) {
    current_bytes_ += bytes;
    peak_bytes_ = std::max(peak_bytes_, current_bytes_);
}

void Controller::account_sub(std::size_t bytes) { current_bytes_ -= bytes; }

ActivationHandle Controller::wrap_forward(int layer, Tensor&& activation, bool is_post_relu) {
    if (layer < 0 || static_cast<std::size_t>(layer) >= windows_.size())
        throw ParamError("wrap_forward: unknown layer id");
    const std::uint64_t in_bytes = activation.size() * sizeof(float);
    ActivationHandle h;
    h.layer_id = layer;

    if (!layer_active(layer)) {
        h = ActivationHandle::pass_through(std::move(activation), layer);
    } else {
        Window& w = windows_[static_cast<std::size_t>(layer)];
        try {
            CodecParams params{w.eb, cfg_.quant_radius, cfg_.predictor};
            CompressedTensor blob = compress(activation, params);
            h.held_bytes = blob.compressed_bytes;
            h.achieved_ratio = compression_ratio(blob);
            if (cfg_.zero_restoration == ZeroRestoration::ReluRecompute && is_post_relu)
                h.apply_relu = true; // negatives re-zeroed by the recomputed activation
            else
                h.zero_filter = true;
            h.blob = std::move(blob);
            activation = Tensor(); // release the original buffer
        } catch (const Error& e) {
            std::cerr << "warning: compression failed for layer " << layer << " ("
                      << e.what() << "); passing through\n";
            h = ActivationHandle::pass_through(std::move(activation), layer);
        }
    }

    Window& w = windows_[static_cast<std::size_t>(layer)];
    if (w.open) {
        w.bytes_in += in_bytes;
        w.bytes_stored += h.held_bytes;
    }
    total_in_ += in_bytes;
    total_stored_ += h.held_bytes;
    account_add(h.held_bytes);
    return h;
}

Tensor Controller::unwrap_backward(ActivationHandle& handle) {
    if (handle.raw) {
        Tensor t = std::move(*handle.raw);
        handle.raw.reset();
        account_sub(handle.held_bytes);
        handle.held_bytes = 0;
        return t;
    }
    if (!handle.blob) throw ParamError("unwrap_backward: handle already consumed");
    Tensor t = decompress(*handle.blob, handle.zero_filter);
    if (handle.apply_relu) t = nn::recompute_relu(t);
    handle.blob.reset();
    account_sub(handle.held_bytes);
    handle.held_bytes = 0;
    return t;
}

void Controller::finalize() {
    for (std::size_t i = 0; i < windows_.size(); ++i) close_window(static_cast<int>(i));
}

} // namespace acz
