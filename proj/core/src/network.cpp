#include "acz/nn/network.hpp"

#include <sstream>

#include "acz/error.hpp"

namespace acz::nn {

namespace {

std::size_t parse_size(const std::string& key, const std::string& value) {
    try {
        long long v = std::stoll(value);
        if (v <= 0) throw ConfigError("layer parameter " + key + " must be positive");
        return static_cast<std::size_t>(v);
    } catch (const std::invalid_argument&) {
        throw ConfigError("layer parameter " + key + " is not an integer: " + value);
    } catch (const std::out_of_range&) {
        throw ConfigError("layer parameter " + key + " out of range: " + value);
    }
}

} // namespace

std::vector<LayerSpec> parse_architecture(const std::string& text) {
    std::vector<LayerSpec> specs;
    std::istringstream lines(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(lines, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream words(line);
        std::string kind;
        if (!(words >> kind)) continue; // blank line

        LayerSpec s{};
        if (kind == "conv2d")
            s.kind = LayerKind::Conv2d;
        else if (kind == "relu")
            s.kind = LayerKind::Relu;
        else if (kind == "maxpool")
            s.kind = LayerKind::Maxpool;
        else if (kind == "fc")
            s.kind = LayerKind::FullyConnected;
        else if (kind == "softmax_xent")
            s.kind = LayerKind::SoftmaxXent;
        else
            throw ConfigError("architecture line " + std::to_string(lineno) +
                              ": unknown layer kind '" + kind + "'");

        std::string kv;
        while (words >> kv) {
            auto eq = kv.find('=');
            if (eq == std::string::npos)
                throw ConfigError("architecture line " + std::to_string(lineno) +
                                  ": expected key=value, got '" + kv + "'");
            const std::string key = kv.substr(0, eq);
            const std::string value = kv.substr(eq + 1);
            if (s.kind == LayerKind::Conv2d && key == "out")
                s.out_channels = parse_size(key, value);
            else if (s.kind == LayerKind::Conv2d && key == "kernel") {
                auto x = value.find('x');
                if (x == std::string::npos) {
                    s.kernel_h = s.kernel_w = parse_size(key, value);
                } else {
                    s.kernel_h = parse_size(key, value.substr(0, x));
                    s.kernel_w = parse_size(key, value.substr(x + 1));
                }
            } else if (s.kind == LayerKind::Conv2d && key == "stride")
                s.stride = parse_size(key, value);
            else if (s.kind == LayerKind::Conv2d && key == "pad")
                s.pad = value == "0" ? 0 : parse_size(key, value);
            else if (s.kind == LayerKind::Maxpool && key == "window")
                s.window = parse_size(key, value);
            else if (s.kind == LayerKind::Maxpool && key == "stride")
                s.pool_stride = parse_size(key, value);
            else if (s.kind == LayerKind::FullyConnected && key == "out")
                s.fc_out = parse_size(key, value);
            else
                throw ConfigError("architecture line " + std::to_string(lineno) +
                                  ": unknown parameter '" + key + "' for " + kind);
        }

        if (s.kind == LayerKind::Conv2d && (s.out_channels == 0 || s.kernel_h == 0))
            throw ConfigError("architecture line " + std::to_string(lineno) +
                              ": conv2d requires out= and kernel=");
        if (s.kind == LayerKind::FullyConnected && s.fc_out == 0)
            throw ConfigError("architecture line " + std::to_string(lineno) +
                              ": fc requires out=");
        specs.push_back(s);
    }
    if (specs.empty()) throw ConfigError("architecture is empty");
    if (specs.back().kind != LayerKind::SoftmaxXent)
        throw ConfigError("architecture must end with softmax_xent");
    for (std::size_t i = 0; i + 1 < specs.size(); ++i)
        if (specs[i].kind == LayerKind::SoftmaxXent)
            throw ConfigError("softmax_xent must be the last layer");
    return specs;
}

void resolve_architecture(std::vector<LayerSpec>& specs,
                          const std::vector<std::size_t>& input_chw) {
    if (input_chw.size() != 3) throw ConfigError("input shape must be [C,H,W]");
    std::size_t c = input_chw[0], h = input_chw[1], w = input_chw[2];
    bool flattened = false;
    std::size_t flat_dim = 0;

    for (auto& s : specs) {
        switch (s.kind) {
        case LayerKind::Conv2d: {
            if (flattened) throw ConfigError("conv2d after fc is not supported");
            s.in_channels = c;
            ConvGeometry g{s.in_channels, s.out_channels, s.kernel_h, s.kernel_w,
                           s.stride,      s.pad};
            h = g.out_h(h);
            w = g.out_w(w);
            c = s.out_channels;
            break;
        }
        case LayerKind::Relu:
            break;
        case LayerKind::Maxpool: {
            if (flattened) throw ConfigError("maxpool after fc is not supported");
            if (h < s.window || w < s.window)
                throw ConfigError("maxpool window exceeds feature map");
            h = (h - s.window) / s.pool_stride + 1;
            w = (w - s.window) / s.pool_stride + 1;
            break;
        }
        case LayerKind::FullyConnected:
            s.fc_in = flattened ? flat_dim : c * h * w;
            flattened = true;
            flat_dim = s.fc_out;
            break;
        case LayerKind::SoftmaxXent:
            if (!flattened)
                throw ConfigError("softmax_xent requires a preceding fc layer");
            break;
        }
    }
}

std::vector<int> weight_slots(const std::vector<LayerSpec>& specs) {
    std::vector<int> slots(specs.size(), -1);
    int next = 0;
    for (std::size_t i = 0; i < specs.size(); ++i)
        if (specs[i].kind == LayerKind::Conv2d || specs[i].kind == LayerKind::FullyConnected)
            slots[i] = next++;
    return slots;
}

std::vector<std::size_t> output_shape(const std::vector<LayerSpec>& specs,
                                      const std::vector<std::size_t>& input_chw) {
    auto copy = specs;
    resolve_architecture(copy, input_chw);
    std::size_t c = input_chw[0], h = input_chw[1], w = input_chw[2];
    std::size_t flat = 0;
    bool flattened = false;
    for (const auto& s : copy) {
        switch (s.kind) {
        case LayerKind::Conv2d: {
            ConvGeometry g{s.in_channels, s.out_channels, s.kernel_h, s.kernel_w,
                           s.stride,      s.pad};
            h = g.out_h(h);
            w = g.out_w(w);
            c = s.out_channels;
            break;
        }
        case LayerKind::Maxpool:
            h = (h - s.window) / s.pool_stride + 1;
            w = (w - s.window) / s.pool_stride + 1;
            break;
        case LayerKind::FullyConnected:
            flattened = true;
            flat = s.fc_out;
            break;
        default:
            break;
        }
    }
    if (flattened) return {flat};
    return {c, h, w};
}

} // namespace acz::nn
