#include "acz/nn/data.hpp"

#include <algorithm>
#include <cmath>

#include "acz/error.hpp"
#include "acz/rng.hpp"
#include "acz/tensor_io.hpp"

namespace acz::nn {

namespace {

std::uint32_t read_be32(const std::uint8_t* p) {
    return (static_cast<std::uint32_t>(p[0]) << 24) | (static_cast<std::uint32_t>(p[1]) << 16) |
           (static_cast<std::uint32_t>(p[2]) << 8) | static_cast<std::uint32_t>(p[3]);
}

} // namespace

Dataset load_idx(const std::string& images_path, const std::string& labels_path) {
    auto img_bytes = read_file_bytes(images_path);
    if (img_bytes.size() < 16 || read_be32(img_bytes.data()) != 0x00000803)
        throw FormatError("not an IDX image file: " + images_path);
    const std::size_t count = read_be32(img_bytes.data() + 4);
    const std::size_t rows = read_be32(img_bytes.data() + 8);
    const std::size_t cols = read_be32(img_bytes.data() + 12);
    if (img_bytes.size() != 16 + count * rows * cols)
        throw FormatError("IDX image payload size mismatch: " + images_path);

    auto lbl_bytes = read_file_bytes(labels_path);
    if (lbl_bytes.size() < 8 || read_be32(lbl_bytes.data()) != 0x00000801)
        throw FormatError("not an IDX label file: " + labels_path);
    if (read_be32(lbl_bytes.data() + 4) != count)
        throw FormatError("IDX image/label count mismatch");
    if (lbl_bytes.size() != 8 + count)
        throw FormatError("IDX label payload size mismatch: " + labels_path);

    std::vector<float> pixels(count * rows * cols);
    for (std::size_t i = 0; i < pixels.size(); ++i)
        pixels[i] = static_cast<float>(img_bytes[16 + i]) / 255.0f;

    Dataset ds;
    ds.images = Tensor({count, 1, rows, cols}, std::move(pixels));
    ds.labels.resize(count);
    std::uint16_t max_label = 0;
    for (std::size_t i = 0; i < count; ++i) {
        ds.labels[i] = lbl_bytes[8 + i];
        max_label = std::max(max_label, ds.labels[i]);
    }
    ds.num_classes = max_label + 1u;
    return ds;
}

Dataset load_tnsr_dataset(const std::string& images_path, const std::string& labels_path) {
    Dataset ds;
    ds.images = read_tensor_file(images_path);
    if (ds.images.rank() != 4)
        throw FormatError("dataset image tensor must be [count,C,H,W]: " + images_path);
    Tensor labels = read_tensor_file(labels_path);
    if (labels.rank() != 1 || labels.extent(0) != ds.images.extent(0))
        throw FormatError("dataset label tensor must be [count]: " + labels_path);
    ds.labels.resize(labels.size());
    std::uint16_t max_label = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const float v = labels[i];
        if (v < 0.0f || v != std::floor(v) || v > 65535.0f)
            throw FormatError("label tensor holds a non-index value");
        ds.labels[i] = static_cast<std::uint16_t>(v);
        max_label = std::max(max_label, ds.labels[i]);
    }
    ds.num_classes = max_label + 1u;
    return ds;
}

void save_tnsr_dataset(const Dataset& ds, const std::string& images_path,
                       const std::string& labels_path) {
    write_tensor_file(images_path, ds.images);
    std::vector<float> labels(ds.labels.begin(), ds.labels.end());
    write_tensor_file(labels_path, Tensor({labels.size()}, std::move(labels)));
}

Dataset make_synthetic(std::size_t count, std::size_t classes, std::size_t height,
                       std::size_t width, double noise, std::uint64_t seed) {
    if (count == 0 || classes < 2 || height < 4 || width < 4)
        throw ConfigError("synthetic dataset needs count>0, classes>=2, size>=4x4");

    // Class prototypes: low-frequency random fields, normalized to [0,1].
    Rng proto_rng(mix_seed(seed, 0));
    std::vector<std::vector<double>> protos(classes,
                                            std::vector<double>(height * width, 0.0));
    for (auto& proto : protos) {
        // Sum of a few random sinusoids gives smooth, well-separated shapes.
        const int waves = 4;
        std::vector<double> amp(waves), fy(waves), fx(waves), ph(waves);
        for (int k = 0; k < waves; ++k) {
            amp[k] = 0.5 + uniform01(proto_rng);
            fy[k] = 1.0 + 2.5 * uniform01(proto_rng);
            fx[k] = 1.0 + 2.5 * uniform01(proto_rng);
            ph[k] = 6.2831853 * uniform01(proto_rng);
        }
        double lo = 1e300, hi = -1e300;
        for (std::size_t y = 0; y < height; ++y)
            for (std::size_t x = 0; x < width; ++x) {
                double v = 0.0;
                for (int k = 0; k < waves; ++k)
                    v += amp[k] * std::sin(fy[k] * y * 6.2831853 / height +
                                           fx[k] * x * 6.2831853 / width + ph[k]);
                proto[y * width + x] = v;
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
        for (auto& v : proto) v = (v - lo) / (hi - lo);
    }

    Rng sample_rng(mix_seed(seed, 1));
    std::vector<float> pixels(count * height * width);
    std::vector<std::uint16_t> labels(count);
    for (std::size_t s = 0; s < count; ++s) {
        const auto cls = static_cast<std::uint16_t>(sample_rng() % classes);
        labels[s] = cls;
        const int dy = static_cast<int>(sample_rng() % 5) - 2; // shift in [-2, 2]
        const int dx = static_cast<int>(sample_rng() % 5) - 2;
        float* img = pixels.data() + s * height * width;
        for (std::size_t y = 0; y < height; ++y)
            for (std::size_t x = 0; x < width; ++x) {
                const std::size_t sy = (y + height + static_cast<std::size_t>(dy + 2) - 2) % height;
                const std::size_t sx = (x + width + static_cast<std::size_t>(dx + 2) - 2) % width;
                double v = protos[cls][sy * width + sx] + noise * normal01(sample_rng);
                img[y * width + x] = static_cast<float>(std::clamp(v, 0.0, 1.0));
            }
    }

    Dataset ds;
    ds.images = Tensor({count, 1, height, width}, std::move(pixels));
    ds.labels = std::move(labels);
    ds.num_classes = classes;
    return ds;
}

Dataset make_separable_2class(std::size_t count, std::size_t height, std::size_t width,
                              std::uint64_t seed) {
    Rng rng(seed);
    std::vector<float> pixels(count * height * width);
    std::vector<std::uint16_t> labels(count);
    // Class 0 lights up the left half, class 1 the right half, plus noise
    // that never crosses the margin.
    for (std::size_t s = 0; s < count; ++s) {
        const std::uint16_t cls = static_cast<std::uint16_t>(rng() & 1);
        labels[s] = cls;
        float* img = pixels.data() + s * height * width;
        for (std::size_t y = 0; y < height; ++y)
            for (std::size_t x = 0; x < width; ++x) {
                const bool hot = (cls == 0) ? (x < width / 2) : (x >= width / 2);
                img[y * width + x] =
                    static_cast<float>((hot ? 0.8 : 0.1) + 0.05 * uniform01(rng));
            }
    }
    Dataset ds;
    ds.images = Tensor({count, 1, height, width}, std::move(pixels));
    ds.labels = std::move(labels);
    ds.num_classes = 2;
    return ds;
}

Batch take_batch(const Dataset& ds, const std::vector<std::uint32_t>& order, std::size_t first,
                 std::size_t batch) {
    const auto chw = ds.sample_chw();
    const std::size_t sample_size = chw[0] * chw[1] * chw[2];
    std::vector<float> pixels(batch * sample_size);
    std::vector<std::uint16_t> labels(batch);
    for (std::size_t i = 0; i < batch; ++i) {
        const std::size_t src = order[(first + i) % order.size()];
        const float* from = ds.images.data() + src * sample_size;
        std::copy(from, from + sample_size, pixels.data() + i * sample_size);
        labels[i] = ds.labels[src];
    }
    return {Tensor({batch, chw[0], chw[1], chw[2]}, std::move(pixels)), std::move(labels)};
}

} // namespace acz::nn
