#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "acz/tensor.hpp"

namespace acz::nn {

/// Labelled image set. Images are [count, C, H, W] floats, labels are
/// class indices < num_classes.
struct Dataset {
    Tensor images;
    std::vector<std::uint16_t> labels;
    std::size_t num_classes = 0;

    std::size_t count() const { return images.empty() ? 0 : images.extent(0); }
    std::vector<std::size_t> sample_chw() const {
        return {images.extent(1), images.extent(2), images.extent(3)};
    }
};

/// IDX image/label pair (the MNIST container format). Pixels are scaled
/// to [0, 1].
Dataset load_idx(const std::string& images_path, const std::string& labels_path);

/// Raw-tensor pair: images as a [count,C,H,W] TNSR file, labels as a
/// [count] TNSR file holding class indices as floats.
Dataset load_tnsr_dataset(const std::string& images_path, const std::string& labels_path);
void save_tnsr_dataset(const Dataset& ds, const std::string& images_path,
                       const std::string& labels_path);

/// Built-in classification task: each class is a fixed smooth prototype
/// pattern; samples are randomly shifted copies with additive noise,
/// clamped to [0, 1]. Deterministic for a fixed seed.
Dataset make_synthetic(std::size_t count, std::size_t classes, std::size_t height,
                       std::size_t width, double noise, std::uint64_t seed);

/// Two linearly separable point clouds rendered into [count,1,H,W]
/// tensors; used for training sanity checks.
Dataset make_separable_2class(std::size_t count, std::size_t height, std::size_t width,
                              std::uint64_t seed);

/// Extracts samples `order[first, first+batch)` into a [batch,C,H,W]
/// tensor plus labels.
struct Batch {
    Tensor images;
    std::vector<std::uint16_t> labels;
};
Batch take_batch(const Dataset& ds, const std::vector<std::uint32_t>& order, std::size_t first,
                 std::size_t batch);

} // namespace acz::nn
