#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "acz/huffman.hpp"
#include "acz/tensor.hpp"

namespace acz {

enum class Predictor : std::uint8_t {
    PrevValue = 0, // previous reconstructed value in the per-plane scan
    Lorenzo2d = 1, // left + top - top-left within each trailing 2-D plane
};

struct CodecParams {
    double eb = 1e-4;                   // absolute error bound
    std::uint32_t quant_radius = 32768; // half-width of the code range, power of two
    Predictor predictor = Predictor::PrevValue;

    void validate() const;
};

struct Outlier {
    std::uint64_t index; // flat index, strictly increasing
    float value;         // stored verbatim
};

/// Self-describing compressed blob. Decompression reproduces a tensor of
/// identical shape with per-element absolute error <= params.eb.
struct CompressedTensor {
    std::vector<std::size_t> shape;
    CodecParams params;
    std::vector<CodebookEntry> codebook;
    std::vector<std::uint8_t> bitstream;
    std::uint64_t bit_length = 0;
    std::vector<Outlier> outliers;
    std::uint64_t uncompressed_bytes = 0;
    std::uint64_t compressed_bytes = 0; // size of to_bytes()

    std::size_t element_count() const {
        std::size_t n = 1;
        for (std::size_t e : shape) n *= e;
        return shape.empty() ? 0 : n;
    }
};

/// Predict/quantize/encode scan. The reconstruction loop feeds the
/// predictor with reconstructed values, so error never accumulates
/// beyond eb; elements whose code would leave the quantizer range (or
/// whose reconstruction would violate the bound in single precision)
/// are stored verbatim as outliers.
CompressedTensor compress(const Tensor& t, const CodecParams& p);

/// Inverse scan. With zero_filter on, every reconstructed value v with
/// |v| <= eb is replaced by exact zero: original zeros are restored
/// exactly, and filtered nonzero elements still satisfy |original| <= 2*eb.
Tensor decompress(const CompressedTensor& c, bool zero_filter = false);

double compression_ratio(const CompressedTensor& c);

// Blob file format ("ACZ1"), all integers little-endian:
//   magic "ACZ1" | u8 version=1 | u8 predictor | u8 rank | u64 extents...
//   | f64 eb | u32 quant_radius | u32 outlier_count
//   | u16 codebook_size | (u32 symbol, u8 length) per entry, canonical order
//   | u64 bitstream bit length | bitstream bytes (zero-padded to a byte)
//   | (u64 index, f32 value) per outlier
std::vector<std::uint8_t> blob_to_bytes(const CompressedTensor& c);
CompressedTensor blob_from_bytes(const std::uint8_t* data, std::size_t size);

void write_blob_file(const std::string& path, const CompressedTensor& c);
CompressedTensor read_blob_file(const std::string& path);

} // namespace acz
