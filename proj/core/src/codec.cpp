#include "acz/codec.hpp"

#include <cmath>
#include <cstring>

#include "acz/bytes.hpp"
#include "acz/tensor_io.hpp"

namespace acz {

namespace {

constexpr char kMagic[4] = {'A', 'C', 'Z', '1'};
constexpr std::uint8_t kVersion = 1;
constexpr std::uint32_t kEscape = 0; // quantization symbol reserved for outliers

// The tensor is scanned as a stack of 2-D planes: the trailing two
// dimensions form the plane, every leading dimension is flattened into
// the plane count. Both predictors reset at plane boundaries, which for
// [N,C,H,W] activations is the per-channel scan.
struct PlaneView {
    std::size_t planes = 1, rows = 1, cols = 1;

    explicit PlaneView(const std::vector<std::size_t>& shape) {
        if (shape.empty()) return;
        if (shape.size() == 1) {
            cols = shape[0];
            return;
        }
        rows = shape[shape.size() - 2];
        cols = shape[shape.size() - 1];
        for (std::size_t i = 0; i + 2 < shape.size(); ++i) planes *= shape[i];
    }
};

inline double predict(Predictor pred, const float* plane, std::size_t cols, std::size_t r,
                      std::size_t c) {
    const std::size_t at = r * cols + c;
    switch (pred) {
    case Predictor::PrevValue:
        return at == 0 ? 0.0 : static_cast<double>(plane[at - 1]);
    case Predictor::Lorenzo2d: {
        double left = c > 0 ? plane[at - 1] : 0.0;
        double top = r > 0 ? plane[at - cols] : 0.0;
        double topleft = (r > 0 && c > 0) ? plane[at - cols - 1] : 0.0;
        return left + top - topleft;
    }
    }
    return 0.0;
}

} // namespace

void CodecParams::validate() const {
    if (!(eb > 0.0) || !std::isfinite(eb)) throw ParamError("error bound must be positive");
    if (quant_radius < 2 || quant_radius > (1u << 24) ||
        (quant_radius & (quant_radius - 1)) != 0)
        throw ParamError("quant_radius must be a power of two in [2, 2^24]");
}

CompressedTensor compress(const Tensor& t, const CodecParams& p) {
    p.validate();
    if (t.empty()) throw DomainError("compress: empty tensor");

    const double eb = p.eb;
    const double step = 2.0 * eb;
    const std::int64_t radius = p.quant_radius;
    const PlaneView view(t.shape());
    const std::size_t n = t.size();
    const float* src = t.data();

    std::vector<float> recon(view.rows * view.cols); // per-plane reconstruction
    std::vector<std::uint32_t> symbols(n);
    std::vector<Outlier> outliers;

    std::size_t flat = 0;
    for (std::size_t pl = 0; pl < view.planes; ++pl) {
        for (std::size_t r = 0; r < view.rows; ++r) {
            for (std::size_t c = 0; c < view.cols; ++c, ++flat) {
                const double orig = src[flat];
                const double pred = predict(p.predictor, recon.data(), view.cols, r, c);
                const double q = std::round((orig - pred) / step); // ties away from zero
                float value;
                std::uint32_t sym = kEscape;
                if (std::abs(q) < static_cast<double>(radius)) {
                    const float cand = static_cast<float>(pred + q * step);
                    // Single-precision rounding can push the reconstruction
                    // past the bound for tiny eb; verify and fall back.
                    if (std::isfinite(cand) &&
                        std::abs(orig - static_cast<double>(cand)) <= eb) {
                        sym = static_cast<std::uint32_t>(static_cast<std::int64_t>(q) + radius);
                        value = cand;
                    } else {
                        value = src[flat];
                    }
                } else {
                    value = src[flat];
                }
                if (sym == kEscape) outliers.push_back({flat, src[flat]});
                symbols[flat] = sym;
                recon[r * view.cols + c] = value;
            }
        }
    }

    HuffmanCode code = huffman_encode(symbols);
    if (code.codebook.size() > 0xFFFF)
        throw FormatError("codebook exceeds the 65535-entry limit of the blob format");

    CompressedTensor out;
    out.shape = t.shape();
    out.params = p;
    out.codebook = std::move(code.codebook);
    out.bitstream = std::move(code.bits);
    out.bit_length = code.bit_length;
    out.outliers = std::move(outliers);
    out.uncompressed_bytes = static_cast<std::uint64_t>(n) * sizeof(float);
    out.compressed_bytes = blob_to_bytes(out).size();
    return out;
}

Tensor decompress(const CompressedTensor& c, bool zero_filter) {
    c.params.validate();
    const std::size_t n = c.element_count();
    if (n == 0) throw FormatError("blob describes an empty tensor");

    auto symbols = huffman_decode(c.codebook, c.bitstream.data(), c.bit_length, n);

    const double eb = c.params.eb;
    const double step = 2.0 * eb;
    const std::int64_t radius = c.params.quant_radius;
    const PlaneView view(c.shape);

    std::vector<float> out(n);
    std::vector<float> recon(view.rows * view.cols);
    std::size_t next_outlier = 0;

    std::size_t flat = 0;
    for (std::size_t pl = 0; pl < view.planes; ++pl) {
        for (std::size_t r = 0; r < view.rows; ++r) {
            for (std::size_t c2 = 0; c2 < view.cols; ++c2, ++flat) {
                float value;
                if (symbols[flat] == kEscape) {
                    if (next_outlier >= c.outliers.size())
                        throw FormatError("escape symbol without a matching outlier record");
                    const Outlier& o = c.outliers[next_outlier++];
                    if (o.index != flat)
                        throw FormatError("outlier index " + std::to_string(o.index) +
                                          " does not match scan position " +
                                          std::to_string(flat));
                    value = o.value;
                } else {
                    const double pred =
                        predict(c.params.predictor, recon.data(), view.cols, r, c2);
                    const double q =
                        static_cast<double>(static_cast<std::int64_t>(symbols[flat]) - radius);
                    value = static_cast<float>(pred + q * step);
                }
                // The prediction chain must see the unfiltered value, exactly
                // as the compressor did; the filter applies to the output only.
                recon[r * view.cols + c2] = value;
                out[flat] = (zero_filter && std::abs(static_cast<double>(value)) <= eb)
                                ? 0.0f
                                : value;
            }
        }
    }
    if (next_outlier != c.outliers.size())
        throw FormatError("blob contains unused outlier records");
    return Tensor(c.shape, std::move(out));
}

double compression_ratio(const CompressedTensor& c) {
    return static_cast<double>(c.uncompressed_bytes) / static_cast<double>(c.compressed_bytes);
}

std::vector<std::uint8_t> blob_to_bytes(const CompressedTensor& c) {
    ByteWriter w;
    w.raw(kMagic, 4);
    w.u8(kVersion);
    w.u8(static_cast<std::uint8_t>(c.params.predictor));
    w.u8(static_cast<std::uint8_t>(c.shape.size()));
    for (std::size_t e : c.shape) w.u64(e);
    w.f64(c.params.eb);
    w.u32(c.params.quant_radius);
    w.u32(static_cast<std::uint32_t>(c.outliers.size()));
    w.u16(static_cast<std::uint16_t>(c.codebook.size()));
    for (const auto& e : c.codebook) {
        w.u32(e.symbol);
        w.u8(e.length);
    }
    w.u64(c.bit_length);
    w.raw(c.bitstream.data(), c.bitstream.size());
    for (const auto& o : c.outliers) {
        w.u64(o.index);
        w.f32(o.value);
    }
    return w.take();
}

CompressedTensor blob_from_bytes(const std::uint8_t* data, std::size_t size) {
    ByteReader r(data, size);
    const std::uint8_t* m = r.raw(4);
    if (std::memcmp(m, kMagic, 4) != 0)
        throw FormatError("bad blob magic at offset 0 (expected \"ACZ1\")");
    std::uint8_t version = r.u8();
    if (version != kVersion)
        throw FormatError("unsupported blob version " + std::to_string(version) +
                          " at offset 4");

    CompressedTensor c;
    std::uint8_t pred = r.u8();
    if (pred > 1) throw FormatError("unknown predictor id " + std::to_string(pred));
    c.params.predictor = static_cast<Predictor>(pred);

    std::uint8_t rank = r.u8();
    if (rank == 0) throw FormatError("blob rank must be >= 1");
    std::size_t count = 1;
    c.shape.resize(rank);
    for (std::size_t i = 0; i < rank; ++i) {
        c.shape[i] = static_cast<std::size_t>(r.u64());
        if (c.shape[i] == 0) throw FormatError("zero extent in blob header");
        count *= c.shape[i];
    }

    c.params.eb = r.f64();
    c.params.quant_radius = r.u32();
    c.params.validate();

    std::uint32_t outlier_count = r.u32();
    std::uint16_t book_size = r.u16();
    if (book_size == 0) throw FormatError("empty codebook");
    c.codebook.resize(book_size);
    for (auto& e : c.codebook) {
        e.symbol = r.u32();
        e.length = r.u8();
    }

    c.bit_length = r.u64();
    std::size_t byte_len = static_cast<std::size_t>((c.bit_length + 7) / 8);
    const std::uint8_t* bits = r.raw(byte_len);
    c.bitstream.assign(bits, bits + byte_len);

    c.outliers.resize(outlier_count);
    std::uint64_t prev_index = 0;
    for (std::size_t i = 0; i < outlier_count; ++i) {
        c.outliers[i].index = r.u64();
        c.outliers[i].value = r.f32();
        if (c.outliers[i].index >= count)
            throw FormatError("outlier index out of range");
        if (i > 0 && c.outliers[i].index <= prev_index)
            throw FormatError("outlier indices are not strictly increasing");
        prev_index = c.outliers[i].index;
    }
    if (r.remaining() != 0)
        throw FormatError("trailing bytes after blob at offset " +
                          std::to_string(r.offset()));

    c.uncompressed_bytes = static_cast<std::uint64_t>(count) * sizeof(float);
    c.compressed_bytes = size;
    return c;
}

void write_blob_file(const std::string& path, const CompressedTensor& c) {
    write_file_bytes(path, blob_to_bytes(c));
}

CompressedTensor read_blob_file(const std::string& path) {
    auto bytes = read_file_bytes(path);
    return blob_from_bytes(bytes.data(), bytes.size());
}

} // namespace acz
