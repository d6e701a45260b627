#include "acz/tensor_io.hpp"

#include <fstream>

#include "acz/bytes.hpp"

namespace acz {

static constexpr char kMagic[4] = {'T', 'N', 'S', 'R'};

std::vector<std::uint8_t> tensor_to_bytes(const Tensor& t) {
    if (t.empty()) throw DomainError("cannot serialize an empty tensor");
    ByteWriter w;
    w.raw(kMagic, 4);
    w.u8(static_cast<std::uint8_t>(t.rank()));
    for (std::size_t e : t.shape()) w.u64(e);
    for (float v : t.values()) w.f32(v);
    return w.take();
}

Tensor tensor_from_bytes(const std::uint8_t* data, std::size_t size) {
    ByteReader r(data, size);
    const std::uint8_t* m = r.raw(4);
    if (std::memcmp(m, kMagic, 4) != 0)
        throw FormatError("bad tensor magic at offset 0 (expected \"TNSR\")");
    std::size_t rank = r.u8();
    if (rank == 0) throw FormatError("tensor rank must be >= 1");
    std::vector<std::size_t> shape(rank);
    std::size_t count = 1;
    for (std::size_t i = 0; i < rank; ++i) {
        shape[i] = static_cast<std::size_t>(r.u64());
        if (shape[i] == 0) throw FormatError("zero extent in tensor header");
        count *= shape[i];
    }
    if (r.remaining() != count * 4)
        throw FormatError("payload size " + std::to_string(r.remaining()) +
                          " does not match header volume " + std::to_string(count * 4));
    std::vector<float> values(count);
    for (std::size_t i = 0; i < count; ++i) values[i] = r.f32();
    return Tensor(std::move(shape), std::move(values));
}

void write_file_bytes(const std::string& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open for writing: " + path);
    f.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
    if (!f) throw IoError("write failed: " + path);
}

std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
    std::ifstream f(path, std::ios::binary | std::ios::ate);
    if (!f) throw IoError("cannot open: " + path);
    std::streamsize n = f.tellg();
    f.seekg(0);
    std::vector<std::uint8_t> bytes(static_cast<std::size_t>(n));
    f.read(reinterpret_cast<char*>(bytes.data()), n);
    if (!f) throw IoError("read failed: " + path);
    return bytes;
}

void write_file_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open for writing: " + path);
    f << text;
    if (!f) throw IoError("write failed: " + path);
}

void write_tensor_file(const std::string& path, const Tensor& t) {
    write_file_bytes(path, tensor_to_bytes(t));
}

Tensor read_tensor_file(const std::string& path) {
    auto bytes = read_file_bytes(path);
    return tensor_from_bytes(bytes.data(), bytes.size());
}

} // namespace acz
