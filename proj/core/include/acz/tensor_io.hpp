#pragma once

#include <string>
#include <vector>

#include "acz/tensor.hpp"

namespace acz {

// Raw tensor file format ("TNSR"):
//   magic "TNSR" | u8 rank | u64 extent per dimension | f32 payload
// integers little-endian, payload IEEE-754 single precision.

std::vector<std::uint8_t> tensor_to_bytes(const Tensor& t);
Tensor tensor_from_bytes(const std::uint8_t* data, std::size_t size);

void write_tensor_file(const std::string& path, const Tensor& t);
Tensor read_tensor_file(const std::string& path);

// Whole-file helpers shared by the blob and report writers.
void write_file_bytes(const std::string& path, const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> read_file_bytes(const std::string& path);
void write_file_text(const std::string& path, const std::string& text);

} // namespace acz
