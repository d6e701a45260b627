#pragma once

#include <cstdint>
#include <vector>

#include "acz/bytes.hpp"

namespace acz {

// Canonical Huffman coder over 32-bit symbols. Codes are assigned in
// (length, symbol) order so the codebook serializes deterministically.
// A degenerate one-symbol alphabet gets a single 1-bit code.

struct CodebookEntry {
    std::uint32_t symbol;
    std::uint8_t length;
};

struct HuffmanCode {
    std::vector<CodebookEntry> codebook; // canonical order
    std::vector<std::uint8_t> bits;      // MSB-first packed
    std::uint64_t bit_length = 0;
};

/// Builds the code from symbol frequencies and encodes the stream.
HuffmanCode huffman_encode(const std::vector<std::uint32_t>& symbols);

/// Inverse of huffman_encode; `count` is the number of symbols to read.
/// Throws DecodeError on truncated or malformed streams.
std::vector<std::uint32_t> huffman_decode(const std::vector<CodebookEntry>& codebook,
                                          const std::uint8_t* bits, std::uint64_t bit_length,
                                          std::size_t count);

} // namespace acz
