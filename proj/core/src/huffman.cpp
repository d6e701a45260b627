#include "acz/huffman.hpp"

#include <algorithm>
#include <map>
#include <queue>

#include "acz/error.hpp"

namespace acz {

namespace {

struct Node {
    std::uint64_t freq;
    std::uint32_t tiebreak; // creation order, keeps the tree deterministic
    int left = -1, right = -1;
    std::uint32_t symbol = 0;
    bool leaf = false;
};

// Depth of each leaf in a deterministic Huffman tree.
std::vector<std::pair<std::uint32_t, std::uint8_t>>
code_lengths(const std::map<std::uint32_t, std::uint64_t>& freq) {
    std::vector<Node> nodes;
    using Item = std::pair<std::uint64_t, std::uint32_t>; // (freq, node index via tiebreak)
    auto cmp = [](const Item& a, const Item& b) { return a > b; };
    std::priority_queue<Item, std::vector<Item>, decltype(cmp)> heap(cmp);

    for (const auto& [sym, f] : freq) {
        Node n;
        n.freq = f;
        n.tiebreak = static_cast<std::uint32_t>(nodes.size());
        n.symbol = sym;
        n.leaf = true;
        nodes.push_back(n);
        heap.emplace(f, n.tiebreak);
    }

    if (nodes.size() == 1)
        return {{nodes[0].symbol, 1}}; // degenerate alphabet: one 1-bit code

    while (heap.size() > 1) {
        auto [fa, ia] = heap.top();
        heap.pop();
        auto [fb, ib] = heap.top();
        heap.pop();
        Node parent;
        parent.freq = fa + fb;
        parent.tiebreak = static_cast<std::uint32_t>(nodes.size());
        parent.left = static_cast<int>(ia);
        parent.right = static_cast<int>(ib);
        nodes.push_back(parent);
        heap.emplace(parent.freq, parent.tiebreak);
    }

    std::vector<std::pair<std::uint32_t, std::uint8_t>> lengths;
    // Iterative depth-first walk from the root (last node created).
    std::vector<std::pair<int, int>> stack{{static_cast<int>(nodes.size()) - 1, 0}};
    while (!stack.empty()) {
        auto [idx, depth] = stack.back();
        stack.pop_back();
        const Node& n = nodes[static_cast<std::size_t>(idx)];
        if (n.leaf) {
            if (depth > 64) throw DecodeError("huffman code length exceeds 64 bits");
            lengths.emplace_back(n.symbol, static_cast<std::uint8_t>(depth));
        } else {
            stack.emplace_back(n.left, depth + 1);
            stack.emplace_back(n.right, depth + 1);
        }
    }
    return lengths;
}

// Canonical code values for entries already sorted by (length, symbol).
std::vector<std::uint64_t> canonical_codes(const std::vector<CodebookEntry>& book) {
    std::vector<std::uint64_t> codes(book.size());
    std::uint64_t code = 0;
    std::uint8_t prev_len = 0;
    for (std::size_t i = 0; i < book.size(); ++i) {
        code <<= (book[i].length - prev_len);
        codes[i] = code;
        ++code;
        prev_len = book[i].length;
    }
    return codes;
}

class BitWriter {
public:
    void put(std::uint64_t code, std::uint8_t len) {
        for (int b = len - 1; b >= 0; --b) {
            if (bit_ == 0) bytes_.push_back(0);
            if ((code >> b) & 1) bytes_.back() |= static_cast<std::uint8_t>(0x80u >> bit_);
            bit_ = (bit_ + 1) & 7;
            ++total_;
        }
    }
    std::vector<std::uint8_t> bytes_;
    std::uint64_t total_ = 0;

private:
    unsigned bit_ = 0;
};

} // namespace

HuffmanCode huffman_encode(const std::vector<std::uint32_t>& symbols) {
    if (symbols.empty()) return {};

    std::map<std::uint32_t, std::uint64_t> freq;
    for (std::uint32_t s : symbols) ++freq[s];

    auto lengths = code_lengths(freq);

    HuffmanCode out;
    out.codebook.reserve(lengths.size());
    for (auto [sym, len] : lengths) out.codebook.push_back({sym, len});
    std::sort(out.codebook.begin(), out.codebook.end(), [](const auto& a, const auto& b) {
        return a.length != b.length ? a.length < b.length : a.symbol < b.symbol;
    });

    auto codes = canonical_codes(out.codebook);
    std::map<std::uint32_t, std::pair<std::uint64_t, std::uint8_t>> table;
    for (std::size_t i = 0; i < out.codebook.size(); ++i)
        table[out.codebook[i].symbol] = {codes[i], out.codebook[i].length};

    BitWriter bw;
    for (std::uint32_t s : symbols) {
        auto [code, len] = table.at(s);
        bw.put(code, len);
    }
    out.bits = std::move(bw.bytes_);
    out.bit_length = bw.total_;
    return out;
}

std::vector<std::uint32_t> huffman_decode(const std::vector<CodebookEntry>& codebook,
                                          const std::uint8_t* bits, std::uint64_t bit_length,
                                          std::size_t count) {
    if (count == 0) return {};
    if (codebook.empty()) throw DecodeError("empty codebook");
    for (std::size_t i = 1; i < codebook.size(); ++i) {
        const auto& a = codebook[i - 1];
        const auto& b = codebook[i];
        if (a.length > b.length || (a.length == b.length && a.symbol >= b.symbol))
            throw DecodeError("codebook entries are not in canonical order");
    }
    for (const auto& e : codebook)
        if (e.length == 0 || e.length > 64) throw DecodeError("invalid code length in codebook");

    auto codes = canonical_codes(codebook);
    // Per-length ranges: [first code value, first entry index, entry count].
    struct LenRange {
        std::uint64_t first_code;
        std::size_t first_index;
        std::size_t count;
    };
    std::vector<LenRange> by_len(65, LenRange{0, 0, 0});
    for (std::size_t i = 0; i < codebook.size(); ++i) {
        auto& r = by_len[codebook[i].length];
        if (r.count == 0) {
            r.first_code = codes[i];
            r.first_index = i;
        }
        ++r.count;
    }

    std::vector<std::uint32_t> out;
    out.reserve(count);
    std::uint64_t pos = 0;
    while (out.size() < count) {
        std::uint64_t acc = 0;
        unsigned len = 0;
        for (;;) {
            if (pos >= bit_length) throw DecodeError("truncated bitstream");
            std::uint64_t bit = (bits[pos >> 3] >> (7 - (pos & 7))) & 1;
            ++pos;
            acc = (acc << 1) | bit;
            ++len;
            if (len > 64) throw DecodeError("no codeword matches bitstream");
            const auto& r = by_len[len];
            if (r.count != 0 && acc >= r.first_code && acc < r.first_code + r.count) {
                out.push_back(codebook[r.first_index + (acc - r.first_code)].symbol);
                break;
            }
        }
    }
    return out;
}

} // namespace acz
