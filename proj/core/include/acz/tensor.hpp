#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "acz/error.hpp"

namespace acz {

/// Dense N-dimensional array, row-major, immutable after construction.
/// Elements are validated to be finite both when a tensor is built from
/// raw data and (because every operation builds its result through the
/// same constructors) after every operation.
template <class T>
class TensorT {
public:
    TensorT() = default; // empty tensor; most operations reject it

    explicit TensorT(std::vector<std::size_t> shape)
        : shape_(std::move(shape)), data_(checked_count(shape_), T(0)) {}

    TensorT(std::vector<std::size_t> shape, std::vector<T> data)
        : shape_(std::move(shape)), data_(std::move(data)) {
        if (data_.size() != checked_count(shape_))
            throw ShapeError("data length " + std::to_string(data_.size()) +
                             " does not match shape volume " +
                             std::to_string(checked_count(shape_)));
        validate_finite();
    }

    bool empty() const { return data_.empty(); }
    std::size_t size() const { return data_.size(); }
    std::size_t rank() const { return shape_.size(); }
    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t extent(std::size_t dim) const { return shape_.at(dim); }

    std::span<const T> values() const { return data_; }
    const T& operator[](std::size_t i) const { return data_[i]; }
    const T* data() const { return data_.data(); }

    // Flat offset of an index in the trailing-4 layout [n][c][h][w].
    std::size_t idx4(std::size_t n, std::size_t c, std::size_t h, std::size_t w) const {
        return ((n * shape_[1] + c) * shape_[2] + h) * shape_[3] + w;
    }

    bool same_shape(const TensorT& other) const { return shape_ == other.shape_; }

    template <class U>
    TensorT<U> cast() const {
        std::vector<U> out(data_.begin(), data_.end());
        return TensorT<U>(shape_, std::move(out));
    }

private:
    static std::size_t checked_count(const std::vector<std::size_t>& shape) {
        std::size_t n = 1;
        for (std::size_t e : shape) {
            if (e == 0) throw ShapeError("tensor extents must be positive");
            n *= e;
        }
        return shape.empty() ? 0 : n;
    }

    void validate_finite() const {
        for (const T& v : data_)
            if (!std::isfinite(static_cast<double>(v)))
                throw DomainError("tensor element is not finite");
    }

    std::vector<std::size_t> shape_;
    std::vector<T> data_;
};

using Tensor = TensorT<float>;   // activation payloads
using DTensor = TensorT<double>; // statistical accumulations, gradient checks

/// Mean of |t_i|; accumulates in double regardless of element type.
template <class T>
double mean_abs(const TensorT<T>& t) {
    if (t.empty()) throw DomainError("mean_abs: empty tensor");
    double sum = 0.0;
    for (const T& v : t.values()) sum += std::abs(static_cast<double>(v));
    return sum / static_cast<double>(t.size());
}

/// Fraction of elements that are not exactly zero.
template <class T>
double nonzero_ratio(const TensorT<T>& t) {
    if (t.empty()) throw DomainError("nonzero_ratio: empty tensor");
    std::size_t nz = 0;
    for (const T& v : t.values())
        if (v != T(0)) ++nz;
    return static_cast<double>(nz) / static_cast<double>(t.size());
}

/// max_i |a_i - b_i|, computed in double.
template <class T>
double max_abs_diff(const TensorT<T>& a, const TensorT<T>& b) {
    if (!a.same_shape(b)) throw ShapeError("max_abs_diff: shape mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = std::abs(static_cast<double>(a[i]) - static_cast<double>(b[i]));
        if (d > m) m = d;
    }
    return m;
}

template <class T>
double max_abs(const TensorT<T>& t) {
    double m = 0.0;
    for (const T& v : t.values()) m = std::max(m, std::abs(static_cast<double>(v)));
    return m;
}

} // namespace acz
