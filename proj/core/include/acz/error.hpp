#pragma once

#include <stdexcept>
#include <string>

namespace acz {

// Base class for every failure this library reports.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Operand shapes are incompatible (mismatched tensors, bad layer wiring).
struct ShapeError : Error {
    using Error::Error;
};

// An operation was asked to work on values outside its domain
// (empty tensor, non-finite element).
struct DomainError : Error {
    using Error::Error;
};

// A caller-supplied parameter is invalid (eb <= 0, R outside (0,1], ...).
struct ParamError : Error {
    using Error::Error;
};

// A byte stream does not match the expected file layout.
struct FormatError : Error {
    using Error::Error;
};

// A syntactically valid stream cannot be decoded (truncated bitstream,
// codebook mismatch).
struct DecodeError : Error {
    using Error::Error;
};

// Bad experiment / run configuration.
struct ConfigError : Error {
    using Error::Error;
};

// File could not be opened or read/written.
struct IoError : Error {
    using Error::Error;
};

// Training diverged or produced non-finite results.
struct NumericalError : Error {
    using Error::Error;
};

} // namespace acz
