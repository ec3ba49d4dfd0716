#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lpunwrap {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or out-of-domain data (non-finite values, bad shapes).
class InvalidInput : public Error {
public:
    using Error::Error;
};

/// A configuration value outside its admissible range (p >= 2, tau <= 0, ...).
class InvalidParameter : public Error {
public:
    using Error::Error;
};

/// Sparse structure violates a kernel's precondition (missing diagonal, size mismatch).
class StructureError : public Error {
public:
    using Error::Error;
};

/// Zero pivot met during a triangular solve or a diagonal scaling.
class SingularFactor : public Error {
public:
    SingularFactor(const std::string& what, std::size_t row)
        : Error(what + " (row " + std::to_string(row) + ")"), row_(row) {}

    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

/// Non-positive pivot during an incomplete factorization.
class FactorBreakdown : public Error {
public:
    FactorBreakdown(const std::string& what, std::size_t index)
        : Error(what + " (pivot " + std::to_string(index) + ")"), index_(index) {}

    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

/// Loss of positive definiteness inside conjugate gradient.
class PcgBreakdown : public Error {
public:
    PcgBreakdown(const std::string& what, std::size_t iteration)
        : Error(what + " (inner iteration " + std::to_string(iteration) + ")"),
          iteration_(iteration) {}

    std::size_t iteration() const noexcept { return iteration_; }

private:
    std::size_t iteration_;
};

/// Metric evaluated where it is undefined (both inputs zero).
class UndefinedMetric : public Error {
public:
    using Error::Error;
};

/// Malformed file content. `offset` is the byte position of the problem.
class ParseError : public Error {
public:
    enum class Kind { BadMagic, BadHeader, Truncated, NonFinite, RangeViolation };

    ParseError(Kind kind, std::size_t offset, const std::string& what)
        : Error(what + " at byte " + std::to_string(offset)), kind_(kind), offset_(offset) {}

    Kind kind() const noexcept { return kind_; }
    std::size_t offset() const noexcept { return offset_; }

private:
    Kind kind_;
    std::size_t offset_;
};

/// File could not be opened, read or written.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace lpunwrap
