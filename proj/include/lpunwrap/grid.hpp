#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"

namespace lpunwrap {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

enum class PhaseKind { Wrapped, Unwrapped };

/// Principal value of `x` in (-pi, pi].
///
/// Values already inside the interval are returned untouched, so the
/// operator is exactly idempotent. -pi maps to +pi.
inline double wrap_scalar(double x) {
    if (!std::isfinite(x)) throw InvalidInput("wrap_scalar: non-finite input");
    if (x > -kPi && x <= kPi) return x;
    double r = x - kTwoPi * std::nearbyint(x / kTwoPi);
    if (r <= -kPi) r += kTwoPi;
    if (r > kPi) r -= kTwoPi;
    return r;
}

inline bool in_wrapped_range(double x) { return x > -kPi && x <= kPi; }

/// Dense M x N phase map, row-major, grid spacing 1.
///
/// Row index i runs along y, column index j along x. Flat index of (i, j)
/// is i * cols + j, which is also the unknown numbering of the linear system.
class PhaseMap {
public:
    PhaseMap(std::size_t rows, std::size_t cols, std::vector<double> values, PhaseKind kind)
        : rows_(rows), cols_(cols), values_(std::move(values)), kind_(kind) {
        if (rows_ < 2 || cols_ < 2)
            throw InvalidInput("phase map must be at least 2x2, got " + std::to_string(rows_) +
                               "x" + std::to_string(cols_));
        if (values_.size() != rows_ * cols_)
            throw InvalidInput("phase map value count " + std::to_string(values_.size()) +
                               " does not match " + std::to_string(rows_) + "x" +
                               std::to_string(cols_));
        for (std::size_t c = 0; c < values_.size(); ++c) {
            if (!std::isfinite(values_[c]))
                throw InvalidInput("phase map cell " + std::to_string(c) + " is not finite");
            if (kind_ == PhaseKind::Wrapped && !in_wrapped_range(values_[c]))
                throw InvalidInput("wrapped phase map cell " + std::to_string(c) +
                                   " lies outside (-pi, pi]");
        }
    }

    static PhaseMap constant(std::size_t rows, std::size_t cols, double value, PhaseKind kind) {
        return PhaseMap(rows, cols, std::vector<double>(rows * cols, value), kind);
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return values_.size(); }
    PhaseKind kind() const noexcept { return kind_; }

    double operator()(std::size_t i, std::size_t j) const { return values_[i * cols_ + j]; }
    std::span<const double> values() const noexcept { return values_; }

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> values_;
    PhaseKind kind_;
};

/// Elementwise wrap of an unwrapped map.
inline PhaseMap wrap_map(const PhaseMap& phi) {
    std::vector<double> out(phi.size());
    auto in = phi.values();
    for (std::size_t c = 0; c < out.size(); ++c) out[c] = wrap_scalar(in[c]);
    return PhaseMap(phi.rows(), phi.cols(), std::move(out), PhaseKind::Wrapped);
}

/// Wrapped differences of a wrapped map, one value per grid edge.
///
/// dx holds the horizontal edges (i, j) -> (i, j+1): rows x (cols-1).
/// dy holds the vertical edges (i, j) -> (i+1, j): (rows-1) x cols.
class GradientField {
public:
    GradientField(std::size_t rows, std::size_t cols, std::vector<double> dx,
                  std::vector<double> dy)
        : rows_(rows), cols_(cols), dx_(std::move(dx)), dy_(std::move(dy)) {
        if (rows_ < 2 || cols_ < 2) throw InvalidInput("gradient field needs a 2x2 grid or larger");
        if (dx_.size() != rows_ * (cols_ - 1) || dy_.size() != (rows_ - 1) * cols_)
            throw InvalidInput("gradient field extents do not match the grid");
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double dx(std::size_t i, std::size_t j) const { return dx_[i * (cols_ - 1) + j]; }
    double dy(std::size_t i, std::size_t j) const { return dy_[i * cols_ + j]; }

    std::span<const double> dx_values() const noexcept { return dx_; }
    std::span<const double> dy_values() const noexcept { return dy_; }

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> dx_;
    std::vector<double> dy_;
};

inline GradientField wrapped_gradients(const PhaseMap& psi) {
    if (psi.kind() != PhaseKind::Wrapped)
        throw InvalidInput("wrapped_gradients expects a wrapped phase map");
    const std::size_t m = psi.rows();
    const std::size_t n = psi.cols();
    std::vector<double> dx(m * (n - 1));
    std::vector<double> dy((m - 1) * n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j + 1 < n; ++j)
            dx[i * (n - 1) + j] = wrap_scalar(psi(i, j + 1) - psi(i, j));
    for (std::size_t i = 0; i + 1 < m; ++i)
        for (std::size_t j = 0; j < n; ++j)
            dy[i * n + j] = wrap_scalar(psi(i + 1, j) - psi(i, j));
    return GradientField(m, n, std::move(dx), std::move(dy));
}

}  // namespace lpunwrap
