#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "grid.hpp"
#include "sparse.hpp"

namespace lpunwrap {

/// Nonzeros of the five-point Neumann operator on an m x n grid.
constexpr std::size_t stencil_nnz(std::size_t m, std::size_t n) {
    return 5 * m * n - 2 * (m + n);
}

/// Percentage of nonzeros in the (mn) x (mn) operator.
inline double stencil_density_pct(std::size_t m, std::size_t n) {
    const double cells = static_cast<double>(m) * static_cast<double>(n);
    return 100.0 * static_cast<double>(stencil_nnz(m, n)) / (cells * cells);
}

/// Per-edge IRLS weights. Same edge layout as GradientField:
/// u is rows x (cols-1) (horizontal edges), v is (rows-1) x cols (vertical).
struct WeightField {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> u;
    std::vector<double> v;

    static WeightField uniform(std::size_t rows, std::size_t cols, double w) {
        return {rows, cols, std::vector<double>(rows * (cols - 1), w),
                std::vector<double>((rows - 1) * cols, w)};
    }

    double U(std::size_t i, std::size_t j) const { return u[i * (cols - 1) + j]; }
    double V(std::size_t i, std::size_t j) const { return v[i * cols + j]; }
};

struct LinearSystem {
    SparseMatrix a;
    DenseVector b;
};

namespace detail {

inline void check_irls_parameters(double p, double tau) {
    if (!(p < 2.0) || !std::isfinite(p)) throw InvalidParameter("p must be < 2");
    if (!(tau > 0.0) || !std::isfinite(tau)) throw InvalidParameter("tau must be > 0");
}

inline double smoothed_weight(double residual, double p, double tau) {
    return tau / (std::pow(std::abs(residual), 2.0 - p) + tau);
}

}  // namespace detail

/// U = tau / (|phi(i,j+1) - phi(i,j) - dx(i,j)|^(2-p) + tau), V likewise along i.
inline WeightField compute_weights(std::span<const double> phi, const GradientField& grads,
                                   double p, double tau) {
    detail::check_irls_parameters(p, tau);
    const std::size_t m = grads.rows();
    const std::size_t n = grads.cols();
    if (phi.size() != m * n) throw InvalidInput("compute_weights: phase length does not match grid");

    WeightField w{m, n, std::vector<double>(m * (n - 1)), std::vector<double>((m - 1) * n)};
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j + 1 < n; ++j) {
            const double r = phi[i * n + j + 1] - phi[i * n + j] - grads.dx(i, j);
            w.u[i * (n - 1) + j] = detail::smoothed_weight(r, p, tau);
        }
    for (std::size_t i = 0; i + 1 < m; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double r = phi[(i + 1) * n + j] - phi[i * n + j] - grads.dy(i, j);
            w.v[i * n + j] = detail::smoothed_weight(r, p, tau);
        }
    return w;
}

/// Builds the five-point pattern for one grid size once and rewrites only
/// the values on every call to assemble().
class StencilAssembler {
public:
    StencilAssembler(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {
        if (rows < 2 || cols < 2) throw InvalidInput("assembler needs a 2x2 grid or larger");
        const std::size_t cells = rows * cols;
        std::vector<std::size_t> offsets(cells + 1, 0);
        std::vector<std::size_t> indices;
        indices.reserve(stencil_nnz(rows, cols));
        for (std::size_t i = 0; i < rows; ++i) {
            for (std::size_t j = 0; j < cols; ++j) {
                const std::size_t c = i * cols + j;
                if (i > 0) indices.push_back(c - cols);
                if (j > 0) indices.push_back(c - 1);
                indices.push_back(c);
                if (j + 1 < cols) indices.push_back(c + 1);
                if (i + 1 < rows) indices.push_back(c + cols);
                offsets[c + 1] = indices.size();
            }
        }
        std::vector<double> values(indices.size(), 0.0);
        pattern_ = SparseMatrix(cells, std::move(offsets), std::move(indices), std::move(values));
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    /// Fresh system with this assembler's pattern.
    LinearSystem make_system() const { return {pattern_, DenseVector(pattern_.dim(), 0.0)}; }

    /// Writes the weighted operator and right-hand side into `sys`, which
    /// must come from make_system() of this assembler.
    void assemble(const WeightField& w, const GradientField& g, LinearSystem& sys) const {
        if (w.rows != rows_ || w.cols != cols_ || g.rows() != rows_ || g.cols() != cols_)
            throw InvalidInput("assemble: weight/gradient shape does not match the grid");
        if (w.u.size() != rows_ * (cols_ - 1) || w.v.size() != (rows_ - 1) * cols_)
            throw InvalidInput("assemble: weight field extents are inconsistent");
        if (sys.a.nnz() != pattern_.nnz() || sys.b.size() != pattern_.dim())
            throw StructureError("assemble: system was not created by this assembler");

        auto vals = sys.a.mutable_values();
        std::size_t k = 0;
        for (std::size_t i = 0; i < rows_; ++i) {
            for (std::size_t j = 0; j < cols_; ++j) {
                const double up = i > 0 ? w.V(i - 1, j) : 0.0;
                const double left = j > 0 ? w.U(i, j - 1) : 0.0;
                const double right = j + 1 < cols_ ? w.U(i, j) : 0.0;
                const double down = i + 1 < rows_ ? w.V(i, j) : 0.0;

                if (i > 0) vals[k++] = -up;
                if (j > 0) vals[k++] = -left;
                vals[k++] = left + right + up + down;
                if (j + 1 < cols_) vals[k++] = -right;
                if (i + 1 < rows_) vals[k++] = -down;

                double rhs = 0.0;
                if (j > 0) rhs += g.dx(i, j - 1) * left;
                if (j + 1 < cols_) rhs -= g.dx(i, j) * right;
                if (i > 0) rhs += g.dy(i - 1, j) * up;
                if (i + 1 < rows_) rhs -= g.dy(i, j) * down;
                sys.b[i * cols_ + j] = rhs;
            }
        }
    }

private:
    std::size_t rows_;
    std::size_t cols_;
    SparseMatrix pattern_;
};

inline LinearSystem assemble_system(const WeightField& w, const GradientField& g) {
    StencilAssembler assembler(g.rows(), g.cols());
    auto sys = assembler.make_system();
    assembler.assemble(w, g, sys);
    return sys;
}

/// Discrete Lp objective: sum over edges of |forward difference - wrapped gradient|^p.
inline double objective(std::span<const double> phi, const GradientField& g, double p) {
    if (!(p > 0.0)) throw InvalidParameter("objective requires p > 0");
    const std::size_t m = g.rows();
    const std::size_t n = g.cols();
    if (phi.size() != m * n) throw InvalidInput("objective: phase length does not match grid");
    double j_sum = 0.0;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j + 1 < n; ++j)
            j_sum += std::pow(std::abs(phi[i * n + j + 1] - phi[i * n + j] - g.dx(i, j)), p);
    for (std::size_t i = 0; i + 1 < m; ++i)
        for (std::size_t j = 0; j < n; ++j)
            j_sum += std::pow(std::abs(phi[(i + 1) * n + j] - phi[i * n + j] - g.dy(i, j)), p);
    return j_sum;
}

}  // namespace lpunwrap
