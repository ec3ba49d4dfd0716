#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "error.hpp"

namespace lpunwrap {

using DenseVector = std::vector<double>;

/// Square sparse matrix in compressed-row form.
///
/// Column indices are strictly increasing within each row. The same type
/// stores full symmetric operators as well as triangular factors; the
/// triangular kernels below only read the triangle they need.
template <std::floating_point T>
class CsrMatrix {
public:
    using value_type = T;

    CsrMatrix() = default;

    CsrMatrix(std::size_t n, std::vector<std::size_t> row_offsets,
              std::vector<std::size_t> col_indices, std::vector<T> values)
        : n_(n),
          row_offsets_(std::move(row_offsets)),
          col_indices_(std::move(col_indices)),
          values_(std::move(values)) {
        validate();
    }

    /// Build from (row, col, value) triplets; duplicates are summed.
    static CsrMatrix from_triplets(std::size_t n,
                                   std::vector<std::tuple<std::size_t, std::size_t, T>> entries) {
        std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
            return std::tie(std::get<0>(a), std::get<1>(a)) < std::tie(std::get<0>(b), std::get<1>(b));
        });
        std::vector<std::size_t> offsets(n + 1, 0);
        std::vector<std::size_t> cols;
        std::vector<T> vals;
        for (std::size_t k = 0; k < entries.size(); ++k) {
            const auto [r, c, v] = entries[k];
            if (r >= n || c >= n) throw StructureError("triplet index out of range");
            if (!cols.empty() && k > 0 && std::get<0>(entries[k - 1]) == r &&
                std::get<1>(entries[k - 1]) == c) {
                vals.back() += v;
                continue;
            }
            cols.push_back(c);
            vals.push_back(v);
            ++offsets[r + 1];
        }
        for (std::size_t i = 0; i < n; ++i) offsets[i + 1] += offsets[i];
        return CsrMatrix(n, std::move(offsets), std::move(cols), std::move(vals));
    }

    std::size_t dim() const noexcept { return n_; }
    std::size_t nnz() const noexcept { return col_indices_.size(); }

    std::span<const std::size_t> row_offsets() const noexcept { return row_offsets_; }
    std::span<const std::size_t> col_indices() const noexcept { return col_indices_; }
    std::span<const T> values() const noexcept { return values_; }

    /// Values may be rewritten in place; the pattern is fixed at construction.
    std::span<T> mutable_values() noexcept { return values_; }

    std::size_t row_begin(std::size_t i) const { return row_offsets_[i]; }
    std::size_t row_end(std::size_t i) const { return row_offsets_[i + 1]; }

    /// Storage position of entry (i, j), if structurally present.
    std::optional<std::size_t> find(std::size_t i, std::size_t j) const {
        const auto first = col_indices_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[i]);
        const auto last = col_indices_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[i + 1]);
        const auto it = std::lower_bound(first, last, j);
        if (it == last || *it != j) return std::nullopt;
        return static_cast<std::size_t>(it - col_indices_.begin());
    }

    T at(std::size_t i, std::size_t j) const {
        const auto p = find(i, j);
        return p ? values_[*p] : T{0};
    }

    /// Position of every diagonal entry; throws if one is structurally absent.
    std::vector<std::size_t> diagonal_positions() const {
        std::vector<std::size_t> pos(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            const auto p = find(i, i);
            if (!p) throw StructureError("missing diagonal entry in row " + std::to_string(i));
            pos[i] = *p;
        }
        return pos;
    }

    bool is_symmetric(T tol) const {
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
                const auto mirror = find(col_indices_[k], i);
                if (!mirror) return false;
                if (std::abs(values_[*mirror] - values_[k]) > tol) return false;
            }
        }
        return true;
    }

private:
    void validate() const {
        if (row_offsets_.size() != n_ + 1) throw StructureError("row offsets must have n+1 entries");
        if (row_offsets_.front() != 0) throw StructureError("row offsets must start at 0");
        if (row_offsets_.back() != col_indices_.size())
            throw StructureError("last row offset must equal nnz");
        if (values_.size() != col_indices_.size())
            throw StructureError("values and column indices differ in length");
        for (std::size_t i = 0; i < n_; ++i) {
            if (row_offsets_[i] > row_offsets_[i + 1])
                throw StructureError("row offsets must be nondecreasing");
            for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
                if (col_indices_[k] >= n_)
                    throw StructureError("column index out of range in row " + std::to_string(i));
                if (k > row_offsets_[i] && col_indices_[k - 1] >= col_indices_[k])
                    throw StructureError("column indices not strictly increasing in row " +
                                         std::to_string(i));
            }
        }
    }

    std::size_t n_ = 0;
    std::vector<std::size_t> row_offsets_{0};
    std::vector<std::size_t> col_indices_;
    std::vector<T> values_;
};

using SparseMatrix = CsrMatrix<double>;

// ---------------------------------------------------------------------------
// dense vector helpers

template <std::floating_point T>
T dot(std::span<const T> a, std::span<const T> b) {
    T s{0};
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

template <std::floating_point T>
T norm2(std::span<const T> a) {
    return std::sqrt(dot(a, a));
}

// ---------------------------------------------------------------------------
// kernels

/// y = A x. Each row accumulates in ascending column order.
template <std::floating_point T>
void spmv(const CsrMatrix<T>& a, std::span<const T> x, std::span<T> y) {
    if (x.size() != a.dim() || y.size() != a.dim())
        throw StructureError("spmv: dimension mismatch");
    const auto offs = a.row_offsets();
    const auto cols = a.col_indices();
    const auto vals = a.values();
    for (std::size_t i = 0; i < a.dim(); ++i) {
        T acc{0};
        for (std::size_t k = offs[i]; k < offs[i + 1]; ++k) acc += vals[k] * x[cols[k]];
        y[i] = acc;
    }
}

template <std::floating_point T>
std::vector<T> spmv(const CsrMatrix<T>& a, std::span<const T> x) {
    std::vector<T> y(a.dim());
    spmv(a, x, std::span<T>(y));
    return y;
}

template <std::floating_point T>
std::vector<T> diagonal(const CsrMatrix<T>& a) {
    const auto pos = a.diagonal_positions();
    std::vector<T> d(a.dim());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = a.values()[pos[i]];
    return d;
}

/// Forward substitution with the lower triangle of `l` (entries right of the
/// diagonal are ignored). With `unit_diag` the diagonal is taken as 1.
template <std::floating_point T>
void lower_solve(const CsrMatrix<T>& l, std::span<const T> b, std::span<T> x, bool unit_diag) {
    if (b.size() != l.dim() || x.size() != l.dim())
        throw StructureError("lower_solve: dimension mismatch");
    const auto offs = l.row_offsets();
    const auto cols = l.col_indices();
    const auto vals = l.values();
    for (std::size_t i = 0; i < l.dim(); ++i) {
        T acc = b[i];
        T pivot{0};
        for (std::size_t k = offs[i]; k < offs[i + 1]; ++k) {
            const std::size_t c = cols[k];
            if (c < i)
                acc -= vals[k] * x[c];
            else if (c == i)
                pivot = vals[k];
            else
                break;
        }
        if (unit_diag) {
            x[i] = acc;
        } else {
            if (pivot == T{0}) throw SingularFactor("lower_solve: zero pivot", i);
            x[i] = acc / pivot;
        }
    }
}

template <std::floating_point T>
std::vector<T> lower_solve(const CsrMatrix<T>& l, std::span<const T> b, bool unit_diag) {
    std::vector<T> x(l.dim());
    lower_solve(l, b, std::span<T>(x), unit_diag);
    return x;
}

/// Backward substitution with the upper triangle of `u`.
template <std::floating_point T>
void upper_solve(const CsrMatrix<T>& u, std::span<const T> b, std::span<T> x, bool unit_diag) {
    if (b.size() != u.dim() || x.size() != u.dim())
        throw StructureError("upper_solve: dimension mismatch");
    const auto offs = u.row_offsets();
    const auto cols = u.col_indices();
    const auto vals = u.values();
    for (std::size_t i = u.dim(); i-- > 0;) {
        T acc = b[i];
        T pivot{0};
        for (std::size_t k = offs[i + 1]; k-- > offs[i];) {
            const std::size_t c = cols[k];
            if (c > i)
                acc -= vals[k] * x[c];
            else if (c == i)
                pivot = vals[k];
            else
                break;
        }
        if (unit_diag) {
            x[i] = acc;
        } else {
            if (pivot == T{0}) throw SingularFactor("upper_solve: zero pivot", i);
            x[i] = acc / pivot;
        }
    }
}

template <std::floating_point T>
std::vector<T> upper_solve(const CsrMatrix<T>& u, std::span<const T> b, bool unit_diag) {
    std::vector<T> x(u.dim());
    upper_solve(u, b, std::span<T>(x), unit_diag);
    return x;
}

/// Solves L^T x = b using the lower triangle of `l` row by row (column sweep
/// over L^T), so no transposed copy is needed.
template <std::floating_point T>
void lower_transpose_solve(const CsrMatrix<T>& l, std::span<const T> b, std::span<T> x) {
    if (b.size() != l.dim() || x.size() != l.dim())
        throw StructureError("lower_transpose_solve: dimension mismatch");
    const auto offs = l.row_offsets();
    const auto cols = l.col_indices();
    const auto vals = l.values();
    std::copy(b.begin(), b.end(), x.begin());
    for (std::size_t i = l.dim(); i-- > 0;) {
        T pivot{0};
        std::size_t diag_end = offs[i];
        for (std::size_t k = offs[i]; k < offs[i + 1] && cols[k] <= i; ++k) {
            if (cols[k] == i) pivot = vals[k];
            diag_end = k;
        }
        if (pivot == T{0}) throw SingularFactor("lower_transpose_solve: zero pivot", i);
        x[i] /= pivot;
        for (std::size_t k = offs[i]; k < diag_end; ++k) x[cols[k]] -= vals[k] * x[i];
    }
}

}  // namespace lpunwrap
