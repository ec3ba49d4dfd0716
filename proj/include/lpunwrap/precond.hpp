#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "error.hpp"
#include "sparse.hpp"

namespace lpunwrap {

/// Listing order is also the benchmark's row order.
enum class PrecondKind { Identity, Jacobi, ILU0, IC0, SSOR };

inline constexpr PrecondKind kAllPreconditioners[] = {
    PrecondKind::Identity, PrecondKind::Jacobi, PrecondKind::ILU0, PrecondKind::IC0,
    PrecondKind::SSOR};

inline std::string_view to_string(PrecondKind k) {
    switch (k) {
        case PrecondKind::Identity: return "identity";
        case PrecondKind::Jacobi: return "jacobi";
        case PrecondKind::ILU0: return "ilu0";
        case PrecondKind::IC0: return "ic0";
        case PrecondKind::SSOR: return "ssor";
    }
    return "?";
}

inline PrecondKind parse_precond_kind(std::string_view s) {
    for (auto k : kAllPreconditioners)
        if (to_string(k) == s) return k;
    if (s == "sor") return PrecondKind::SSOR;
    if (s == "ic" || s == "ichol") return PrecondKind::IC0;
    if (s == "ilu") return PrecondKind::ILU0;
    throw InvalidParameter("unknown preconditioner '" + std::string(s) +
                           "' (expected identity, jacobi, ilu0, ic0 or ssor)");
}

struct PrecondOptions {
    double omega = 1.0;         ///< SSOR relaxation factor, 0 < omega < 2
    bool ic_shift_retry = true; ///< retry IC(0) on A + s*diag(A) after a breakdown
    double ic_initial_shift = 1e-3;
    int ic_max_doublings = 60;
};

namespace detail {

/// IC(0) on the lower pattern of `a` with diagonal scaled by (1 + shift).
/// Returns L (lower triangle incl. diagonal, diagonal last in each row).
template <std::floating_point T>
CsrMatrix<T> incomplete_cholesky(const CsrMatrix<T>& a, T shift) {
    const std::size_t n = a.dim();
    const auto offs = a.row_offsets();
    const auto cols = a.col_indices();
    const auto vals = a.values();

    std::vector<std::size_t> l_offs(n + 1, 0);
    std::vector<std::size_t> l_cols;
    std::vector<T> l_vals;
    l_cols.reserve(a.nnz() / 2 + n);
    l_vals.reserve(a.nnz() / 2 + n);
    std::vector<std::size_t> diag_pos(n);
    std::vector<T> work(n, T{0});

    for (std::size_t i = 0; i < n; ++i) {
        T a_ii{0};
        bool has_diag = false;
        const std::size_t row_start = l_cols.size();
        for (std::size_t p = offs[i]; p < offs[i + 1] && cols[p] <= i; ++p) {
            const std::size_t k = cols[p];
            if (k == i) {
                a_ii = vals[p] * (T{1} + shift);
                has_diag = true;
                break;
            }
            // L_ik = (a_ik - sum_{j<k} L_ij L_kj) / L_kk over the shared pattern
            T s = vals[p];
            for (std::size_t q = l_offs[k]; q < diag_pos[k]; ++q) s -= l_vals[q] * work[l_cols[q]];
            const T l_ik = s / l_vals[diag_pos[k]];
            work[k] = l_ik;
            l_cols.push_back(k);
            l_vals.push_back(l_ik);
        }
        if (!has_diag) throw StructureError("IC(0): missing diagonal entry in row " + std::to_string(i));
        T d = a_ii;
        for (std::size_t q = row_start; q < l_cols.size(); ++q) d -= l_vals[q] * l_vals[q];
        for (std::size_t q = row_start; q < l_cols.size(); ++q) work[l_cols[q]] = T{0};
        if (!(d > T{0})) throw FactorBreakdown("IC(0): non-positive pivot", i);
        diag_pos[i] = l_cols.size();
        l_cols.push_back(i);
        l_vals.push_back(std::sqrt(d));
        l_offs[i + 1] = l_cols.size();
    }
    return CsrMatrix<T>(n, std::move(l_offs), std::move(l_cols), std::move(l_vals));
}

/// ILU(0) by IKJ elimination restricted to the pattern of `a`. The result
/// stores unit-lower L strictly below the diagonal and U on and above it.
template <std::floating_point T>
CsrMatrix<T> incomplete_lu(const CsrMatrix<T>& a) {
    const std::size_t n = a.dim();
    const auto diag = a.diagonal_positions();
    const auto offs = a.row_offsets();
    const auto cols = a.col_indices();
    std::vector<T> lu(a.values().begin(), a.values().end());

    constexpr auto kNone = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> where(n, kNone);

    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t p = offs[i]; p < offs[i + 1]; ++p) where[cols[p]] = p;
        for (std::size_t p = offs[i]; p < diag[i]; ++p) {
            const std::size_t k = cols[p];
            lu[p] /= lu[diag[k]];
            const T l_ik = lu[p];
            for (std::size_t q = diag[k] + 1; q < offs[k + 1]; ++q) {
                const std::size_t pos = where[cols[q]];
                if (pos != kNone) lu[pos] -= l_ik * lu[q];
            }
        }
        for (std::size_t p = offs[i]; p < offs[i + 1]; ++p) where[cols[p]] = kNone;
        if (!(lu[diag[i]] > T{0})) throw FactorBreakdown("ILU(0): non-positive pivot", i);
    }
    return CsrMatrix<T>(n, std::vector<std::size_t>(offs.begin(), offs.end()),
                        std::vector<std::size_t>(cols.begin(), cols.end()), std::move(lu));
}

}  // namespace detail

/// No-fill preconditioner with the contract z = M^{-1} r.
template <std::floating_point T>
class BasicPreconditioner {
public:
    struct Identity {};
    struct Jacobi {
        std::vector<T> inv_diag;
    };
    struct Ilu0 {
        CsrMatrix<T> lu;
    };
    struct Ic0 {
        CsrMatrix<T> l;
    };
    struct Ssor {
        CsrMatrix<T> a;
        std::vector<std::size_t> diag_pos;
        std::vector<T> diag;
        T omega;
    };

    static BasicPreconditioner build(PrecondKind kind, const CsrMatrix<T>& a,
                                     const PrecondOptions& opts = {}) {
        if (kind == PrecondKind::SSOR && !(opts.omega > 0.0 && opts.omega < 2.0))
            throw InvalidParameter("SSOR omega must lie in (0, 2)");
        BasicPreconditioner m;
        m.kind_ = kind;
        m.dim_ = a.dim();
        const auto t0 = std::chrono::steady_clock::now();
        switch (kind) {
            case PrecondKind::Identity:
                m.payload_ = Identity{};
                break;
            case PrecondKind::Jacobi: {
                auto d = diagonal(a);
                for (std::size_t i = 0; i < d.size(); ++i) {
                    if (d[i] == T{0}) throw SingularFactor("Jacobi: zero diagonal", i);
                    d[i] = T{1} / d[i];
                }
                m.payload_ = Jacobi{std::move(d)};
                break;
            }
            case PrecondKind::ILU0:
                m.payload_ = Ilu0{detail::incomplete_lu(a)};
                break;
            case PrecondKind::IC0:
                m.payload_ = Ic0{factor_ic0(a, opts, m.shift_)};
                break;
            case PrecondKind::SSOR: {
                Ssor s{a, a.diagonal_positions(), {}, static_cast<T>(opts.omega)};
                s.diag.resize(a.dim());
                for (std::size_t i = 0; i < a.dim(); ++i) {
                    s.diag[i] = a.values()[s.diag_pos[i]];
                    if (s.diag[i] == T{0}) throw SingularFactor("SSOR: zero diagonal", i);
                }
                m.payload_ = std::move(s);
                break;
            }
        }
        m.build_seconds_ =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return m;
    }

    PrecondKind kind() const noexcept { return kind_; }
    std::size_t dim() const noexcept { return dim_; }
    double build_seconds() const noexcept { return build_seconds_; }
    /// Diagonal shift s that IC(0) needed (A + s*diag(A)); 0 when none.
    double shift() const noexcept { return shift_; }

    /// Stored factor for ILU(0) (combined L\U) and IC(0) (L); nullptr otherwise.
    const CsrMatrix<T>* factor() const noexcept {
        if (auto* p = std::get_if<Ilu0>(&payload_)) return &p->lu;
        if (auto* p = std::get_if<Ic0>(&payload_)) return &p->l;
        return nullptr;
    }

    void apply(std::span<const T> r, std::span<T> z) const {
        if (r.size() != dim_ || z.size() != dim_)
            throw StructureError("preconditioner apply: dimension mismatch");
        std::visit([&](const auto& p) { apply_impl(p, r, z); }, payload_);
    }

    std::vector<T> apply(std::span<const T> r) const {
        std::vector<T> z(r.size());
        apply(r, std::span<T>(z));
        return z;
    }

private:
    static CsrMatrix<T> factor_ic0(const CsrMatrix<T>& a, const PrecondOptions& opts, double& shift) {
        try {
            shift = 0.0;
            return detail::incomplete_cholesky(a, T{0});
        } catch (const FactorBreakdown&) {
            if (!opts.ic_shift_retry) throw;
        }
        double s = opts.ic_initial_shift;
        for (int attempt = 0;; ++attempt) {
            try {
                auto l = detail::incomplete_cholesky(a, static_cast<T>(s));
                shift = s;
                return l;
            } catch (const FactorBreakdown&) {
                if (attempt >= opts.ic_max_doublings) throw;
                s *= 2.0;
            }
        }
    }

    void apply_impl(const Identity&, std::span<const T> r, std::span<T> z) const {
        std::copy(r.begin(), r.end(), z.begin());
    }

    void apply_impl(const Jacobi& p, std::span<const T> r, std::span<T> z) const {
        for (std::size_t i = 0; i < dim_; ++i) z[i] = r[i] * p.inv_diag[i];
    }

    void apply_impl(const Ilu0& p, std::span<const T> r, std::span<T> z) const {
        std::vector<T> y(dim_);
        lower_solve(p.lu, r, std::span<T>(y), true);
        upper_solve(p.lu, std::span<const T>(y), z, false);
    }

    void apply_impl(const Ic0& p, std::span<const T> r, std::span<T> z) const {
        std::vector<T> y(dim_);
        lower_solve(p.l, r, std::span<T>(y), false);
        lower_transpose_solve(p.l, std::span<const T>(y), z);
    }

    // (D/w + L) y = r;  y <- (2-w)/w * D y;  (D/w + L^T) z = y
    void apply_impl(const Ssor& p, std::span<const T> r, std::span<T> z) const {
        const auto offs = p.a.row_offsets();
        const auto cols = p.a.col_indices();
        const auto vals = p.a.values();
        const T w = p.omega;
        std::vector<T> y(dim_);
        for (std::size_t i = 0; i < dim_; ++i) {
            T acc = r[i];
            for (std::size_t k = offs[i]; k < p.diag_pos[i]; ++k) acc -= vals[k] * y[cols[k]];
            y[i] = acc * w / p.diag[i];
        }
        const T scale = (T{2} - w) / w;
        for (std::size_t i = 0; i < dim_; ++i) y[i] *= scale * p.diag[i];
        for (std::size_t i = dim_; i-- > 0;) {
            T acc = y[i];
            for (std::size_t k = p.diag_pos[i] + 1; k < offs[i + 1]; ++k) acc -= vals[k] * z[cols[k]];
            z[i] = acc * w / p.diag[i];
        }
    }

    PrecondKind kind_ = PrecondKind::Identity;
    std::size_t dim_ = 0;
    double build_seconds_ = 0.0;
    double shift_ = 0.0;
    std::variant<Identity, Jacobi, Ilu0, Ic0, Ssor> payload_;
};

using Preconditioner = BasicPreconditioner<double>;

}  // namespace lpunwrap
