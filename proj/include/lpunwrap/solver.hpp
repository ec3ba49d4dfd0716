#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "assemble.hpp"
#include "error.hpp"
#include "grid.hpp"
#include "precond.hpp"
#include "sparse.hpp"

namespace lpunwrap {

// ---------------------------------------------------------------------------
// Preconditioned conjugate gradient

struct PcgResult {
    std::size_t iterations = 0;
    double delta0 = 0.0;     ///< r^T M^{-1} r at the start
    double delta_final = 0.0;
};

/// Called after every inner iteration with the iteration count so far and the
/// current iterate.
template <std::floating_point T>
using PcgObserver = std::function<void(std::size_t, std::span<const T>)>;

/// Number of iterations between exact residual recomputations: round(sqrt(n)).
inline std::size_t residual_refresh_period(std::size_t n) {
    const auto p = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n))));
    return std::max<std::size_t>(p, 1);
}

/// Preconditioned CG, in place on `x`.
///
/// Stops when r^T M^{-1} r <= epsilon^2 * delta0 or after `l_max` iterations.
/// The residual is recomputed as b - A x whenever the iteration counter is a
/// multiple of round(sqrt(n)) (including the first iteration) and updated
/// recursively otherwise.
template <std::floating_point T>
PcgResult pcg_solve(const CsrMatrix<T>& a, std::span<const T> b, std::span<T> x,
                    const BasicPreconditioner<T>& m, std::size_t l_max, T epsilon,
                    const PcgObserver<T>& observer = {}) {
    const std::size_t n = a.dim();
    if (b.size() != n || x.size() != n || m.dim() != n)
        throw StructureError("pcg_solve: dimension mismatch");
    const std::size_t refresh = residual_refresh_period(n);

    std::vector<T> r(n), d(n), q(n), s(n);
    auto exact_residual = [&] {
        spmv(a, std::span<const T>(x), std::span<T>(r));
        for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
    };

    exact_residual();
    m.apply(std::span<const T>(r), std::span<T>(d));
    T delta_new = dot<T>(r, d);
    if (delta_new < T{0}) throw PcgBreakdown("pcg: preconditioner is not positive definite", 0);
    const T delta0 = delta_new;
    const T stop = epsilon * epsilon * delta0;

    std::size_t l = 0;
    while (l < l_max && delta_new > stop) {
        spmv(a, std::span<const T>(d), std::span<T>(q));
        const T dq = dot<T>(d, q);
        if (!(dq > T{0})) throw PcgBreakdown("pcg: d^T A d <= 0", l);
        const T alpha = delta_new / dq;
        for (std::size_t i = 0; i < n; ++i) x[i] += alpha * d[i];
        if (l % refresh == 0) {
            exact_residual();
        } else {
            for (std::size_t i = 0; i < n; ++i) r[i] -= alpha * q[i];
        }
        m.apply(std::span<const T>(r), std::span<T>(s));
        const T delta_old = delta_new;
        delta_new = dot<T>(r, s);
        if (delta_new < T{0}) throw PcgBreakdown("pcg: preconditioned residual became negative", l);
        const T beta = delta_new / delta_old;
        for (std::size_t i = 0; i < n; ++i) d[i] = s[i] + beta * d[i];
        ++l;
        if (observer) observer(l, std::span<const T>(x));
    }
    return {l, static_cast<double>(delta0), static_cast<double>(delta_new)};
}

/// Value-returning form: solves from `x0`, returns (solution, iterations).
template <std::floating_point T>
std::pair<std::vector<T>, std::size_t> pcg_solution(const CsrMatrix<T>& a, std::span<const T> b,
                                                 std::span<const T> x0,
                                                 const BasicPreconditioner<T>& m,
                                                 std::size_t l_max, T epsilon) {
    std::vector<T> x(x0.begin(), x0.end());
    const auto res = pcg_solve(a, b, std::span<T>(x), m, l_max, epsilon);
    return {std::move(x), res.iterations};
}

// ---------------------------------------------------------------------------
// Outer reweighting loop

enum class InitKind { RandomUniform, Zero };
enum class ExitReason { Tol, KMax, Breakdown };

inline std::string_view to_string(InitKind k) {
    return k == InitKind::Zero ? "zero" : "random";
}

inline InitKind parse_init_kind(std::string_view s) {
    if (s == "random" || s == "random-uniform") return InitKind::RandomUniform;
    if (s == "zero") return InitKind::Zero;
    throw InvalidParameter("unknown init '" + std::string(s) + "' (expected random or zero)");
}

inline std::string_view to_string(ExitReason r) {
    switch (r) {
        case ExitReason::Tol: return "tol";
        case ExitReason::KMax: return "kmax";
        case ExitReason::Breakdown: return "breakdown";
    }
    return "?";
}

struct SolverConfig {
    double p = 0.0;
    double tau = 0.01;
    std::size_t k_max = 500;
    double tol = 1e-6;
    std::size_t l_max_factor = 2;  ///< l_max = l_max_factor * M * N
    double epsilon = 0.005;
    PrecondKind precond = PrecondKind::ILU0;
    double omega = 1.0;
    std::uint64_t seed = 1;
    InitKind init = InitKind::RandomUniform;
    bool reuse_preconditioner = false;  ///< build M once instead of every outer iteration
    bool remove_mean = false;           ///< subtract mean(phi) after every inner solve

    void validate() const {
        detail::check_irls_parameters(p, tau);
        if (k_max == 0) throw InvalidParameter("kmax must be >= 1");
        if (!(tol > 0.0)) throw InvalidParameter("tol must be > 0");
        if (l_max_factor == 0) throw InvalidParameter("lmax factor must be >= 1");
        if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidParameter("epsilon must lie in (0, 1)");
        if (precond == PrecondKind::SSOR && !(omega > 0.0 && omega < 2.0))
            throw InvalidParameter("omega must lie in (0, 2)");
    }
};

struct SolveReport {
    std::size_t outer_iters = 0;
    std::vector<std::size_t> inner_iters;  ///< one entry per outer iteration
    std::size_t inner_iters_total = 0;
    double final_error = 1.0;
    double precond_build_time = 0.0;  ///< seconds, summed over all builds
    double pcg_time = 0.0;
    double assemble_time = 0.0;       ///< weights + matrix/rhs
    double total_time = 0.0;
    std::vector<double> objective_history;  ///< J(phi^k), k = 0..K; empty when p <= 0
    ExitReason exit_reason = ExitReason::KMax;
    InitKind init = InitKind::RandomUniform;
    PrecondKind precond = PrecondKind::ILU0;
    double ic_shift = 0.0;  ///< largest IC(0) diagonal shift used
};

/// Solver failure inside the outer loop; carries the report up to the failure.
class UnwrapError : public Error {
public:
    UnwrapError(const std::string& what, std::size_t outer_iteration, SolveReport partial)
        : Error("outer iteration " + std::to_string(outer_iteration) + ": " + what),
          outer_iteration_(outer_iteration),
          partial_(std::move(partial)) {}

    std::size_t outer_iteration() const noexcept { return outer_iteration_; }
    const SolveReport& partial_report() const noexcept { return partial_; }

private:
    std::size_t outer_iteration_;
    SolveReport partial_;
};

struct UnwrapResult {
    PhaseMap phi;
    SolveReport report;
};

/// Initial phase: uniform draws from (-pi, pi] or all zeros.
inline std::vector<double> initial_phase(std::size_t cells, InitKind init, std::uint64_t seed) {
    std::vector<double> phi(cells, 0.0);
    if (init == InitKind::RandomUniform) {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        for (auto& v : phi) v = kPi - kTwoPi * unit(rng);
    }
    return phi;
}

/// Lp-norm phase unwrapping by iteratively reweighted PCG solves.
inline UnwrapResult unwrap(const PhaseMap& psi, const SolverConfig& cfg) {
    using clock = std::chrono::steady_clock;
    auto seconds_since = [](clock::time_point t) {
        return std::chrono::duration<double>(clock::now() - t).count();
    };

    cfg.validate();
    if (psi.kind() != PhaseKind::Wrapped) throw InvalidInput("unwrap expects a wrapped phase map");
    const auto t_start = clock::now();

    const std::size_t m = psi.rows();
    const std::size_t n = psi.cols();
    const std::size_t cells = m * n;
    const std::size_t l_max = cfg.l_max_factor * cells;
    const bool track_objective = cfg.p > 0.0;

    SolveReport report;
    report.init = cfg.init;
    report.precond = cfg.precond;

    const auto grads = wrapped_gradients(psi);
    const StencilAssembler assembler(m, n);
    auto sys = assembler.make_system();
    PrecondOptions popts;
    popts.omega = cfg.omega;
    std::optional<Preconditioner> precond;

    std::vector<double> phi = initial_phase(cells, cfg.init, cfg.seed);
    std::vector<double> next(cells);
    if (track_objective) report.objective_history.push_back(objective(phi, grads, cfg.p));

    double error = 1.0;
    std::size_t k = 0;
    while (k < cfg.k_max && error > cfg.tol) {
        try {
            auto t = clock::now();
            const auto weights = compute_weights(phi, grads, cfg.p, cfg.tau);
            assembler.assemble(weights, grads, sys);
            report.assemble_time += seconds_since(t);

            if (!precond || !cfg.reuse_preconditioner) {
                precond = Preconditioner::build(cfg.precond, sys.a, popts);
                report.precond_build_time += precond->build_seconds();
                report.ic_shift = std::max(report.ic_shift, precond->shift());
            }

            std::copy(phi.begin(), phi.end(), next.begin());
            t = clock::now();
            const auto res = pcg_solve<double>(sys.a, sys.b, std::span<double>(next), *precond, l_max, cfg.epsilon);
            report.pcg_time += seconds_since(t);
            report.inner_iters.push_back(res.iterations);
            report.inner_iters_total += res.iterations;
        } catch (const Error& e) {
            report.outer_iters = k;
            report.final_error = error;
            report.exit_reason = ExitReason::Breakdown;
            report.total_time = seconds_since(t_start);
            throw UnwrapError(e.what(), k, std::move(report));
        }

        if (cfg.remove_mean) {
            double mean = 0.0;
            for (double v : next) mean += v;
            mean /= static_cast<double>(cells);
            for (double& v : next) v -= mean;
        }

        double diff2 = 0.0;
        double base2 = 0.0;
        for (std::size_t c = 0; c < cells; ++c) {
            diff2 += (next[c] - phi[c]) * (next[c] - phi[c]);
            base2 += phi[c] * phi[c];
        }
        error = std::sqrt(diff2) / std::max(std::sqrt(base2), 1e-30);
        phi.swap(next);
        ++k;
        if (track_objective) report.objective_history.push_back(objective(phi, grads, cfg.p));
    }

    report.outer_iters = k;
    report.final_error = error;
    report.exit_reason = error <= cfg.tol ? ExitReason::Tol : ExitReason::KMax;
    report.total_time = seconds_since(t_start);
    return {PhaseMap(m, n, std::move(phi), PhaseKind::Unwrapped), std::move(report)};
}

}  // namespace lpunwrap
