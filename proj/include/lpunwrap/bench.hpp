#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "assemble.hpp"
#include "error.hpp"
#include "grid.hpp"
#include "io.hpp"
#include "metrics.hpp"
#include "precond.hpp"
#include "solver.hpp"
#include "synth.hpp"

namespace lpunwrap {

struct BenchOptions {
    std::vector<double> scales;              ///< empty: the eight reference scales
    std::vector<PrecondKind> preconds;       ///< empty: all five
    SolverConfig solver;                     ///< precond field is overridden per cell
    SynthShape shape = SynthShape::GaussianPeaks;
    double amplitude = 40.0;
    double noise_sigma = 0.0;
    std::size_t repeat = 1;
    std::optional<std::filesystem::path> csv;
};

struct BenchCell {
    BenchRecord record;
    double ic_shift = 0.0;
    std::string note;  ///< failure message, empty on success
};

struct BenchSummary {
    std::vector<BenchCell> cells;
    std::size_t attempted = 0;
    std::size_t succeeded = 0;
};

inline double percent_of(double part, double whole) {
    return whole > 0.0 ? 100.0 * part / whole : 0.0;
}

/// Record for one finished (or broken) solve against a known truth map.
inline BenchRecord make_bench_record(const ScaledSize& size, PrecondKind kind, const SolverConfig& cfg,
                                     const SolveReport& rep, const PhaseMap* truth,
                                     const PhaseMap* result) {
    BenchRecord r;
    r.scale = size.scale;
    r.rows = size.rows;
    r.cols = size.cols;
    r.nnz = stencil_nnz(size.rows, size.cols);
    r.density_pct = stencil_density_pct(size.rows, size.cols);
    r.preconditioner = kind;
    r.p = cfg.p;
    r.outer_iters = rep.outer_iters;
    r.inner_iters_total = rep.inner_iters_total;
    r.precond_build_s = rep.precond_build_time;
    r.pcg_s = rep.pcg_time;
    r.total_s = rep.total_time;
    r.precond_build_pct = percent_of(rep.precond_build_time, rep.total_time);
    r.exit_reason = rep.exit_reason;
    r.seed = cfg.seed;
    if (truth && result) {
        r.q_raw = q_error(truth->values(), result->values()).value;
        r.q_mean_aligned = q_error_mean_aligned(truth->values(), result->values()).value;
    } else {
        r.q_raw = std::numeric_limits<double>::quiet_NaN();
        r.q_mean_aligned = std::numeric_limits<double>::quiet_NaN();
    }
    return r;
}

/// Scale sweep: every (scale, preconditioner) cell in ascending scale and
/// listing order, each repeated `repeat` times. Failures are recorded and
/// the sweep continues.
inline BenchSummary run_bench(const BenchOptions& opts, std::ostream& log) {
    std::vector<double> scales = opts.scales;
    if (scales.empty())
        for (const auto& row : reference_sizes()) scales.push_back(row.scale);
    std::sort(scales.begin(), scales.end());

    std::vector<PrecondKind> kinds;
    for (auto k : kAllPreconditioners)
        if (opts.preconds.empty() ||
            std::find(opts.preconds.begin(), opts.preconds.end(), k) != opts.preconds.end())
            kinds.push_back(k);

    BenchSummary summary;
    for (double scale : scales) {
        const ScaledSize size = scaled_size(scale);
        SynthSpec spec;
        spec.shape = opts.shape;
        spec.rows = size.rows;
        spec.cols = size.cols;
        spec.amplitude = opts.amplitude;
        spec.seed = opts.solver.seed;
        spec.noise_sigma = opts.noise_sigma;
        const PhaseMap truth = generate(spec);
        const PhaseMap psi = wrap_map(truth);

        // structural self-check before any solve
        const StencilAssembler assembler(size.rows, size.cols);
        const std::size_t nnz = assembler.make_system().a.nnz();
        const bool nnz_ok = nnz == stencil_nnz(size.rows, size.cols);

        for (PrecondKind kind : kinds) {
            for (std::size_t rep = 0; rep < opts.repeat; ++rep) {
                ++summary.attempted;
                if (!nnz_ok) {
                    log << "scale " << scale << ": assembled nnz " << nnz << " != 5MN-2(M+N) = "
                        << stencil_nnz(size.rows, size.cols) << ", row aborted\n";
                    continue;
                }
                SolverConfig cfg = opts.solver;
                cfg.precond = kind;
                BenchCell cell;
                try {
                    const auto res = unwrap(psi, cfg);
                    cell.record = make_bench_record(size, kind, cfg, res.report, &truth, &res.phi);
                    cell.ic_shift = res.report.ic_shift;
                    ++summary.succeeded;
                } catch (const UnwrapError& e) {
                    cell.record = make_bench_record(size, kind, cfg, e.partial_report(), nullptr, nullptr);
                    cell.note = e.what();
                    log << "scale " << scale << " " << to_string(kind) << ": " << e.what() << '\n';
                }
                if (opts.csv) append_bench_csv(cell.record, *opts.csv);
                summary.cells.push_back(std::move(cell));
            }
        }
    }
    return summary;
}

/// Human-readable table of the sweep sorted by total time.
inline void print_bench_table(const BenchSummary& s, std::ostream& out) {
    std::vector<const BenchCell*> order;
    for (const auto& c : s.cells) order.push_back(&c);
    std::stable_sort(order.begin(), order.end(), [](const BenchCell* a, const BenchCell* b) {
        return a->record.total_s < b->record.total_s;
    });
    char buf[256];
    std::snprintf(buf, sizeof buf, "%6s %11s %-9s %6s %9s %10s %8s %10s %10s %s\n", "scale", "size",
                  "precond", "outer", "inner", "total_s", "build%", "q_aligned", "ic_shift", "exit");
    out << buf;
    for (const BenchCell* c : order) {
        const auto& r = c->record;
        const std::string dims = std::to_string(r.cols) + "x" + std::to_string(r.rows);
        std::snprintf(buf, sizeof buf, "%6.2f %11s %-9s %6zu %9zu %10.4f %8.3f %10.3e %10.3g %s\n",
                      r.scale, dims.c_str(), std::string(to_string(r.preconditioner)).c_str(),
                      r.outer_iters, r.inner_iters_total, r.total_s, r.precond_build_pct,
                      r.q_mean_aligned, c->ic_shift, std::string(to_string(r.exit_reason)).c_str());
        out << buf;
    }
    out << s.succeeded << " of " << s.attempted << " cells succeeded\n";
}

}  // namespace lpunwrap
