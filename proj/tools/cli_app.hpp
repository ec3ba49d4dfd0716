#pragma once

// Command-line front end: wrap, unwrap, bench, compare.
//
// Exit codes: 0 success, 1 runtime / I/O, 2 usage / validation, 3 solver breakdown.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <lpunwrap/lpunwrap.hpp>

namespace lpunwrap::cli {

enum ExitCode : int { kOk = 0, kRuntime = 1, kUsage = 2, kBreakdown = 3 };

struct SolverFlags {
    double p = 0.0;
    double tau = 0.01;
    std::string precond = "ilu0";
    double omega = 1.0;
    std::size_t kmax = 500;
    double tol = 1e-6;
    std::size_t lmax_factor = 2;
    double epsilon = 0.005;
    std::uint64_t seed = 1;
    std::string init = "random";
    bool reuse = false;
    bool remove_mean = false;

    void add_to(CLI::App* app, bool with_precond) {
        app->add_option("--p", p, "Lp exponent, must be < 2")->capture_default_str();
        app->add_option("--tau", tau, "weight smoothing constant")->capture_default_str();
        if (with_precond)
            app->add_option("--precond", precond, "identity|jacobi|ilu0|ic0|ssor")->capture_default_str();
        app->add_option("--omega", omega, "SSOR relaxation factor")->capture_default_str();
        app->add_option("--kmax", kmax, "max outer iterations")->capture_default_str();
        app->add_option("--tol", tol, "outer relative-change tolerance")->capture_default_str();
        app->add_option("--lmax-factor", lmax_factor, "inner iteration cap as multiple of M*N")
            ->capture_default_str();
        app->add_option("--epsilon", epsilon, "inner PCG reduction factor")->capture_default_str();
        app->add_option("--seed", seed, "seed for the random initial phase")->capture_default_str();
        app->add_option("--init", init, "random|zero")->capture_default_str();
        app->add_flag("--reuse-precond", reuse, "build the preconditioner once");
        app->add_flag("--remove-mean", remove_mean, "subtract the mean after each inner solve");
    }

    SolverConfig config() const {
        SolverConfig cfg;
        cfg.p = p;
        cfg.tau = tau;
        cfg.precond = parse_precond_kind(precond);
        cfg.omega = omega;
        cfg.k_max = kmax;
        cfg.tol = tol;
        cfg.l_max_factor = lmax_factor;
        cfg.epsilon = epsilon;
        cfg.seed = seed;
        cfg.init = parse_init_kind(init);
        cfg.reuse_preconditioner = reuse;
        cfg.remove_mean = remove_mean;
        cfg.validate();
        return cfg;
    }
};

inline nlohmann::json report_json(const SolveReport& r, const SolverConfig& cfg, std::size_t rows,
                                  std::size_t cols) {
    return {
        {"rows", rows},
        {"cols", cols},
        {"p", cfg.p},
        {"precond", std::string(to_string(r.precond))},
        {"init", std::string(to_string(r.init))},
        {"outer_iters", r.outer_iters},
        {"inner_iters", r.inner_iters},
        {"inner_iters_total", r.inner_iters_total},
        {"final_error", r.final_error},
        {"precond_build_s", r.precond_build_time},
        {"assemble_s", r.assemble_time},
        {"pcg_s", r.pcg_time},
        {"total_s", r.total_time},
        {"precond_build_pct", percent_of(r.precond_build_time, r.total_time)},
        {"ic_shift", r.ic_shift},
        {"objective_history", r.objective_history},
        {"exit_reason", std::string(to_string(r.exit_reason))},
    };
}

inline void print_report(const SolveReport& r, std::ostream& out) {
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "precond %s  init %s\nouter iterations %zu  inner iterations %zu  final error %.3e\n"
                  "time: total %.4fs  pcg %.4fs  assemble %.4fs  precond build %.4fs (%.2f%%)\n"
                  "exit reason: %s\n",
                  std::string(to_string(r.precond)).c_str(), std::string(to_string(r.init)).c_str(),
                  r.outer_iters, r.inner_iters_total, r.final_error, r.total_time, r.pcg_time,
                  r.assemble_time, r.precond_build_time,
                  percent_of(r.precond_build_time, r.total_time),
                  std::string(to_string(r.exit_reason)).c_str());
    out << buf;
    if (r.ic_shift > 0.0) out << "ic0 diagonal shift: " << r.ic_shift << '\n';
}

inline void print_map_stats(const PhaseMap& m, const char* label, std::ostream& out) {
    const auto v = m.values();
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    char buf[200];
    std::snprintf(buf, sizeof buf, "%s: %zux%zu (%s) min %.6f max %.6f\n", label, m.cols(), m.rows(),
                  m.kind() == PhaseKind::Wrapped ? "wrapped" : "unwrapped", *lo, *hi);
    out << buf;
}

inline std::vector<double> parse_scales(const std::vector<std::string>& items) {
    std::vector<double> s;
    for (const auto& it : items) {
        try {
            s.push_back(std::stod(it));
        } catch (const std::logic_error&) {
            throw InvalidParameter("bad scale '" + it + "'");
        }
        scaled_size(s.back());
    }
    return s;
}

/// Parses and runs one command line. `args` excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Lp-norm phase unwrapping with preconditioned conjugate gradient"};
    app.name("lpunwrap");
    app.require_subcommand(1);

    // wrap
    auto* wrap_cmd = app.add_subcommand("wrap", "generate a synthetic phase map and wrap it");
    std::string shape = "gaussian";
    SynthSpec spec;
    std::string wrap_out;
    std::string truth_out;
    std::string wrap_pgm;
    wrap_cmd->add_option("--shape", shape, "gaussian|ramp|parabola")->capture_default_str();
    wrap_cmd->add_option("--rows", spec.rows, "map height")->capture_default_str();
    wrap_cmd->add_option("--cols", spec.cols, "map width")->capture_default_str();
    wrap_cmd->add_option("--amplitude", spec.amplitude, "peak-to-peak phase, radians")->capture_default_str();
    wrap_cmd->add_option("--seed", spec.seed, "generator seed")->capture_default_str();
    wrap_cmd->add_option("--noise-sigma", spec.noise_sigma, "additive Gaussian noise, radians")
        ->capture_default_str();
    wrap_cmd->add_option("--out", wrap_out, "wrapped PHM output")->required();
    wrap_cmd->add_option("--truth-out", truth_out, "unwrapped ground-truth PHM output");
    wrap_cmd->add_option("--pgm", wrap_pgm, "PGM preview of the wrapped map");

    // unwrap
    auto* unwrap_cmd = app.add_subcommand("unwrap", "unwrap a wrapped PHM map");
    std::string unwrap_in;
    std::string unwrap_out;
    std::string unwrap_pgm;
    std::string dump_matrix;
    bool as_json = false;
    SolverFlags sflags;
    unwrap_cmd->add_option("input", unwrap_in, "wrapped PHM input")->required();
    unwrap_cmd->add_option("--out", unwrap_out, "unwrapped PHM output")->required();
    unwrap_cmd->add_option("--pgm", unwrap_pgm, "PGM preview of the re-wrapped result");
    unwrap_cmd->add_option("--dump-matrix", dump_matrix, "Matrix Market export of the first assembled A");
    unwrap_cmd->add_flag("--json", as_json, "print the report as JSON");
    sflags.add_to(unwrap_cmd, true);

    // bench
    auto* bench_cmd = app.add_subcommand("bench", "scale sweep over preconditioners");
    std::vector<std::string> scale_items;
    std::vector<std::string> precond_items;
    std::string csv_path;
    std::size_t repeat = 1;
    double bench_amplitude = 40.0;
    double bench_noise = 0.0;
    SolverFlags bflags;
    bench_cmd->add_option("--scales", scale_items, "comma-separated scales (default: all eight)")
        ->delimiter(',');
    bench_cmd->add_option("--preconds", precond_items, "comma-separated preconditioners (default: all)")
        ->delimiter(',');
    bench_cmd->add_option("--csv", csv_path, "append rows to this CSV file");
    bench_cmd->add_option("--repeat", repeat, "rows per cell")->capture_default_str();
    bench_cmd->add_option("--amplitude", bench_amplitude, "synthetic peak-to-peak phase")->capture_default_str();
    bench_cmd->add_option("--noise-sigma", bench_noise, "synthetic noise level")->capture_default_str();
    bflags.add_to(bench_cmd, false);

    // compare
    auto* compare_cmd = app.add_subcommand("compare", "normalized error Q between two maps");
    std::string cmp_a;
    std::string cmp_b;
    compare_cmd->add_option("reference", cmp_a, "reference PHM (mu)")->required();
    compare_cmd->add_option("candidate", cmp_b, "candidate PHM (nu)")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return kOk;
        }
        err << "error: " << e.what() << '\n' << app.help();
        return kUsage;
    }

    try {
        if (wrap_cmd->parsed()) {
            spec.shape = parse_synth_shape(shape);
            spec.validate();
            const PhaseMap truth = generate(spec);
            const PhaseMap psi = wrap_map(truth);
            write_phm(psi, wrap_out);
            if (!truth_out.empty()) write_phm(truth, truth_out);
            if (!wrap_pgm.empty()) write_pgm(psi, wrap_pgm);
            print_map_stats(truth, "truth", out);
            print_map_stats(psi, "wrapped", out);
            return kOk;
        }

        if (unwrap_cmd->parsed()) {
            const SolverConfig cfg = sflags.config();
            const PhaseMap psi = read_phm(unwrap_in);
            if (psi.kind() != PhaseKind::Wrapped) throw InvalidInput("input map is not wrapped");
            if (!dump_matrix.empty()) {
                const auto grads = wrapped_gradients(psi);
                const auto phi0 = initial_phase(psi.size(), cfg.init, cfg.seed);
                const auto sys = assemble_system(compute_weights(phi0, grads, cfg.p, cfg.tau), grads);
                write_matrix_market(sys.a, dump_matrix);
            }
            try {
                const auto res = unwrap(psi, cfg);
                write_phm(res.phi, unwrap_out);
                if (!unwrap_pgm.empty()) write_pgm(res.phi, unwrap_pgm);
                if (as_json)
                    out << report_json(res.report, cfg, psi.rows(), psi.cols()).dump(2) << '\n';
                else
                    print_report(res.report, out);
                return kOk;
            } catch (const UnwrapError& e) {
                err << "solver breakdown: " << e.what() << '\n';
                if (as_json)
                    out << report_json(e.partial_report(), cfg, psi.rows(), psi.cols()).dump(2) << '\n';
                else
                    print_report(e.partial_report(), out);
                return kBreakdown;
            }
        }

        if (bench_cmd->parsed()) {
            BenchOptions opts;
            opts.solver = bflags.config();
            opts.scales = parse_scales(scale_items);
            for (const auto& p : precond_items) opts.preconds.push_back(parse_precond_kind(p));
            if (repeat == 0) throw InvalidParameter("repeat must be >= 1");
            opts.repeat = repeat;
            opts.amplitude = bench_amplitude;
            opts.noise_sigma = bench_noise;
            if (!csv_path.empty()) opts.csv = csv_path;
            const auto summary = run_bench(opts, err);
            print_bench_table(summary, out);
            return summary.succeeded > 0 ? kOk : kRuntime;
        }

        if (compare_cmd->parsed()) {
            const PhaseMap a = read_phm(cmp_a);
            const PhaseMap b = read_phm(cmp_b);
            if (a.rows() != b.rows() || a.cols() != b.cols()) {
                err << "error: shape mismatch " << a.cols() << "x" << a.rows() << " vs " << b.cols()
                    << "x" << b.rows() << '\n';
                return kUsage;
            }
            char buf[128];
            std::snprintf(buf, sizeof buf, "q_raw %.9g\nq_mean_aligned %.9g\n",
                          q_error(a.values(), b.values()).value,
                          q_error_mean_aligned(a.values(), b.values()).value);
            out << buf;
            return kOk;
        }
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kRuntime;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const InvalidInput& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const InvalidParameter& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const UndefinedMetric& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kRuntime;
    }
    return kUsage;
}

}  // namespace lpunwrap::cli
