// Wraps a synthetic map, unwraps it with every preconditioner and prints
// iteration counts and the agreement with the ground truth.

#include <cstdio>

#include <lpunwrap/lpunwrap.hpp>

int main() {
    using namespace lpunwrap;

    SynthSpec spec;
    spec.rows = 60;
    spec.cols = 80;
    spec.amplitude = 25.0;
    const PhaseMap truth = generate(spec);
    const PhaseMap psi = wrap_map(truth);

    for (PrecondKind kind : kAllPreconditioners) {
        SolverConfig cfg;
        cfg.p = 1.0;
        cfg.precond = kind;
        const auto [phi, report] = unwrap(psi, cfg);
        std::printf("%-8s outer %3zu inner %6zu  Q(aligned) %.2e  congruence %.2e\n",
                    std::string(to_string(kind)).c_str(), report.outer_iters,
                    report.inner_iters_total,
                    q_error_mean_aligned(truth.values(), phi.values()).value,
                    congruence_error(phi, psi));
    }
}
