#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "error.hpp"
#include "grid.hpp"

namespace lpunwrap {

/// Normalized disagreement in [0, 1]: 0 for identical signals, 1 for opposite ones.
struct QScore {
    double value = 0.0;
};

/// Q(mu, nu) = ||mu - nu||_2 / (||mu||_2 + ||nu||_2).
inline QScore q_error(std::span<const double> mu, std::span<const double> nu) {
    if (mu.size() != nu.size()) throw InvalidInput("q_error: length mismatch");
    double diff2 = 0.0, mu2 = 0.0, nu2 = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        diff2 += (mu[i] - nu[i]) * (mu[i] - nu[i]);
        mu2 += mu[i] * mu[i];
        nu2 += nu[i] * nu[i];
    }
    const double denom = std::sqrt(mu2) + std::sqrt(nu2);
    if (denom == 0.0) throw UndefinedMetric("q_error: both signals are zero");
    // the triangle inequality bounds the ratio by 1; clamp away rounding
    return {std::clamp(std::sqrt(diff2) / denom, 0.0, 1.0)};
}

/// Q after shifting nu by the mean of (mu - nu), which removes the additive
/// constant an unwrapped solution is only defined up to.
inline QScore q_error_mean_aligned(std::span<const double> mu, std::span<const double> nu) {
    if (mu.size() != nu.size()) throw InvalidInput("q_error: length mismatch");
    if (mu.empty()) throw UndefinedMetric("q_error: empty signals");
    double mean = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) mean += mu[i] - nu[i];
    mean /= static_cast<double>(mu.size());
    std::vector<double> shifted(nu.begin(), nu.end());
    for (double& v : shifted) v += mean;
    return q_error(mu, shifted);
}

/// Largest per-cell distance, modulo 2*pi, between phi and psi after the
/// best global shift. Zero means phi re-wraps exactly onto psi.
inline double congruence_error(const PhaseMap& phi, const PhaseMap& psi) {
    if (phi.rows() != psi.rows() || phi.cols() != psi.cols())
        throw InvalidInput("congruence_error: shape mismatch");
    const auto a = phi.values();
    const auto b = psi.values();
    const double ref = wrap_scalar(a[0] - b[0]);
    double lo = 0.0, hi = 0.0;
    for (std::size_t c = 0; c < a.size(); ++c) {
        const double e = wrap_scalar(wrap_scalar(a[c] - b[c]) - ref);
        lo = std::min(lo, e);
        hi = std::max(hi, e);
    }
    // midrange shift minimizes the max deviation
    return 0.5 * (hi - lo);
}

}  // namespace lpunwrap
