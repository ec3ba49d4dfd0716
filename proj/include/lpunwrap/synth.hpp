#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"
#include "grid.hpp"

namespace lpunwrap {

enum class SynthShape { GaussianPeaks, Ramp, Parabola };

inline std::string_view to_string(SynthShape s) {
    switch (s) {
        case SynthShape::GaussianPeaks: return "gaussian";
        case SynthShape::Ramp: return "ramp";
        case SynthShape::Parabola: return "parabola";
    }
    return "?";
}

inline SynthShape parse_synth_shape(std::string_view s) {
    if (s == "gaussian" || s == "gaussian-peaks" || s == "peaks") return SynthShape::GaussianPeaks;
    if (s == "ramp") return SynthShape::Ramp;
    if (s == "parabola") return SynthShape::Parabola;
    throw InvalidInput("unknown shape '" + std::string(s) + "' (expected gaussian, ramp or parabola)");
}

struct SynthSpec {
    SynthShape shape = SynthShape::GaussianPeaks;
    std::size_t rows = 120;
    std::size_t cols = 160;
    double amplitude = 40.0;  ///< peak-to-peak range of the noiseless map, radians
    std::uint64_t seed = 1;
    double noise_sigma = 0.0;

    void validate() const {
        if (rows < 2) throw InvalidInput("rows must be >= 2");
        if (cols < 2) throw InvalidInput("cols must be >= 2");
        if (!std::isfinite(amplitude)) throw InvalidInput("amplitude must be finite");
        if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma))
            throw InvalidInput("noise sigma must be finite and >= 0");
    }
};

namespace detail {

// Bumps live in normalized coordinates so the same seed yields the same
// picture at every resolution.
inline std::vector<double> gaussian_peaks(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> center(0.25, 0.75);
    std::uniform_real_distribution<double> width(0.12, 0.22);
    std::uniform_real_distribution<double> height(0.5, 1.0);
    const int bumps = 2 + static_cast<int>(rng() % 2);

    struct Bump { double u, v, s, h; };
    std::vector<Bump> params;
    for (int b = 0; b < bumps; ++b) {
        Bump p{center(rng), center(rng), width(rng), height(rng)};
        if (rng() % 2) p.h = -p.h;
        params.push_back(p);
    }

    std::vector<double> f(rows * cols);
    for (std::size_t i = 0; i < rows; ++i) {
        const double v = static_cast<double>(i) / static_cast<double>(rows - 1);
        for (std::size_t j = 0; j < cols; ++j) {
            const double u = static_cast<double>(j) / static_cast<double>(cols - 1);
            double acc = 0.0;
            for (const auto& p : params) {
                const double r2 = (u - p.u) * (u - p.u) + (v - p.v) * (v - p.v);
                acc += p.h * std::exp(-r2 / (2.0 * p.s * p.s));
            }
            f[i * cols + j] = acc;
        }
    }
    return f;
}

}  // namespace detail

/// Deterministic synthetic unwrapped phase for a given spec.
inline PhaseMap generate(const SynthSpec& spec) {
    spec.validate();
    const std::size_t m = spec.rows;
    const std::size_t n = spec.cols;
    std::mt19937_64 rng(spec.seed);
    std::vector<double> phi(m * n, 0.0);

    switch (spec.shape) {
        case SynthShape::GaussianPeaks: {
            auto f = detail::gaussian_peaks(m, n, rng);
            const auto [lo, hi] = std::minmax_element(f.begin(), f.end());
            const double range = *hi - *lo;
            const double scale = range > 0.0 ? spec.amplitude / range : 0.0;
            for (std::size_t c = 0; c < f.size(); ++c) phi[c] = f[c] * scale;
            break;
        }
        case SynthShape::Ramp: {
            const double slope = spec.amplitude / static_cast<double>((m - 1) + (n - 1));
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    phi[i * n + j] = slope * static_cast<double>(i + j);
            break;
        }
        case SynthShape::Parabola: {
            const double y0 = 0.5 * static_cast<double>(m - 1);
            const double x0 = 0.5 * static_cast<double>(n - 1);
            const double peak_r2 = x0 * x0 + y0 * y0;
            const double c = spec.amplitude / peak_r2;
            for (std::size_t i = 0; i < m; ++i) {
                const double dy = static_cast<double>(i) - y0;
                for (std::size_t j = 0; j < n; ++j) {
                    const double dx = static_cast<double>(j) - x0;
                    phi[i * n + j] = c * (dx * dx + dy * dy);
                }
            }
            break;
        }
    }

    if (spec.noise_sigma > 0.0) {
        std::normal_distribution<double> noise(0.0, spec.noise_sigma);
        for (auto& v : phi) v += noise(rng);
    }
    return PhaseMap(m, n, std::move(phi), PhaseKind::Unwrapped);
}

struct ScaledSize {
    double scale;
    std::size_t rows;
    std::size_t cols;
};

/// The eight-step size sweep around the 480 x 640 reference image.
inline constexpr std::array<ScaledSize, 8> reference_sizes() {
    return {{{0.25, 120, 160},
             {0.50, 240, 320},
             {0.75, 360, 480},
             {1.00, 480, 640},
             {1.25, 600, 800},
             {1.50, 720, 960},
             {1.75, 840, 1120},
             {2.00, 960, 1280}}};
}

/// Size for an arbitrary scale of the 480 x 640 reference.
inline ScaledSize scaled_size(double scale) {
    if (!(scale > 0.0) || !std::isfinite(scale)) throw InvalidInput("scale must be positive");
    for (const auto& row : reference_sizes())
        if (std::abs(row.scale - scale) < 1e-9) return row;
    const auto rows = static_cast<std::size_t>(std::llround(480.0 * scale));
    const auto cols = static_cast<std::size_t>(std::llround(640.0 * scale));
    if (rows < 2 || cols < 2) throw InvalidInput("scale too small for a 2x2 grid");
    return {scale, rows, cols};
}

}  // namespace lpunwrap
