#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <lpunwrap/grid.hpp>

using namespace lpunwrap;

TEST(WrapScalar, FixedValues) {
    EXPECT_EQ(wrap_scalar(0.0), 0.0);
    EXPECT_NEAR(wrap_scalar(4.0), 4.0 - kTwoPi, 1e-15);
    EXPECT_NEAR(wrap_scalar(4.0), -2.2832, 1e-4);
    EXPECT_EQ(wrap_scalar(kPi), kPi);
    EXPECT_EQ(wrap_scalar(-kPi), kPi);
    EXPECT_EQ(wrap_scalar(3.0), 3.0);
    EXPECT_NEAR(wrap_scalar(3.0 * kPi), kPi, 1e-12);
    EXPECT_NEAR(wrap_scalar(-3.0 * kPi), kPi, 1e-12);
}

TEST(WrapScalar, RejectsNonFinite) {
    EXPECT_THROW(wrap_scalar(std::numeric_limits<double>::infinity()), InvalidInput);
    EXPECT_THROW(wrap_scalar(std::numeric_limits<double>::quiet_NaN()), InvalidInput);
}

TEST(WrapScalar, IdempotentAndCongruent) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> dist(-1e4, 1e4);
    for (int t = 0; t < 20000; ++t) {
        const double x = t < 10000 ? dist(rng) : dist(rng) * 1e-3;
        const double w = wrap_scalar(x);
        ASSERT_TRUE(w > -kPi && w <= kPi) << x;
        ASSERT_EQ(wrap_scalar(w), w) << x;
        const double k = (x - w) / kTwoPi;
        ASSERT_NEAR(k, std::round(k), 1e-12 * std::max(1.0, std::abs(x))) << x;
    }
}

TEST(PhaseMap, Invariants) {
    EXPECT_THROW(PhaseMap(1, 4, std::vector<double>(4, 0.0), PhaseKind::Unwrapped), InvalidInput);
    EXPECT_THROW(PhaseMap(2, 2, std::vector<double>(3, 0.0), PhaseKind::Unwrapped), InvalidInput);
    EXPECT_THROW(PhaseMap(2, 2, {0.0, 0.0, 0.0, std::nan("")}, PhaseKind::Unwrapped), InvalidInput);
    EXPECT_THROW(PhaseMap(2, 2, {0.0, 0.0, 0.0, 3.2}, PhaseKind::Wrapped), InvalidInput);
    EXPECT_THROW(PhaseMap(2, 2, {0.0, -kPi, 0.0, 0.0}, PhaseKind::Wrapped), InvalidInput);
    EXPECT_NO_THROW(PhaseMap(2, 2, {0.0, kPi, 0.0, 3.2}, PhaseKind::Unwrapped));
}

TEST(WrapMap, Examples) {
    const auto zero = wrap_map(PhaseMap::constant(3, 4, 0.0, PhaseKind::Unwrapped));
    EXPECT_EQ(zero.kind(), PhaseKind::Wrapped);
    for (double v : zero.values()) EXPECT_EQ(v, 0.0);

    const auto two_pi = wrap_map(PhaseMap::constant(3, 4, kTwoPi, PhaseKind::Unwrapped));
    for (double v : two_pi.values()) EXPECT_NEAR(v, 0.0, 1e-15);

    const auto three = wrap_map(PhaseMap::constant(2, 2, 3.0, PhaseKind::Unwrapped));
    for (double v : three.values()) EXPECT_EQ(v, 3.0);
}

TEST(WrappedGradients, Examples) {
    const auto flat = wrapped_gradients(PhaseMap::constant(4, 5, 1.5, PhaseKind::Wrapped));
    for (double v : flat.dx_values()) EXPECT_EQ(v, 0.0);
    for (double v : flat.dy_values()) EXPECT_EQ(v, 0.0);

    const PhaseMap rise(2, 2, {0.0, 2.0, 0.0, 2.0}, PhaseKind::Wrapped);
    EXPECT_EQ(wrapped_gradients(rise).dx(0, 0), 2.0);
    EXPECT_EQ(wrapped_gradients(rise).dx(1, 0), 2.0);

    const PhaseMap jump(2, 2, {3.0, -3.0, 3.0, -3.0}, PhaseKind::Wrapped);
    const auto g = wrapped_gradients(jump);
    EXPECT_NEAR(g.dx(0, 0), -6.0 + kTwoPi, 1e-15);
    EXPECT_NEAR(g.dx(0, 0), 0.2832, 1e-4);
    EXPECT_EQ(g.dy(0, 1), 0.0);
}

TEST(WrappedGradients, EdgeExtentsAndKind) {
    const auto g = wrapped_gradients(PhaseMap::constant(3, 7, 0.0, PhaseKind::Wrapped));
    EXPECT_EQ(g.dx_values().size(), 3u * 6u);
    EXPECT_EQ(g.dy_values().size(), 2u * 7u);
    EXPECT_THROW(wrapped_gradients(PhaseMap::constant(3, 3, 0.0, PhaseKind::Unwrapped)), InvalidInput);
}

// gradients of a wrapped map equal the exact forward differences whenever
// every true neighbor difference is inside (-pi, pi]
TEST(WrappedGradients, ExactRecoveryOfSmallDifferences) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> step(-1.5, 1.5);
    std::uniform_real_distribution<double> offset(-50.0, 50.0);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t m = 2 + rng() % 12;
        const std::size_t n = 2 + rng() % 12;
        // separable random walks: every neighbor difference is one step, |step| < pi
        std::vector<double> f(m), g(n);
        f[0] = offset(rng);
        for (std::size_t i = 1; i < m; ++i) f[i] = f[i - 1] + step(rng);
        for (std::size_t j = 1; j < n; ++j) g[j] = g[j - 1] + step(rng);
        std::vector<double> phi(m * n);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j) phi[i * n + j] = f[i] + g[j];

        const PhaseMap truth(m, n, phi, PhaseKind::Unwrapped);
        const auto grads = wrapped_gradients(wrap_map(truth));
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j + 1 < n; ++j)
                ASSERT_NEAR(grads.dx(i, j), truth(i, j + 1) - truth(i, j), 1e-12);
        for (std::size_t i = 0; i + 1 < m; ++i)
            for (std::size_t j = 0; j < n; ++j)
                ASSERT_NEAR(grads.dy(i, j), truth(i + 1, j) - truth(i, j), 1e-12);
    }
}
