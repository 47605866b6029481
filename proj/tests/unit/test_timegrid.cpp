#include <cmath>

#include <gtest/gtest.h>

#include "support.hpp"

namespace evo {
namespace {

using test::max_abs;
using test::random_trajectory;

TEST(TimeGrid, RejectsInvalidParameters) {
    EXPECT_THROW(TimeGrid(0.0, 10, 1.0), ParameterError);
    EXPECT_THROW(TimeGrid(0.1, 0, 1.0), ParameterError);
    EXPECT_THROW(TimeGrid(0.1, 10, 0.0), ParameterError);
}

TEST(TimeGrid, NodesAndWeights) {
    const TimeGrid g(0.25, 5, 1.0);
    EXPECT_DOUBLE_EQ(g.time(4), 1.0);
    EXPECT_DOUBLE_EQ(g.final_time(), 1.0);
    EXPECT_DOUBLE_EQ(g.weight(2), std::exp(-1.0));
}

TEST(Trajectory, ShapeMismatchThrows) {
    const TimeGrid g(0.1, 4, 1.0);
    Trajectory a(g, 2);
    const Trajectory b(g, 3);
    EXPECT_THROW(a += b, ShapeError);
}

TEST(WeightedNorm, ZeroTrajectory) { EXPECT_EQ(weighted_norm(Trajectory(TimeGrid(0.1, 7, 2.0), 3)), 0.0); }

TEST(WeightedNorm, SingleNode) {
    Trajectory u(TimeGrid(1.0, 1, 1.0), 1);
    u.values()(0, 0) = 1.0;
    EXPECT_DOUBLE_EQ(weighted_norm(u), 1.0);
}

TEST(WeightedNorm, ConstantDirectSum) {
    Trajectory u(TimeGrid(0.1, 100, 0.5), 1);
    u.values().setConstant(1.0);
    EXPECT_NEAR(weighted_norm(u), 1.0250782832175713, 1e-14);
}

TEST(D0, RampGivesConstantAfterFirstStep) {
    const TimeGrid g(0.1, 20, 1.0);
    Trajectory u(g, 1);
    for (std::size_t n = 0; n < g.n_steps(); ++n) {
        u.values()(static_cast<Eigen::Index>(n), 0) = g.time(n);
    }
    const Trajectory d = d0(u);
    EXPECT_EQ(d.values()(0, 0), Complex(0.0));
    for (std::size_t n = 1; n < g.n_steps(); ++n) {
        EXPECT_NEAR(d.values()(static_cast<Eigen::Index>(n), 0).real(), 1.0, 1e-12);
    }
}

TEST(D0Inv, ConstantGivesCumulativeSum) {
    const TimeGrid g(0.1, 10, 1.0);
    Trajectory u(g, 1);
    u.values().setConstant(1.0);
    const Trajectory s = d0_inv(u);
    for (std::size_t n = 0; n < g.n_steps(); ++n) {
        EXPECT_NEAR(s.values()(static_cast<Eigen::Index>(n), 0).real(), 0.1 * static_cast<double>(n + 1), 1e-14);
    }
}

TEST(D0Inv, ExactInversePair) {
    const TimeGrid g(1e-2, 300, 2.0);
    const Trajectory u = random_trajectory(g, 4, 11);
    EXPECT_LE(max_abs((d0(d0_inv(u)) - u).values()), 1e-12);
    EXPECT_LE(max_abs((d0_inv(d0(u)) - u).values()), 1e-12);
}

TEST(D0Inv, WeightedOperatorNormByPowerIteration) {
    const double nu = 2.0;
    const double dt = 0.01;
    const TimeGrid g(dt, 2000, nu);
    Trajectory u = random_trajectory(g, 1, 5);
    double est = 0.0;
    // Power iteration on S* S in the weighted inner product; the weighted
    // adjoint of d0_inv is w^{-1} d0_inv^T w.
    for (int it = 0; it < 200; ++it) {
        u *= 1.0 / weighted_norm(u);
        Trajectory s = d0_inv(u);
        est = weighted_norm(s);
        for (std::size_t n = 0; n < g.n_steps(); ++n) {
            s.step(n) *= g.weight(n);
        }
        Trajectory adj(g, 1);
        Complex acc{0.0, 0.0};
        for (std::size_t n = g.n_steps(); n-- > 0;) {
            acc += s.values()(static_cast<Eigen::Index>(n), 0);
            adj.values()(static_cast<Eigen::Index>(n), 0) = dt * acc / g.weight(n);
        }
        u = adj;
    }
    EXPECT_LE(est, dt / (1.0 - std::exp(-nu * dt)) + 1e-9);
    EXPECT_GT(est, 0.45);
}

TEST(Causality, ZeroPrefixPreservedByEveryOperation) {
    const TimeGrid g(1e-2, 60, 1.0);
    const std::size_t m = 17;
    const Trajectory u = random_trajectory(g, 3, 3, m + 1);
    const auto rows = static_cast<Eigen::Index>(m + 1);
    EXPECT_EQ(max_abs(d0(u).values().topRows(rows)), 0.0);
    EXPECT_EQ(max_abs(d0_inv(u).values().topRows(rows)), 0.0);
    EXPECT_EQ(max_abs(d0_frac(u, 0.3).values().topRows(rows)), 0.0);
    EXPECT_EQ(max_abs(gl_apply(u, -0.4).values().topRows(rows)), 0.0);
}

TEST(GlWeights, FrozenValues) {
    const auto half = gl_weights(0.5, 6);
    const double expect_half[] = {1.0, -0.5, -0.125, -0.0625, -0.0390625, -0.02734375};
    const auto minus_half = gl_weights(-0.5, 6);
    const double expect_minus[] = {1.0, 0.5, 0.375, 0.3125, 0.2734375, 0.24609375};
    for (std::size_t j = 0; j < 6; ++j) {
        EXPECT_DOUBLE_EQ(half[j], expect_half[j]);
        EXPECT_DOUBLE_EQ(minus_half[j], expect_minus[j]);
    }
    const auto one = gl_weights(1.0, 4);
    EXPECT_EQ(one[0], 1.0);
    EXPECT_EQ(one[1], -1.0);
    EXPECT_EQ(one[2], 0.0);
    EXPECT_EQ(one[3], 0.0);
}

TEST(D0Frac, AlphaOneIsD0Exactly) {
    const TimeGrid g(1e-2, 80, 1.0);
    const Trajectory u = random_trajectory(g, 3, 8);
    EXPECT_TRUE(d0_frac(u, 1.0).identical(d0(u)));
}

TEST(D0Frac, RejectsOrderOutsideRange) {
    const Trajectory u(TimeGrid(0.1, 3, 1.0), 1);
    EXPECT_THROW(d0_frac(u, 0.0), ParameterError);
    EXPECT_THROW(d0_frac(u, 2.0), ParameterError);
}

TEST(D0Frac, HalfTwiceApproximatesD0) {
    const TimeGrid g(1e-3, 1000, 1.0);
    Trajectory u(g, 1);
    for (std::size_t n = 0; n < g.n_steps(); ++n) {
        const double t = g.time(n);
        u.values()(static_cast<Eigen::Index>(n), 0) = t * t * std::sin(3.0 * t);
    }
    const Trajectory twice = d0_frac(d0_frac(u, 0.5), 0.5);
    const Trajectory ref = d0(u);
    EXPECT_LE(max_abs((twice - ref).values()), 1e-2 * max_abs(ref.values()));
}

TEST(FourierLaplace, ZeroAndDelta) {
    const TimeGrid g(0.1, 16, 1.0);
    EXPECT_EQ(max_abs(fourier_laplace_diag(Trajectory(g, 2))), 0.0);
    Trajectory delta(g, 1);
    delta.values()(0, 0) = 1.0;
    const RowMatrix s = fourier_laplace_diag(delta);
    for (Eigen::Index j = 0; j < s.rows(); ++j) {
        EXPECT_NEAR(std::abs(s(j, 0) - s(0, 0)), 0.0, 1e-15);
    }
}

TEST(FourierLaplace, D0InvTransferAtZeroFrequency) {
    const double nu = 1.0;
    const TimeGrid g(1e-3, 20001, nu);
    Trajectory u(g, 1);
    u.values()(0, 0) = 1.0;
    const RowMatrix a = fourier_laplace_diag(d0_inv(u));
    const RowMatrix b = fourier_laplace_diag(u);
    const auto freqs = fourier_laplace_frequencies(g);
    ASSERT_EQ(freqs[0], 0.0);
    const Complex ratio = a(0, 0) / b(0, 0);
    EXPECT_NEAR(ratio.real(), 1.0 / nu, 0.02 / nu);
    EXPECT_NEAR(ratio.imag(), 0.0, 1e-9);
}

} // namespace
} // namespace evo
