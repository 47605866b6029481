#include <cmath>

#include <gtest/gtest.h>

#include "support.hpp"

namespace evo {
namespace {

using test::max_abs;

RealRowMatrix unit_embedding(std::size_t k, std::size_t dof) {
    RealRowMatrix e = RealRowMatrix::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(dof));
    for (std::size_t i = 0; i < std::min(k, dof); ++i) {
        e(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = 1.0;
    }
    return e;
}

std::vector<Trajectory> constant_family(const TimeGrid& g, std::size_t k, std::size_t dof, double value) {
    std::vector<Trajectory> z;
    for (std::size_t i = 0; i < k; ++i) {
        Trajectory t(g, dof);
        t.values().setConstant(value);
        z.push_back(t);
    }
    return z;
}

TEST(Eigenvalues, Sequences) {
    const auto inv = eigenvalues(EigenSequence::InverseSquare, 3);
    EXPECT_DOUBLE_EQ(inv[2], 1.0 / 9.0);
    const auto geo = eigenvalues(EigenSequence::Geometric, 3);
    EXPECT_DOUBLE_EQ(geo[2], 0.125);
    EXPECT_NEAR(tail_mass(EigenSequence::Geometric, 3), 0.125, 1e-15);
    EXPECT_NEAR(tail_mass(EigenSequence::InverseSquare, 4), 0.22132295573711525, 1e-12);
    EXPECT_EQ(parse_eigen_sequence("geometric"), EigenSequence::Geometric);
    EXPECT_THROW(parse_eigen_sequence("flat"), ParameterError);
}

TEST(WienerPath, RejectsNegativeLambda) {
    const TimeGrid g(1e-2, 10, 1.0);
    EXPECT_THROW(WienerPath::sample(g, {1.0, -0.5}, unit_embedding(2, 2), 1), ParameterError);
}

TEST(WienerPath, SameSeedIsBitIdentical) {
    const TimeGrid g(1e-2, 50, 1.0);
    const auto a = WienerPath::sample(g, {1.0, 0.25}, unit_embedding(2, 3), 42);
    const auto b = WienerPath::sample(g, {1.0, 0.25}, unit_embedding(2, 3), 42);
    const auto c = WienerPath::sample(g, {1.0, 0.25}, unit_embedding(2, 3), 42, 1);
    EXPECT_TRUE(a.increments() == b.increments());
    EXPECT_FALSE(a.increments() == c.increments());
    EXPECT_EQ(a.increments().row(0).cwiseAbs().maxCoeff(), 0.0);
}

TEST(WienerPath, IncrementVarianceIsDt) {
    const double dt = 1e-2;
    const TimeGrid g(dt, 100001, 1.0);
    const auto p = WienerPath::sample(g, {1.0}, unit_embedding(1, 1), 7);
    const auto col = p.increments().col(0).tail(100000);
    const double mean = col.mean();
    const double var = (col.array() - mean).square().sum() / static_cast<double>(col.size() - 1);
    EXPECT_NEAR(var, dt, 0.05 * dt);
}

TEST(WienerPath, CoarsenedSumsIncrements) {
    const TimeGrid g(1e-3, 41, 1.0);
    const auto p = WienerPath::sample(g, {1.0, 0.5}, unit_embedding(2, 2), 3);
    const auto c = p.coarsened(4);
    EXPECT_EQ(c.grid().n_steps(), 11u);
    EXPECT_DOUBLE_EQ(c.grid().dt(), 4e-3);
    EXPECT_NEAR(c.values()(10, 1), p.values()(40, 1), 1e-15);
    EXPECT_THROW(p.coarsened(3), ParameterError);
}

TEST(ItoIntegral, ZeroIntegrandAndZeroLambdas) {
    const TimeGrid g(1e-2, 30, 1.0);
    const auto p = WienerPath::sample(g, {1.0, 1.0}, unit_embedding(2, 2), 5);
    EXPECT_EQ(max_abs(ito_integral(constant_family(g, 2, 2, 0.0), p).values()), 0.0);
    const auto q = WienerPath::sample(g, {0.0, 0.0}, unit_embedding(2, 2), 5);
    EXPECT_EQ(max_abs(ito_integral(constant_family(g, 2, 2, 3.0), q).values()), 0.0);
}

TEST(ItoIntegral, ConstantIntegrandGivesPathValues) {
    const TimeGrid g(1e-2, 40, 1.0);
    const auto p = WienerPath::sample(g, {1.0}, unit_embedding(1, 1), 9);
    const Trajectory out = ito_integral(constant_family(g, 1, 1, 1.0), p);
    const RealRowMatrix w = p.values();
    EXPECT_EQ(out.values()(0, 0), Complex(0.0));
    for (Eigen::Index n = 0; n < w.rows(); ++n) {
        EXPECT_NEAR(out.values()(n, 0).real(), w(n, 0), 1e-14);
    }
}

TEST(ItoIntegral, GridMismatchThrows) {
    const TimeGrid g(1e-2, 40, 1.0);
    const auto p = WienerPath::sample(g, {1.0}, unit_embedding(1, 1), 9);
    EXPECT_THROW(ito_integral(constant_family(TimeGrid(1e-2, 39, 1.0), 1, 1, 1.0), p), ShapeError);
}

TEST(ItoIntegral, AdaptedUnderFutureIncrementChanges) {
    const TimeGrid g(1e-2, 60, 1.0);
    std::mt19937_64 rng(99);
    for (int c = 0; c < 25; ++c) {
        const auto p = WienerPath::sample(g, {1.0, 0.5, 0.2}, unit_embedding(3, 2), c);
        const std::size_t cut = 1 + rng() % 57;
        RealRowMatrix inc = p.increments();
        inc.bottomRows(inc.rows() - static_cast<Eigen::Index>(cut) - 1).setConstant(0.37);
        const auto q = p.with_increments(inc);
        std::vector<Trajectory> z;
        for (int k = 0; k < 3; ++k) {
            z.push_back(test::random_trajectory(g, 2, 100 + c * 3 + k));
        }
        const auto rows = static_cast<Eigen::Index>(cut + 1);
        EXPECT_TRUE(ito_integral(z, p).values().topRows(rows) == ito_integral(z, q).values().topRows(rows));
    }
}

TEST(ItoIntegral, LinearInIntegrand) {
    const TimeGrid g(1e-2, 40, 1.0);
    const auto p = WienerPath::sample(g, {1.0, 0.25}, unit_embedding(2, 2), 2);
    std::vector<Trajectory> a;
    std::vector<Trajectory> b;
    std::vector<Trajectory> ab;
    const Complex s{0.5, 2.0};
    for (int k = 0; k < 2; ++k) {
        a.push_back(test::random_trajectory(g, 2, 10 + k));
        b.push_back(test::random_trajectory(g, 2, 20 + k));
        ab.push_back(a.back() + s * b.back());
    }
    const Trajectory lhs = ito_integral(ab, p);
    const Trajectory rhs = ito_integral(a, p) + s * ito_integral(b, p);
    EXPECT_LE(max_abs((lhs - rhs).values()), 1e-12);
}

TEST(ItoIntegral, LipschitzGainShrinksWithNu) {
    // Deterministic integrand pair; the gain is the ratio of the weighted norms.
    const double dt = 1e-3;
    std::vector<double> gains;
    for (double nu : {2.0, 4.0, 8.0}) {
        const TimeGrid g(dt, 3001, nu);
        double sum_num = 0.0;
        double sum_den = 0.0;
        for (int path = 0; path < 200; ++path) {
            const auto p = WienerPath::sample(g, {1.0}, unit_embedding(1, 1), 1000 + path);
            std::vector<Trajectory> z{test::random_trajectory(g, 1, 5, 0, false)};
            sum_num += std::pow(weighted_norm(ito_integral(z, p)), 2);
            sum_den += std::pow(weighted_norm(z[0]), 2);
        }
        gains.push_back(std::sqrt(sum_num / sum_den));
        EXPECT_LE(gains.back(), std::sqrt(1.0 / (2.0 * nu)) * 1.1);
    }
    EXPECT_NEAR(gains[0] / gains[1], std::sqrt(2.0), 0.15);
    EXPECT_NEAR(gains[1] / gains[2], std::sqrt(2.0), 0.15);
}

TEST(ItoIsometry, StepFunctionClosedForm) {
    const double nu = 2.0;
    const TimeGrid g(1e-2, 201, nu);
    const IntegrandGenerator zgen = [&](const WienerPath&, std::uint64_t) {
        Trajectory z(g, 1);
        for (std::size_t n = 1; n <= 100; ++n) {
            z.values()(static_cast<Eigen::Index>(n), 0) = 1.0;
        }
        return std::vector<Trajectory>{z};
    };
    const IsometryReport r = verify_ito_isometry(zgen, g, {1.0}, 1, 20000, 17);
    const double lhs_exact = 0.058859439091116794;
    const double rhs_exact = 0.06013634760293051;
    EXPECT_NEAR(r.rhs_mean, rhs_exact, 1e-12 * rhs_exact);
    EXPECT_NEAR(r.lhs_mean, lhs_exact, 4.0 * r.standard_error * rhs_exact);
    EXPECT_NEAR(lhs_exact / rhs_exact, 0.978766443877754, 1e-12);
}

TEST(ItoIsometry, ZeroIntegrand) {
    const TimeGrid g(1e-2, 21, 2.0);
    const IntegrandGenerator zgen = [&](const WienerPath&, std::uint64_t) {
        return std::vector<Trajectory>{Trajectory(g, 2)};
    };
    const IsometryReport r = verify_ito_isometry(zgen, g, {1.0}, 2, 50, 1);
    EXPECT_EQ(r.lhs_mean, 0.0);
    EXPECT_EQ(r.rhs_mean, 0.0);
}

TEST(ItoIsometry, ThreadCountDoesNotChangeReport) {
    const TimeGrid g(1e-2, 51, 2.0);
    const IntegrandGenerator zgen = [&](const WienerPath& p, std::uint64_t) {
        const RealRowMatrix w = p.values();
        Trajectory z(g, 1);
        for (Eigen::Index n = 0; n < w.rows(); ++n) {
            z.values()(n, 0) = std::sin(w(n, 0)) + 1.0;
        }
        return std::vector<Trajectory>{z};
    };
    const auto a = verify_ito_isometry(zgen, g, {1.0}, 1, 300, 4, 1);
    const auto b = verify_ito_isometry(zgen, g, {1.0}, 1, 300, 4, 3);
    EXPECT_EQ(a.lhs_mean, b.lhs_mean);
    EXPECT_EQ(a.rhs_mean, b.rhs_mean);
    EXPECT_EQ(a.standard_error, b.standard_error);
}

TEST(SigmaSpec, DeclaredLipschitzIsChecked) {
    const std::vector<double> lambdas{1.0, 0.25};
    const RealRowMatrix e = unit_embedding(2, 2);
    const SigmaSpec s = SigmaSpec::affine(1.0, 2.0, 1.0);
    EXPECT_DOUBLE_EQ(s.lipschitz_bound(lambdas, e), 2.0);
    EXPECT_THROW(s.check_declared(lambdas, e), ParameterError);
    EXPECT_NO_THROW(SigmaSpec::affine(1.0, 2.0, 2.0).check_declared(lambdas, e));
    EXPECT_DOUBLE_EQ(SigmaSpec::pointwise(SigmaSpec::Function::Sin, 3.0, 3.0).lipschitz_bound(lambdas, e), 3.0);
}

TEST(SigmaSpec, CatalogFunctions) {
    CVector x(3);
    x << Complex{0.5, -2.0}, Complex{-3.0, 0.1}, Complex{0.0, 0.0};
    const CVector clipped = SigmaSpec::pointwise(SigmaSpec::Function::ClippedLinear, 1.0, 1.0).shape(x);
    EXPECT_EQ(clipped[0], Complex(0.5, -1.0));
    EXPECT_EQ(clipped[1], Complex(-1.0, 0.1));
    const CVector s = SigmaSpec::pointwise(SigmaSpec::Function::Sin, 2.0, 2.0).shape(x);
    EXPECT_NEAR(s[0].real(), 2.0 * std::sin(0.5), 1e-15);
    EXPECT_NEAR(s[0].imag(), 2.0 * std::sin(-2.0), 1e-15);
    EXPECT_EQ(SigmaSpec::affine(1.0, 0.5, 0.5).shape(x)[1], Complex(-0.5, 0.05));
    EXPECT_THROW(SigmaSpec::parse_function("tanh"), ParameterError);
}

TEST(Additive, CatalogPathsAreSeeded) {
    const TimeGrid g(1e-2, 64, 1.0);
    const RealRowMatrix e = unit_embedding(2, 3);
    for (AdditiveKind k : {AdditiveKind::Wiener, AdditiveKind::CompoundPoisson, AdditiveKind::FractionalBrownian}) {
        const Trajectory a = sample_additive(k, g, {1.0, 0.5}, e, 3);
        const Trajectory b = sample_additive(k, g, {1.0, 0.5}, e, 3);
        EXPECT_TRUE(a.identical(b)) << to_string(k);
        EXPECT_EQ(a.dof(), 3u);
        EXPECT_EQ(max_abs(a.values().row(0)), 0.0) << to_string(k);
    }
}

TEST(Additive, FractionalBrownianVarianceScaling) {
    const double hurst = 0.7;
    const TimeGrid g(1.0 / 64.0, 65, 1.0);
    AdditiveParams params;
    params.hurst = hurst;
    double acc = 0.0;
    const int n_paths = 2000;
    for (int p = 0; p < n_paths; ++p) {
        const Trajectory x = sample_additive(AdditiveKind::FractionalBrownian, g, {1.0}, unit_embedding(1, 1),
                                             static_cast<std::uint64_t>(p), params);
        acc += std::norm(x.values()(64, 0));
    }
    EXPECT_NEAR(acc / n_paths, 1.0, 0.1);
}

} // namespace
} // namespace evo
