#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "support.hpp"

namespace evo {
namespace {

CMatrix dense(const SpMat& m) { return CMatrix(m); }

TEST(SpaceDescriptor, MeshWidth) {
    const SpaceDescriptor s = SpaceDescriptor::box(2, {2.0, 1.0, 1.0}, {8, 4, 1});
    EXPECT_DOUBLE_EQ(s.h(0), 0.25);
    EXPECT_DOUBLE_EQ(s.h(1), 0.25);
    EXPECT_THROW(SpaceDescriptor::unit(1, 0), ParameterError);
    EXPECT_THROW(SpaceDescriptor::unit(4, 3), ParameterError);
}

TEST(GradDiv, OneDimensionalDirichletIsExactlySkew) {
    const BlockOperator op = build_grad_div(SpaceDescriptor::unit(1, 4), true);
    const CMatrix b = dense(op.matrix);
    EXPECT_EQ((b.adjoint() + b).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(op.space.dof(), op.space.block("u").size + op.space.block("q").size);
    EXPECT_EQ(op.bc_tag, "grad");
}

TEST(GradDiv, DivIsMinusGradTranspose) {
    for (int dim = 1; dim <= 3; ++dim) {
        for (bool dirichlet : {true, false}) {
            const BlockOperator op = build_grad_div(SpaceDescriptor::unit(dim, 5), dirichlet);
            const CMatrix g = dense(op.part("grad"));
            const CMatrix d = dense(op.part("div"));
            EXPECT_EQ((d + g.adjoint()).cwiseAbs().maxCoeff(), 0.0);
            EXPECT_EQ(op.skew_residual(), 0.0);
        }
    }
}

TEST(GradDiv, SmallestDirichletEigenvalueNearPiSquared) {
    const BlockOperator op = build_grad_div(SpaceDescriptor::unit(1, 64), true);
    const CMatrix g = dense(op.part("grad"));
    const Eigen::MatrixXd lap = (g.adjoint() * g).real();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(lap);
    const double lam = es.eigenvalues().minCoeff();
    EXPECT_NEAR(lam, 9.86762276722776, 1e-9);
    EXPECT_NEAR(lam, std::numbers::pi * std::numbers::pi, 0.02 * std::numbers::pi * std::numbers::pi);
    const auto closed = dirichlet_laplacian_eigenvalues(64);
    EXPECT_NEAR(closed.front(), lam, 1e-9);
}

TEST(GradDiv, EigenvalueConvergesAtSecondOrder) {
    const double pi2 = std::numbers::pi * std::numbers::pi;
    double prev = std::abs(dirichlet_laplacian_eigenvalues(8).front() - pi2);
    for (std::size_t n : {16, 32, 64}) {
        const double err = std::abs(dirichlet_laplacian_eigenvalues(n).front() - pi2);
        EXPECT_NEAR(prev / err, 4.0, 0.1);
        prev = err;
    }
}

TEST(GradDiv, GradientOfConstant) {
    const BlockOperator neumann = build_grad_div(SpaceDescriptor::unit(1, 6), false);
    const CVector ones = CVector::Ones(static_cast<Eigen::Index>(neumann.space.block("u").size));
    EXPECT_EQ((neumann.part("grad") * ones).cwiseAbs().maxCoeff(), 0.0);

    const BlockOperator dirichlet = build_grad_div(SpaceDescriptor::unit(1, 6), true);
    const CVector g = dirichlet.part("grad") * CVector::Ones(static_cast<Eigen::Index>(dirichlet.space.block("u").size));
    const double h = dirichlet.space.h(0);
    // Only the two boundary edges see the homogeneous Dirichlet data.
    for (Eigen::Index e = 0; e < g.size(); ++e) {
        const double expect = e == 0 ? 1.0 / h : (e == g.size() - 1 ? -1.0 / h : 0.0);
        EXPECT_NEAR(g[e].real(), expect, 1e-12);
    }
}

TEST(CurlPair, SkewAndExactComplex) {
    const SpaceDescriptor cube = SpaceDescriptor::unit(3, 8);
    const BlockOperator op = build_curl_pair(cube);
    EXPECT_EQ(op.skew_residual(), 0.0);
    const CVector phi = test::random_vector(static_cast<std::size_t>(build_node_gradient(cube).cols()), 3);
    const CVector e = build_node_gradient(cube) * phi;
    EXPECT_LE((op.part("icurl") * e).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_THROW(build_curl_pair(SpaceDescriptor::unit(2, 4)), ParameterError);
}

TEST(CurlPair, CurlOfConstantFieldVanishes) {
    const SpaceDescriptor cube = SpaceDescriptor::unit(3, 4);
    const BlockOperator op = build_curl_pair(cube);
    const FieldBlock& h = op.space.block("H");
    const CVector ones = CVector::Ones(static_cast<Eigen::Index>(h.size));
    const CVector curl_h = op.part("curl") * ones;
    // Periodic-free constant H: only boundary-adjacent E edges pick up a value.
    const FieldBlock& eb = op.space.block("E");
    std::size_t interior_nonzero = 0;
    for (std::size_t i = 0; i < eb.size; ++i) {
        const Point p = op.space.positions()[eb.offset + i];
        bool interior = true;
        for (int a = 0; a < 3; ++a) {
            interior = interior && p[static_cast<std::size_t>(a)] > 0.3 && p[static_cast<std::size_t>(a)] < 0.7;
        }
        if (interior && std::abs(curl_h[static_cast<Eigen::Index>(i)]) > 1e-12) {
            ++interior_nonzero;
        }
    }
    EXPECT_EQ(interior_nonzero, 0u);
}

TEST(LaplacianBlock, WeightedSkewForRandomPairs) {
    const BlockOperator op = build_laplacian_block(SpaceDescriptor::unit(2, 6));
    ASSERT_TRUE(op.weight.has_value());
    const auto n = static_cast<std::size_t>(op.matrix.rows());
    const CVector x = test::random_vector(n, 1);
    const CVector y = test::random_vector(n, 2);
    const SpMat& w = *op.weight;
    const Complex lhs = (w * (op.matrix * x)).dot(y);
    const Complex rhs = (w * x).dot(op.matrix * y);
    EXPECT_LE(std::abs(lhs + rhs), 1e-10 * (1.0 + std::abs(lhs)));
    EXPECT_EQ((op.matrix * CVector::Zero(static_cast<Eigen::Index>(n))).cwiseAbs().maxCoeff(), 0.0);
}

TEST(VariableCoefficient, IdentityReducesToHeatLaw) {
    const BlockOperator op = build_grad_div(SpaceDescriptor::unit(2, 4), true);
    CellCoefficients cells{2, std::vector<std::vector<double>>(16, {1.0, 0.0, 0.0, 1.0})};
    EXPECT_TRUE(identical(apply_variable_coefficient(cells, op), heat_law(op.space)));
}

TEST(VariableCoefficient, ScalarTwoCoercivity) {
    const BlockOperator op = build_grad_div(SpaceDescriptor::unit(1, 8), true);
    CellCoefficients cells{1, std::vector<std::vector<double>>(8, {2.0})};
    const MaterialLaw law = apply_variable_coefficient(cells, op);
    const double r = 1.0;
    // c / |a|^2 with c = |a| = 2.
    const double bound = std::min(1.0, 2.0 / 4.0 / (2.0 * r));
    EXPECT_GE(verify_coercivity(law, r, 800, 4, 5).lower(), bound - 1e-9);
}

TEST(VariableCoefficient, SineProfileIsCoercive) {
    const Model m = build(test::spec_of(ModelName::HeatVarcoef, 16));
    EXPECT_GT(verify_coercivity(m.law, 1.0, 500, 4, 6).c_est, 0.0);
}

TEST(VariableCoefficient, RejectsNonSpdCell) {
    const BlockOperator op = build_grad_div(SpaceDescriptor::unit(1, 4), true);
    CellCoefficients cells{1, {{1.0}, {1.0}, {-1.0}, {1.0}}};
    try {
        apply_variable_coefficient(cells, op);
        FAIL() << "expected ParameterError";
    } catch (const ParameterError& e) {
        EXPECT_NE(std::string(e.what()).find("cell 2"), std::string::npos) << e.what();
    }
}

} // namespace
} // namespace evo
