#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "evo/reference.hpp"
#include "support.hpp"

namespace evo {
namespace {

using test::max_abs;
using test::random_trajectory;
using test::set_affine_sigma;
using test::spec_of;

Model single_region(RegionType type, std::size_t n = 16) {
    ModelSpec s = spec_of(ModelName::Mixed, n);
    s.regions = {Region{type, 0.0, s.extent}};
    return build(s);
}

Trajectory block_of(const Model& m, const Trajectory& u, const std::string& name) {
    const FieldBlock& b = m.block(name);
    return u.columns(b.offset, b.size);
}

// Path whose only mode carries the normalized sine vector j of the basis.
WienerPath single_mode_path(const SineBasis& basis, const TimeGrid& g, std::size_t j, std::uint64_t seed) {
    RealRowMatrix e(1, static_cast<Eigen::Index>(basis.size()));
    e.row(0) = basis.phi.col(static_cast<Eigen::Index>(j - 1)).transpose();
    return WienerPath::sample(g, {1.0}, e, seed);
}

TEST(Catalog, ParseNames) {
    EXPECT_EQ(parse_model_name("wave_v2"), ModelName::WaveV2);
    EXPECT_EQ(to_string(ModelName::HeatVarcoef), "heat_varcoef");
    EXPECT_THROW(parse_model_name("burgers"), ParameterError);
    EXPECT_THROW(parse_region_type("hyperbolicish"), ParameterError);
}

TEST(Catalog, EveryModelBuildsWithSharedLayout) {
    for (ModelName name : {ModelName::Heat, ModelName::HeatVarcoef, ModelName::WaveV1, ModelName::WaveV2,
                           ModelName::Schroedinger, ModelName::Maxwell, ModelName::Fractional, ModelName::Mixed}) {
        const Model m = build(spec_of(name, name == ModelName::Maxwell ? 4 : 10));
        EXPECT_EQ(m.law.dof(), static_cast<std::size_t>(m.op.matrix.rows())) << to_string(name);
        EXPECT_EQ(static_cast<std::size_t>(m.embedding.cols()), m.dof());
        EXPECT_EQ(static_cast<std::size_t>(m.embedding.rows()), m.spec.n_modes);
    }
}

TEST(Catalog, InvalidParametersAreRejected) {
    ModelSpec frac = spec_of(ModelName::Fractional);
    frac.alpha = 1.5;
    EXPECT_THROW(build(frac), ParameterError);
    ModelSpec maxwell = spec_of(ModelName::Maxwell, 4);
    maxwell.epsilon = -1.0;
    EXPECT_THROW(build(maxwell), ParameterError);
    ModelSpec flat = spec_of(ModelName::Maxwell, 4);
    flat.dimension = 2;
    EXPECT_THROW(build(flat), ParameterError);
    ModelSpec gap = spec_of(ModelName::Mixed);
    gap.regions = {Region{RegionType::Parabolic, 0.0, 0.4}};
    EXPECT_THROW(build(gap), ParameterError);
}

TEST(Mixed, HyperbolicOnlyLawIsWaveLaw) {
    EXPECT_TRUE(identical(single_region(RegionType::Hyperbolic).law, build(spec_of(ModelName::WaveV1)).law));
}

TEST(Mixed, ParabolicOnlyLawIsHeatLaw) {
    EXPECT_TRUE(identical(single_region(RegionType::Parabolic).law, build(spec_of(ModelName::Heat)).law));
}

TEST(Mixed, ParabolicOnlySolutionIsHeatWithQNegated) {
    Model heat = build(spec_of(ModelName::Heat));
    Model mixed = single_region(RegionType::Parabolic);
    set_affine_sigma(heat, 1.0, 0.5);
    set_affine_sigma(mixed, 1.0, 0.5);
    const TimeGrid g(1e-2, 60, 2.0);
    const WienerPath path = heat.sample_path(g, 4);
    Trajectory f(g, heat.dof());
    const FieldBlock& ub = heat.block("u");
    f.values().middleCols(static_cast<Eigen::Index>(ub.offset), static_cast<Eigen::Index>(ub.size)) =
        random_trajectory(g, ub.size, 3).values();
    const SolveOptions opts{2.0, 1e-10, 100, std::nullopt};
    const Solution a = solve_multiplicative(heat.problem(f, path), opts);
    const Solution b = solve_multiplicative(mixed.problem(f, path), opts);
    EXPECT_TRUE(block_of(heat, a.u, "u").values() == block_of(heat, b.u, "u").values());
    EXPECT_TRUE(block_of(heat, a.u, "q").values() == -block_of(heat, b.u, "q").values());
}

TEST(Heat, CoercivityAtRadiusOne) {
    EXPECT_GE(verify_coercivity(build(spec_of(ModelName::Heat)).law, 1.0, 1000, 8, 1).c_est, 0.5);
}

TEST(Heat, SubstitutionIdentity) {
    Model m = build(spec_of(ModelName::Heat));
    set_affine_sigma(m, 1.0, 0.5);
    const TimeGrid g(1e-2, 80, 2.0);
    const FieldBlock& ub = m.block("u");
    const auto off = static_cast<Eigen::Index>(ub.offset);
    const auto len = static_cast<Eigen::Index>(ub.size);
    Trajectory f(g, m.dof());
    f.values().middleCols(off, len) = random_trajectory(g, ub.size, 5).values();
    const Solution s = solve_multiplicative(m.problem(f, m.sample_path(g, 5)), SolveOptions{2.0, 1e-12, 100, std::nullopt});
    // Unforced q-row: d0 q + A_qu u = 0, so q = -A_qu d0_inv(u).
    Trajectory lifted(g, m.dof());
    lifted.values().middleCols(off, len) = d0_inv(block_of(m, s.u, "u")).values();
    Trajectory pred(g, m.dof());
    pred.values() = -(lifted.values() * CMatrix(m.op.matrix).transpose());
    const Trajectory q = block_of(m, s.u, "q");
    const Trajectory qp = block_of(m, pred, "q");
    EXPECT_LE(max_abs((q - qp).values()), 1e-10 * (1.0 + max_abs(q.values())));
}

TEST(Wave, FormulationsAgreeOnUComponent) {
    const TimeGrid coarse(2e-3, 501, 2.0);
    std::vector<double> errs;
    for (std::size_t factor : {1, 2}) {
        const TimeGrid g(coarse.dt() / static_cast<double>(factor), (coarse.n_steps() - 1) * factor + 1, 2.0);
        const Model v1 = build(spec_of(ModelName::WaveV1));
        const Model v2 = build(spec_of(ModelName::WaveV2));
        const CVector e = dirichlet_mode(v1, 1);
        Trajectory f1(g, v1.dof());
        Trajectory f2(g, v2.dof());
        for (std::size_t n = 0; n < g.n_steps(); ++n) {
            const double amp = std::sin(4.0 * g.time(n));
            f1.step(n).segment(static_cast<Eigen::Index>(v1.block("u").offset), e.size()) = amp * e.transpose();
            f2.step(n).segment(static_cast<Eigen::Index>(v2.block("u").offset), e.size()) = amp * e.transpose();
        }
        const Trajectory u1 = block_of(v1, solve_deterministic(v1.law, v1.op, f1, 2.0), "u");
        const Trajectory u2 = block_of(v2, solve_deterministic(v2.law, v2.op, f2, 2.0), "u");
        errs.push_back(weighted_norm(u1 - u2) / weighted_norm(u1));
    }
    // Backward Euler treats both first-order forms identically on the u block.
    EXPECT_LE(errs[0], 1e-12);
    EXPECT_LE(errs[1], 1e-12);
}

TEST(Maxwell, EnergyAfterForcingSwitchesOff) {
    ModelSpec spec = spec_of(ModelName::Maxwell, 4);
    spec.epsilon = 2.0;
    spec.mu = 0.5;
    const Model m = build(spec);
    const double dt = 1e-3;
    const TimeGrid g(dt, 601, 2.0);
    const Trajectory src = random_trajectory(g, m.dof(), 2);
    Trajectory f(g, m.dof());
    f.values().topRows(100) = src.values().topRows(100);
    const Trajectory u = solve_deterministic(m.law, m.op, f, 2.0);
    const FieldBlock& eb = m.block("E");
    const FieldBlock& hb = m.block("H");
    const auto energy = [&](std::size_t n) {
        const CVector x = u.at(n);
        return spec.epsilon * x.segment(static_cast<Eigen::Index>(eb.offset), static_cast<Eigen::Index>(eb.size)).squaredNorm() +
               spec.mu * x.segment(static_cast<Eigen::Index>(hb.offset), static_cast<Eigen::Index>(hb.size)).squaredNorm();
    };
    const double h = m.op.space.h(0);
    const double omega_max2 = 12.0 / (h * h) / std::min(spec.epsilon * spec.mu, 1.0);
    for (std::size_t n = 101; n < g.n_steps(); ++n) {
        const double e0 = energy(n - 1);
        const double e1 = energy(n);
        EXPECT_LE(e1, e0 * (1.0 + 1e-12));
        EXPECT_GE(e1, e0 * (1.0 - omega_max2 * dt * dt));
    }
}

TEST(Fractional, AlphaOneMatchesSecondOrderEigenmode) {
    ModelSpec spec = spec_of(ModelName::Fractional, 16);
    spec.alpha = 1.0;
    const Model m = build(spec);
    const FieldBlock& ub = m.block("u");
    const double h = m.op.space.h(0);
    const std::size_t j = 1;
    CVector e(static_cast<Eigen::Index>(ub.size));
    for (std::size_t i = 0; i < ub.size; ++i) {
        e(static_cast<Eigen::Index>(i)) = std::cos(std::numbers::pi * static_cast<double>(j) *
                                                   m.op.space.positions()[ub.offset + i][0]);
    }
    const double s = std::sin(std::numbers::pi * static_cast<double>(j) * h / 2.0);
    const double mu = 4.0 / (h * h) * s * s;
    std::vector<double> errs;
    for (double dt : {2e-3, 1e-3}) {
        const TimeGrid g(dt, static_cast<std::size_t>(std::lround(1.0 / dt)) + 1, 2.0);
        Trajectory src(g, m.dof());
        for (std::size_t n = 0; n < g.n_steps(); ++n) {
            src.step(n).segment(static_cast<Eigen::Index>(ub.offset), static_cast<Eigen::Index>(ub.size)) = e.transpose();
        }
        // d0^2 u - Delta u = source on the mode: u = (1 - cos(sqrt(mu) t)) / mu.
        const Trajectory u = block_of(m, solve_deterministic(m.law, m.op, d0_inv(src), 2.0), "u");
        double err = 0.0;
        for (std::size_t n = 0; n < g.n_steps(); ++n) {
            const double ref = (1.0 - std::cos(std::sqrt(mu) * g.time(n))) / mu;
            err = std::max(err, (u.at(n) - ref * e).cwiseAbs().maxCoeff());
        }
        errs.push_back(err);
    }
    EXPECT_LE(errs[0], 0.02);
    EXPECT_NEAR(errs[0] / errs[1], 2.0, 0.3);
}

TEST(MildWave, ZeroSigmaGivesZero) {
    const SineBasis b = SineBasis::dirichlet(8);
    const TimeGrid g(1e-2, 20, 2.0);
    RealRowMatrix e = RealRowMatrix::Identity(7, 7);
    const MildWaveResult r = mild_wave_reference(b, SigmaSpec::zero(), WienerPath::sample(g, std::vector<double>(7, 1.0), e, 1));
    EXPECT_EQ(max_abs(r.u.values()), 0.0);
    EXPECT_EQ(max_abs(r.v.values()), 0.0);
}

TEST(MildWave, SingleModeDirectSummation) {
    const SineBasis b = SineBasis::dirichlet(16);
    const TimeGrid g(1e-2, 200, 2.0);
    const std::size_t j = 3;
    const WienerPath path = single_mode_path(b, g, j, 12);
    const MildWaveResult r = mild_wave_reference(b, SigmaSpec::affine(1.0, 0.0, 0.0), path);
    const double omega = std::sqrt(b.mu(static_cast<Eigen::Index>(j - 1)));
    const Eigen::VectorXd phi = b.phi.col(static_cast<Eigen::Index>(j - 1));
    double err = 0.0;
    for (std::size_t n = 0; n < g.n_steps(); ++n) {
        double acc = 0.0;
        for (std::size_t k = 1; k <= n; ++k) {
            acc += std::sin(omega * (g.time(n) - g.time(k - 1))) / omega *
                   path.increments()(static_cast<Eigen::Index>(k), 0);
        }
        err = std::max(err, (r.u.at(n) - (acc * phi).cast<Complex>()).cwiseAbs().maxCoeff());
    }
    EXPECT_LE(err, 1e-12);
}

TEST(MildWave, WEqualsMinusLaplacianOfIntegratedU) {
    const SineBasis b = SineBasis::dirichlet(16);
    std::vector<double> errs;
    for (double dt : {2e-3, 1e-3}) {
        const TimeGrid g(dt, static_cast<std::size_t>(std::lround(1.0 / dt)) + 1, 2.0);
        const WienerPath path = single_mode_path(b, g, 2, 3).coarsened(1);
        const SigmaSpec sigma = SigmaSpec::affine(1.0, 0.0, 0.0);
        const MildWaveResult r = mild_wave_reference(b, sigma, path);
        const Trajectory integral = stochastic_integral(sigma, Trajectory(g, b.size()), path);
        const Trajectory w = integral - r.v;
        const Eigen::MatrixXcd lap = (b.phi * b.mu.asDiagonal() * b.phi.transpose()).cast<Complex>();
        Trajectory pred = d0_inv(r.u);
        pred.values() = pred.values() * lap.transpose();
        errs.push_back(weighted_norm(w - pred) / weighted_norm(w));
    }
    EXPECT_LE(errs[0], 0.05);
    EXPECT_LE(errs[1], errs[0] * 0.7);
}

TEST(VariationalHeat, ZeroDataGivesZero) {
    const SineBasis b = SineBasis::dirichlet(8);
    const TimeGrid g(1e-2, 20, 2.0);
    const WienerPath path = WienerPath::sample(g, std::vector<double>(7, 1.0), RealRowMatrix::Identity(7, 7), 2);
    EXPECT_EQ(max_abs(variational_heat_reference(b, SigmaSpec::zero(), path).values()), 0.0);
}

TEST(VariationalHeat, EigenmodeForcing) {
    const SineBasis b = SineBasis::dirichlet(16);
    const double dt = 1e-3;
    const TimeGrid g(dt, 1001, 2.0);
    const std::size_t j = 2;
    const WienerPath path = single_mode_path(b, g, j, 1);
    const Eigen::VectorXd phi = b.phi.col(static_cast<Eigen::Index>(j - 1));
    Trajectory src(g, b.size());
    for (std::size_t n = 0; n < g.n_steps(); ++n) {
        src.step(n) = phi.cast<Complex>().transpose();
    }
    const double mu = b.mu(static_cast<Eigen::Index>(j - 1));
    for (HeatScheme scheme : {HeatScheme::Exponential, HeatScheme::Implicit}) {
        const Trajectory u = variational_heat_reference(b, SigmaSpec::zero(), path, &src, scheme);
        double err = 0.0;
        for (std::size_t n = 0; n < g.n_steps(); ++n) {
            const double ref = (1.0 - std::exp(-mu * g.time(n))) / mu;
            err = std::max(err, (u.at(n) - (ref * phi).cast<Complex>()).cwiseAbs().maxCoeff());
        }
        EXPECT_LE(err, 2.0 * dt);
    }
}

TEST(VariationalHeat, EmbeddingSizeIsChecked) {
    const SineBasis b = SineBasis::dirichlet(8);
    const TimeGrid g(1e-2, 20, 2.0);
    const WienerPath path = WienerPath::sample(g, {1.0}, RealRowMatrix::Ones(1, 5), 2);
    EXPECT_THROW(variational_heat_reference(b, SigmaSpec::affine(1.0, 0.0, 0.0), path), ShapeError);
}

TEST(CrossValidation, SmallWaveAndHeatStudies) {
    CrossValidationSettings s;
    s.refinements = 1;
    s.n_paths = 1;
    s.final_time = 0.5;
    const CrossValidationReport w = crossval_wave(s);
    ASSERT_EQ(w.rel_errors.size(), 2u);
    EXPECT_LE(w.rel_errors.back(), 0.1);
    EXPECT_GE(w.ratios.front(), 1.3);
    const CrossValidationReport h = crossval_heat(s);
    EXPECT_LE(h.rel_errors.back(), 0.1);
    EXPECT_GE(h.ratios.front(), 1.3);
    ASSERT_TRUE(h.implicit_gap.has_value());
    EXPECT_LE(*h.implicit_gap, 1e-8);
}

TEST(CrossValidation, ThreadCountDoesNotChangeResult) {
    CrossValidationSettings s;
    s.refinements = 1;
    s.n_paths = 3;
    s.final_time = 0.2;
    const CrossValidationReport a = crossval_heat(s);
    s.threads = 3;
    const CrossValidationReport b = crossval_heat(s);
    EXPECT_EQ(a.rel_errors, b.rel_errors);
}

} // namespace
} // namespace evo
