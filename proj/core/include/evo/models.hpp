#pragma once

// Catalog of first-order evolutionary systems: heat (constant and variable
// coefficient), two wave formulations, Schrödinger, Maxwell, a fractional
// super-diffusion and a mixed-type equation.

#include <optional>
#include <string>
#include <vector>

#include "evo/solver.hpp"

namespace evo {

enum class ModelName { Heat, HeatVarcoef, WaveV1, WaveV2, Schroedinger, Maxwell, Fractional, Mixed };

ModelName parse_model_name(const std::string& name);
std::string to_string(ModelName name);

/// Region types of the mixed-type equation.
enum class RegionType { Hyperbolic, Parabolic, Elliptic };

RegionType parse_region_type(const std::string& name);

/// Dof whose axis-0 coordinate lies in [lo, hi) get the region type.
struct Region {
    RegionType type = RegionType::Parabolic;
    double lo = 0.0;
    double hi = 1.0;
};

struct ModelSpec {
    ModelName name = ModelName::Heat;
    int dimension = 1;
    std::size_t n_cells = 16;
    double extent = 1.0;

    /// fractional: exponent of the time derivative on u, in (0, 1].
    double alpha = 0.5;
    /// maxwell: scalar permittivity, permeability and conductivity.
    double epsilon = 1.0;
    double mu = 1.0;
    double zeta = 0.0;
    /// heat_varcoef: a(x) = (base + amplitude sin(2 pi x_0 / extent)) * identity.
    double coefficient_base = 1.0;
    double coefficient_amplitude = 0.5;
    /// mixed: regions covering [0, extent); defaults to hyperbolic, parabolic,
    /// elliptic thirds.
    std::vector<Region> regions;
    /// schroedinger: linear potential b(u) = i * potential * u.
    double potential = 0.0;

    std::size_t n_modes = 4;
    EigenSequence eigen_sequence = EigenSequence::InverseSquare;
    SigmaSpec sigma = SigmaSpec::zero();
};

/// A built model: spatial operator with the sign of the displayed system, the
/// material law and the noise embedding on the first field block.
struct Model {
    ModelSpec spec;
    BlockOperator op;
    MaterialLaw law;
    std::string noise_block;
    std::vector<double> lambdas;
    /// K x dof; mode k has profile sqrt(2) sin(k pi x_0 / extent) (cosine for
    /// Neumann layouts) on the noise block and vanishes elsewhere.
    RealRowMatrix embedding;
    Perturbation perturbation = Perturbation::none();

    std::size_t dof() const noexcept { return law.dof(); }
    const FieldBlock& block(const std::string& name) const { return op.space.block(name); }

    WienerPath sample_path(const TimeGrid& grid, std::uint64_t seed, std::uint64_t stream = 0) const;
    Trajectory zero_forcing(const TimeGrid& grid) const { return Trajectory(grid, dof()); }

    /// EvoProblem with this model's law, operator, sigma and perturbation.
    EvoProblem problem(const Trajectory& forcing, std::optional<WienerPath> path = std::nullopt) const;
};

Model build(const ModelSpec& spec);

/// Heat law diag(z, 1) on the (u, q) layout of a grad/div operator.
MaterialLaw heat_law(const SpaceDescriptor& layout);

/// j-th discrete Dirichlet sine mode sin(j pi x) on the u nodes of a 1D model
/// (unnormalized), and its eigenvalue 4/h^2 sin^2(j pi h / 2) for -Delta.
CVector dirichlet_mode(const Model& model, std::size_t j);
double dirichlet_eigenvalue(const Model& model, std::size_t j);

/// Full state (u_init, grad (-Delta)^{-1} u_init) for the heat layout: the
/// q-part carries the initial value since M0 acts on q only.
CVector lift_heat_initial(const Model& model, const CVector& u_init);

} // namespace evo

namespace evo {

/// Refinement study of the evolutionary solver against a spectral reference
/// on one shared fine Wiener path per sample.
struct CrossValidationSettings {
    std::size_t n_cells = 17;
    std::size_t n_modes = 16;
    /// Coarsest step; each refinement halves it.
    double dt = 1e-3;
    std::size_t refinements = 3;
    double final_time = 1.0;
    std::size_t n_paths = 4;
    double nu = 2.0;
    double c0 = 1.0;
    double c1 = 0.5;
    double tol = 1e-10;
    std::uint64_t seed = 2024;
    unsigned threads = 1;
};

struct CrossValidationReport {
    std::string model;
    std::vector<double> dts;
    /// sqrt(sum_paths ||u_evo - u_ref||^2 / sum_paths ||u_ref||^2) per level.
    std::vector<double> rel_errors;
    /// rel_errors[l - 1] / rel_errors[l].
    std::vector<double> ratios;
    /// Largest relative gap to the implicit variant (heat only), which
    /// shares the time discretization.
    std::optional<double> implicit_gap;
    std::size_t n_paths = 0;
};

CrossValidationReport crossval_wave(const CrossValidationSettings& settings);
CrossValidationReport crossval_heat(const CrossValidationSettings& settings);

} // namespace evo
