#pragma once

// Truncated Q-Wiener paths, left-point Itô integrals, diffusion coefficients
// sigma and a Monte-Carlo check of the weighted Itô isometry.

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "evo/timegrid.hpp"

namespace evo {

using RealRowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Built-in eigenvalue sequences of the covariance operator Q.
enum class EigenSequence { InverseSquare, Geometric };

EigenSequence parse_eigen_sequence(const std::string& name);
std::string to_string(EigenSequence seq);

/// lambda_k for k = 1..K: k^{-2} or 2^{-k}.
std::vector<double> eigenvalues(EigenSequence seq, std::size_t n_modes);

/// sum_{k > K} lambda_k.
double tail_mass(EigenSequence seq, std::size_t n_modes);

/// Generator for (seed, stream); distinct streams give independent draws.
std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream = 0);

/// Sampled increments of W = sum_k sqrt(lambda_k) W_k e_k on a time grid.
/// increments(n, k) = W_k(t_n) - W_k(t_{n-1}) with increments(0, k) = 0.
/// The embedding (K x dof) gives the state-space profile E_k of mode k.
class WienerPath {
public:
    /// Draws rows 1..n-1 of N(0, dt) in row-major order from make_rng(seed, stream).
    static WienerPath sample(const TimeGrid& grid, std::vector<double> lambdas, RealRowMatrix embedding,
                             std::uint64_t seed, std::uint64_t stream = 0);

    /// Path with explicitly given increments (row 0 must vanish).
    static WienerPath from_increments(const TimeGrid& grid, std::vector<double> lambdas, RealRowMatrix embedding,
                                      RealRowMatrix increments);

    const TimeGrid& grid() const noexcept { return grid_; }
    std::size_t n_modes() const noexcept { return lambdas_.size(); }
    std::size_t dof() const noexcept { return static_cast<std::size_t>(embedding_.cols()); }
    const std::vector<double>& lambdas() const noexcept { return lambdas_; }
    const RealRowMatrix& increments() const noexcept { return increments_; }
    const RealRowMatrix& embedding() const noexcept { return embedding_; }

    /// xi(n, :) = sum_k sqrt(lambda_k) increments(n, k) E_k.
    const RealRowMatrix& field_increments() const noexcept { return field_; }

    /// W_k(t_n), the cumulative sums of the increments.
    RealRowMatrix values() const;

    /// Same Brownian path on the grid with step factor*dt; requires
    /// (n_steps - 1) divisible by factor.
    WienerPath coarsened(std::size_t factor) const;

    WienerPath with_increments(RealRowMatrix increments) const;
    /// Same increments mapped through a different K x dof embedding.
    WienerPath with_embedding(RealRowMatrix embedding) const;
    WienerPath with_grid(const TimeGrid& grid) const;

private:
    WienerPath(TimeGrid grid, std::vector<double> lambdas, RealRowMatrix embedding, RealRowMatrix increments);

    TimeGrid grid_;
    std::vector<double> lambdas_;
    RealRowMatrix embedding_;
    RealRowMatrix increments_;
    RealRowMatrix field_;
};

/// Left-point Itô integral of the mode family Z_k = Z e_k (one trajectory per
/// mode): out_0 = 0, out_n = out_{n-1} + sum_k sqrt(lambda_k) Z_k[n-1] dW_k[n].
Trajectory ito_integral(const std::vector<Trajectory>& z, const WienerPath& path);

/// Diffusion coefficient acting mode by mode: sigma(x) e_k = E_k * s(x)
/// pointwise, with s(x) = c0 + c1 x (affine) or gain * g(x) for a catalog
/// function g applied to real and imaginary parts separately.
class SigmaSpec {
public:
    enum class Kind { Zero, Affine, Pointwise };
    enum class Function { Identity, Sin, ClippedLinear };

    static SigmaSpec zero();
    static SigmaSpec affine(double c0, double c1, double declared_lipschitz);
    static SigmaSpec pointwise(Function g, double gain, double declared_lipschitz);

    static Function parse_function(const std::string& name);
    static std::string to_string(Function g);

    Kind kind() const noexcept { return kind_; }
    Function function() const noexcept { return function_; }
    double c0() const noexcept { return c0_; }
    double c1() const noexcept { return c1_; }
    double gain() const noexcept { return gain_; }
    double declared_lipschitz() const noexcept { return declared_; }
    bool is_zero() const noexcept { return kind_ == Kind::Zero; }

    /// True when s is affine, so sigma(x) - sigma(y) = sigma_lin(x - y).
    bool is_affine() const noexcept { return kind_ != Kind::Pointwise || function_ == Function::Identity; }

    /// s(x) applied entrywise.
    CVector shape(const CVector& x) const;
    void shape_inplace(Eigen::Ref<CVector> x) const;

    /// Lipschitz constant of s times sqrt(max_i sum_k lambda_k |E_ki|^2): the
    /// exact bound on ||sigma(x) - sigma(y)||_{L2} / ||x - y||.
    double lipschitz_bound(const std::vector<double>& lambdas, const RealRowMatrix& embedding) const;

    /// ParameterError if the declared constant is below lipschitz_bound.
    void check_declared(const std::vector<double>& lambdas, const RealRowMatrix& embedding) const;

    /// sum_k lambda_k ||sigma(x) e_k||^2.
    double l2_norm_squared(const CVector& x, const std::vector<double>& lambdas,
                           const RealRowMatrix& embedding) const;

private:
    SigmaSpec() = default;

    Kind kind_ = Kind::Zero;
    Function function_ = Function::Identity;
    double c0_ = 0.0;
    double c1_ = 0.0;
    double gain_ = 0.0;
    double declared_ = 0.0;
};

/// int_0^. sigma(u) dW on the path embedding, without forming the mode family.
Trajectory stochastic_integral(const SigmaSpec& sigma, const Trajectory& u, const WienerPath& path);

/// Additive driver paths X (dof columns), each built from K independent scalar
/// processes mixed through the embedding with weights sqrt(lambda_k).
enum class AdditiveKind { Wiener, CompoundPoisson, FractionalBrownian };

AdditiveKind parse_additive_kind(const std::string& name);
std::string to_string(AdditiveKind kind);

struct AdditiveParams {
    /// Jump intensity and jump standard deviation (CompoundPoisson).
    double jump_rate = 5.0;
    double jump_scale = 1.0;
    /// Hurst index in (0, 1) (FractionalBrownian).
    double hurst = 0.7;
};

Trajectory sample_additive(AdditiveKind kind, const TimeGrid& grid, const std::vector<double>& lambdas,
                           const RealRowMatrix& embedding, std::uint64_t seed, const AdditiveParams& params = {});

/// Monte-Carlo comparison of E ||int Z dW||^2_nu with (1/(2 nu)) E sum_k lambda_k ||Z e_k||^2_nu.
struct IsometryReport {
    double lhs_mean = 0.0;
    double rhs_mean = 0.0;
    double ratio = 0.0;
    /// Delta-method standard error of the ratio.
    double standard_error = 0.0;
    /// Ratio of the discrete to the continuous constant for a constant
    /// integrand on an unbounded horizon: 2 nu dt e^{-2 nu dt} / (1 - e^{-2 nu dt}).
    double discretization_bias = 1.0;
    std::size_t n_paths = 0;
};

/// Produces an adapted mode family (one trajectory per mode) for a path:
/// Z_k[n] may depend on path increments with row index <= n only.
using IntegrandGenerator = std::function<std::vector<Trajectory>(const WienerPath& path, std::uint64_t path_index)>;

/// Paths p = 0..n_paths-1 use make_rng(seed, p). The result does not depend on
/// the thread count.
IsometryReport verify_ito_isometry(const IntegrandGenerator& zgen, const TimeGrid& grid,
                                   const std::vector<double>& lambdas, std::size_t dof, std::size_t n_paths,
                                   std::uint64_t seed, unsigned threads = 1);

/// Runs fn(i) for i in [0, count) on up to `threads` workers.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn);

} // namespace evo
