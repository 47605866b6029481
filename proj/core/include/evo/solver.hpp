#pragma once

// Backward-Euler realization of the solution operator of
// (d0 M(d0^{-1}) + A) u = f, Picard iteration for multiplicative noise,
// additive/distributional noise and initial values.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "evo/matlaw.hpp"
#include "evo/noise.hpp"
#include "evo/spatial.hpp"

namespace evo {

/// Deterministic Lipschitz perturbation B(u)_n = beta * mask * g(u_n), acting
/// pointwise in time and space.
class Perturbation {
public:
    enum class Kind { None, Linear, Sine };

    static Perturbation none();
    /// B(u) = beta * mask * u.
    static Perturbation linear(Complex beta, std::vector<double> mask = {});
    /// B(u) = beta * mask * sin(u) on real and imaginary parts separately.
    static Perturbation sine(double beta, std::vector<double> mask = {});

    Kind kind() const noexcept { return kind_; }
    bool is_none() const noexcept { return kind_ == Kind::None; }
    bool is_linear() const noexcept { return kind_ != Kind::Sine; }
    Complex beta() const noexcept { return beta_; }

    /// Lipschitz constant in any weighted norm: |beta| * max |mask|.
    double lipschitz() const noexcept;

    Trajectory apply(const Trajectory& u) const;

private:
    Perturbation() = default;

    Kind kind_ = Kind::None;
    Complex beta_{0.0, 0.0};
    std::vector<double> mask_;
};

/// (d0 M(d0^{-1}) + A) u = f + int_0^. sigma(u) dW + B(u), optionally with an
/// initial state u0.
struct EvoProblem {
    MaterialLaw law;
    BlockOperator op;
    Trajectory forcing;
    SigmaSpec sigma = SigmaSpec::zero();
    std::optional<WienerPath> path;
    std::optional<CVector> u0;
    Perturbation perturbation = Perturbation::none();

    std::size_t dof() const noexcept { return law.dof(); }

    /// Shape agreement, sigma/path pairing and the declared Lipschitz constant.
    void validate() const;
};

/// Lower bound for the coercivity constant on B(r, r), r = 1/(2 nu) slightly
/// enlarged. Exact for diagonal laws with real entries (pencil m0 >= 0, and
/// fractional blocks), sampled otherwise.
double solver_coercivity(const MaterialLaw& law, double nu);

/// Factorized per-step system. For pencil and indicator laws the step matrix is
/// M0/dt + M1 + A and the history term M0 u_{n-1}/dt; fractional laws use the
/// Grünwald-Letnikov weights with the memory moved to the right-hand side.
class StepSolver {
public:
    StepSolver(const MaterialLaw& law, const SpMat& a, double dt);
    ~StepSolver();
    StepSolver(StepSolver&&) noexcept;
    StepSolver& operator=(StepSolver&&) noexcept;

    /// Causal solve; f must live on a grid with this solver's dt.
    Trajectory solve(const Trajectory& f) const;

    double dt() const noexcept { return dt_; }

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    double dt_;
};

/// One causal solve of (d0 M(d0^{-1}) + A) u = f. The step matrix does not
/// depend on nu; nu only fixes the coercivity check.
Trajectory solve_deterministic(const MaterialLaw& law, const BlockOperator& op, const Trajectory& f, double nu);

struct SolveOptions {
    double nu = 1.0;
    double tol = 1e-8;
    std::size_t max_iter = 100;
    /// Coercivity constant; solver_coercivity(law, nu) when empty.
    std::optional<double> c;
};

struct SolveReport {
    std::size_t iterations = 0;
    std::vector<double> residual_history;
    double contraction_est = 0.0;
    double nu_used = 0.0;
    double c_used = 0.0;
    /// (L_sigma / sqrt(2 nu) + L_B) / c.
    double q_bound = 0.0;
    bool distributional = false;
    std::optional<double> initial_attainment_error;
};

struct Solution {
    Trajectory u;
    SolveReport report;
};

/// Fixed-point map u -> S(f + int sigma(u) dW + B(u)) iterated from u = 0.
/// Exposed so callers can inspect individual iterates.
class PicardIteration {
public:
    PicardIteration(const EvoProblem& problem, const SolveOptions& options);
    /// Evaluates sigma and B at u + shift instead of u (initial-value lift).
    PicardIteration(const EvoProblem& problem, const SolveOptions& options, Trajectory shift);

    /// Computes the next iterate and returns ||u^{k+1} - u^k||_nu.
    double advance();

    const Trajectory& current() const noexcept { return current_; }
    std::size_t iterations() const noexcept { return iterations_; }
    double q_bound() const noexcept { return q_bound_; }
    double c() const noexcept { return c_; }
    /// True when the right-hand side does not depend on u.
    bool is_affine_free() const noexcept { return affine_free_; }

private:
    Trajectory rhs(const Trajectory& u) const;

    const EvoProblem& problem_;
    SolveOptions options_;
    StepSolver step_;
    Trajectory current_;
    std::optional<Trajectory> shift_;
    std::size_t iterations_ = 0;
    double c_ = 0.0;
    double q_bound_ = 0.0;
    bool affine_free_ = false;
};

/// Throws ContractionBudgetError when q_bound >= 1 and NonConvergenceError
/// when max_iter is exhausted.
Solution solve_multiplicative(const EvoProblem& problem, const SolveOptions& options);

struct AdditiveSolution {
    /// d0^k w; a difference quotient of order k, only d0_inv^k(u) = w is
    /// norm-controlled when k >= 1.
    Trajectory u;
    Trajectory w;
    bool distributional = false;
    SolveReport report;
};

/// Solves for w with right-hand side d0_inv^k(f) + X (+ b(w) for a linear
/// perturbation) and returns u = d0^k(w).
AdditiveSolution solve_additive(const MaterialLaw& law, const BlockOperator& op, const Trajectory& f,
                                const Trajectory& x, unsigned k_order, const SolveOptions& options,
                                const Perturbation& perturbation = Perturbation::none());

/// Initial state u0 for a pencil law: solves for v with right-hand side
/// f - chi (M1 + A) u0 + int sigma(v + chi u0) dW and returns v + chi u0. The
/// report carries ||M0 u[0] - M0 u0||.
Solution solve_ivp(const EvoProblem& problem, const SolveOptions& options);

} // namespace evo
