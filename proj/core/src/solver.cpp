#include "evo/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/SVD>
#include <Eigen/SparseLU>

namespace evo {

namespace {

constexpr std::size_t kSvdLimit = 2000;
constexpr std::uint64_t kCoercivitySeed = 0x5eedULL;

bool real_diagonal(const SpMat& m) {
    for (int k = 0; k < m.outerSize(); ++k) {
        for (SpMat::InnerIterator it(m, k); it; ++it) {
            if (it.value() == Complex{0.0, 0.0}) {
                continue;
            }
            if (it.row() != it.col() || it.value().imag() != 0.0) {
                return false;
            }
        }
    }
    return true;
}

SpMat diagonal_matrix(const CVector& d) {
    const auto n = d.size();
    SpMat m(n, n);
    std::vector<Eigen::Triplet<Complex>> t;
    t.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        t.emplace_back(i, i, d(i));
    }
    m.setFromTriplets(t.begin(), t.end());
    return m;
}

Trajectory chi(const TimeGrid& grid, const CVector& v) {
    Trajectory out(grid, static_cast<std::size_t>(v.size()));
    out.values().rowwise() = v.transpose();
    return out;
}

} // namespace

// ---------------------------------------------------------------- Perturbation

Perturbation Perturbation::none() { return Perturbation(); }

Perturbation Perturbation::linear(Complex beta, std::vector<double> mask) {
    Perturbation p;
    p.kind_ = Kind::Linear;
    p.beta_ = beta;
    p.mask_ = std::move(mask);
    return p;
}

Perturbation Perturbation::sine(double beta, std::vector<double> mask) {
    Perturbation p;
    p.kind_ = Kind::Sine;
    p.beta_ = Complex{beta, 0.0};
    p.mask_ = std::move(mask);
    return p;
}

double Perturbation::lipschitz() const noexcept {
    if (kind_ == Kind::None) {
        return 0.0;
    }
    double m = 1.0;
    if (!mask_.empty()) {
        m = 0.0;
        for (double v : mask_) {
            m = std::max(m, std::abs(v));
        }
    }
    return std::abs(beta_) * m;
}

Trajectory Perturbation::apply(const Trajectory& u) const {
    Trajectory out(u.grid(), u.dof());
    if (kind_ == Kind::None) {
        return out;
    }
    if (!mask_.empty() && mask_.size() != u.dof()) {
        throw ShapeError("Perturbation: mask length differs from dof");
    }
    const RowMatrix& x = u.values();
    RowMatrix& y = out.values();
    for (Eigen::Index n = 0; n < x.rows(); ++n) {
        for (Eigen::Index i = 0; i < x.cols(); ++i) {
            const double m = mask_.empty() ? 1.0 : mask_[static_cast<std::size_t>(i)];
            if (m == 0.0) {
                continue;
            }
            const Complex v = x(n, i);
            const Complex g = kind_ == Kind::Linear ? v : Complex{std::sin(v.real()), std::sin(v.imag())};
            y(n, i) = beta_ * m * g;
        }
    }
    return out;
}

// ------------------------------------------------------------------ EvoProblem

void EvoProblem::validate() const {
    const std::size_t n = law.dof();
    if (static_cast<std::size_t>(op.matrix.rows()) != n || static_cast<std::size_t>(op.matrix.cols()) != n) {
        throw ShapeError("EvoProblem: operator is " + std::to_string(op.matrix.rows()) + "x" +
                         std::to_string(op.matrix.cols()) + " but the law has dof " + std::to_string(n));
    }
    if (forcing.dof() != n) {
        throw ShapeError("EvoProblem: forcing dof " + std::to_string(forcing.dof()) + " differs from law dof " +
                         std::to_string(n));
    }
    if (!sigma.is_zero()) {
        if (!path) {
            throw ParameterError("EvoProblem: sigma is set but no Wiener path is given");
        }
        if (path->dof() != n) {
            throw ShapeError("EvoProblem: path embedding dof " + std::to_string(path->dof()) +
                             " differs from law dof " + std::to_string(n));
        }
        if (!path->grid().same_axis(forcing.grid())) {
            throw ShapeError("EvoProblem: path grid differs from forcing grid");
        }
        sigma.check_declared(path->lambdas(), path->embedding());
    }
    if (u0 && static_cast<std::size_t>(u0->size()) != n) {
        throw ShapeError("EvoProblem: u0 has size " + std::to_string(u0->size()) + ", expected " +
                         std::to_string(n));
    }
    if (!perturbation.is_none()) {
        (void)perturbation.apply(Trajectory(TimeGrid(1.0, 1, 1.0), n));
    }
}

// ------------------------------------------------------------------ Coercivity

double solver_coercivity(const MaterialLaw& law, double nu) {
    if (!(nu > 0.0)) {
        throw ParameterError("solver_coercivity: nu must be positive");
    }
    const double r = (1.0 + 1e-6) / (2.0 * nu);
    if (law.kind() == MaterialLaw::Kind::FractionalDiagonal) {
        // Re z^{-alpha} on B(r, r) is smallest at z = 2r for alpha in (0, 1].
        double c = std::numeric_limits<double>::infinity();
        for (const auto& b : law.fractional_blocks()) {
            c = std::min(c, b.coefficient * std::pow(2.0 * r, -b.alpha));
        }
        return c;
    }
    const Pencil p = *law.pencil_form();
    if (real_diagonal(p.m0) && real_diagonal(p.m1)) {
        // Re (a + z b) / z = b + a Re(1/z) >= b + a / (2r) for a >= 0.
        double c = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < p.m0.rows(); ++i) {
            const double a = p.m0.coeff(i, i).real();
            const double b = p.m1.coeff(i, i).real();
            c = std::min(c, b + a / (2.0 * r));
        }
        return c;
    }
    return verify_coercivity(law, r, 64, 4, kCoercivitySeed).lower();
}

// ------------------------------------------------------------------ StepSolver

struct StepSolver::Impl {
    MaterialLaw::Kind kind = MaterialLaw::Kind::Pencil;
    SpMat m0_over_dt;
    std::vector<FractionalBlock> blocks;
    Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
    std::size_t dof = 0;
};

StepSolver::StepSolver(const MaterialLaw& law, const SpMat& a, double dt) : impl_(std::make_unique<Impl>()), dt_(dt) {
    if (!(dt > 0.0)) {
        throw ParameterError("StepSolver: dt must be positive");
    }
    const auto n = static_cast<Eigen::Index>(law.dof());
    if (a.rows() != n || a.cols() != n) {
        throw ShapeError("StepSolver: operator size differs from law dof");
    }
    impl_->kind = law.kind();
    impl_->dof = law.dof();
    SpMat k;
    if (law.kind() == MaterialLaw::Kind::FractionalDiagonal) {
        impl_->blocks = law.fractional_blocks();
        CVector d(n);
        for (const auto& b : impl_->blocks) {
            const double scale = b.coefficient * std::pow(dt, -b.alpha);
            d.segment(static_cast<Eigen::Index>(b.offset), static_cast<Eigen::Index>(b.size))
                .setConstant(Complex{scale, 0.0});
        }
        k = diagonal_matrix(d) + a;
    } else {
        const Pencil p = *law.pencil_form();
        impl_->m0_over_dt = p.m0 / Complex{dt, 0.0};
        k = impl_->m0_over_dt + p.m1 + a;
    }
    k.makeCompressed();
    impl_->lu.compute(k);
    if (impl_->lu.info() != Eigen::Success) {
        double smallest = std::numeric_limits<double>::quiet_NaN();
        if (static_cast<std::size_t>(n) <= kSvdLimit) {
            const CMatrix dense(k);
            Eigen::JacobiSVD<CMatrix> svd(dense);
            smallest = svd.singularValues()(n - 1);
        }
        throw SolverError("StepSolver: step matrix is singular (smallest singular value " + std::to_string(smallest) +
                              "); the material law is not coercive for this operator",
                          smallest);
    }
}

StepSolver::~StepSolver() = default;
StepSolver::StepSolver(StepSolver&&) noexcept = default;
StepSolver& StepSolver::operator=(StepSolver&&) noexcept = default;

Trajectory StepSolver::solve(const Trajectory& f) const {
    if (f.dof() != impl_->dof) {
        throw ShapeError("StepSolver::solve: forcing dof differs from law dof");
    }
    if (f.grid().dt() != dt_) {
        throw ShapeError("StepSolver::solve: forcing grid step differs from the factorized step");
    }
    Trajectory u(f.grid(), f.dof());
    const std::size_t steps = f.n_steps();
    CVector rhs(static_cast<Eigen::Index>(impl_->dof));

    if (impl_->kind == MaterialLaw::Kind::FractionalDiagonal) {
        // Scaled GL weights for the memory sums.
        std::vector<std::vector<double>> w(impl_->blocks.size());
        for (std::size_t b = 0; b < impl_->blocks.size(); ++b) {
            const auto& blk = impl_->blocks[b];
            if (blk.alpha != 1.0) {
                w[b] = gl_weights(blk.alpha, steps);
                const double scale = blk.coefficient * std::pow(dt_, -blk.alpha);
                for (double& g : w[b]) {
                    g *= scale;
                }
            }
        }
        for (std::size_t n = 0; n < steps; ++n) {
            const auto row = static_cast<Eigen::Index>(n);
            rhs = f.values().row(row).transpose();
            for (std::size_t b = 0; b < impl_->blocks.size(); ++b) {
                const auto& blk = impl_->blocks[b];
                const auto off = static_cast<Eigen::Index>(blk.offset);
                const auto len = static_cast<Eigen::Index>(blk.size);
                if (n == 0) {
                    continue;
                }
                if (blk.alpha == 1.0) {
                    rhs.segment(off, len) +=
                        (blk.coefficient / dt_) * u.values().row(row - 1).segment(off, len).transpose();
                    continue;
                }
                for (std::size_t j = 1; j <= n; ++j) {
                    rhs.segment(off, len) -=
                        w[b][j] * u.values().row(static_cast<Eigen::Index>(n - j)).segment(off, len).transpose();
                }
            }
            u.values().row(row) = impl_->lu.solve(rhs).transpose();
        }
        return u;
    }

    for (std::size_t n = 0; n < steps; ++n) {
        const auto row = static_cast<Eigen::Index>(n);
        rhs = f.values().row(row).transpose();
        if (n > 0) {
            rhs += impl_->m0_over_dt * u.values().row(row - 1).transpose();
        }
        u.values().row(row) = impl_->lu.solve(rhs).transpose();
    }
    return u;
}

Trajectory solve_deterministic(const MaterialLaw& law, const BlockOperator& op, const Trajectory& f, double nu) {
    const double c = solver_coercivity(law, nu);
    if (!(c > 0.0)) {
        throw ParameterError("solve_deterministic: material law is not coercive at nu = " + std::to_string(nu) +
                             " (c = " + std::to_string(c) + ")");
    }
    const StepSolver step(law, op.matrix, f.grid().dt());
    return step.solve(f);
}

// ------------------------------------------------------------- PicardIteration

PicardIteration::PicardIteration(const EvoProblem& problem, const SolveOptions& options)
    : problem_(problem), options_(options), step_(problem.law, problem.op.matrix, problem.forcing.grid().dt()),
      current_(problem.forcing.grid(), problem.dof()) {
    problem_.validate();
    c_ = options_.c ? *options_.c : solver_coercivity(problem_.law, options_.nu);
    if (!(c_ > 0.0)) {
        throw ParameterError("PicardIteration: coercivity constant must be positive, got " + std::to_string(c_));
    }
    const double ls = problem_.sigma.is_zero() ? 0.0 : problem_.sigma.declared_lipschitz();
    const double lb = problem_.perturbation.lipschitz();
    q_bound_ = (ls / std::sqrt(2.0 * options_.nu) + lb) / c_;
    affine_free_ = problem_.sigma.is_zero() && problem_.perturbation.is_none();
    if (!affine_free_ && q_bound_ >= 1.0) {
        const LipschitzBudget budget = lipschitz_budget(c_, ls);
        throw ContractionBudgetError("Picard iteration refused: contraction bound q = " + std::to_string(q_bound_) +
                                         " >= 1 at nu = " + std::to_string(options_.nu) +
                                         "; increase nu (sigma alone needs nu > " + std::to_string(budget.nu1) + ")",
                                     q_bound_, budget.nu1);
    }
}

PicardIteration::PicardIteration(const EvoProblem& problem, const SolveOptions& options, Trajectory shift)
    : PicardIteration(problem, options) {
    if (shift.dof() != problem.dof() || !shift.grid().same_axis(problem.forcing.grid())) {
        throw ShapeError("PicardIteration: shift does not match the problem layout");
    }
    shift_ = std::move(shift);
}

Trajectory PicardIteration::rhs(const Trajectory& u) const {
    Trajectory out = problem_.forcing;
    if (affine_free_) {
        return out;
    }
    const Trajectory arg = shift_ ? u + *shift_ : u;
    if (!problem_.sigma.is_zero()) {
        out += stochastic_integral(problem_.sigma, arg, *problem_.path);
    }
    if (!problem_.perturbation.is_none()) {
        out += problem_.perturbation.apply(arg);
    }
    return out;
}

double PicardIteration::advance() {
    Trajectory next = step_.solve(rhs(current_));
    const double residual = weighted_norm(next - current_, options_.nu);
    current_ = std::move(next);
    ++iterations_;
    return residual;
}

namespace {

Solution run_picard(PicardIteration& it, const SolveOptions& options) {
    SolveReport rep;
    rep.nu_used = options.nu;
    rep.c_used = it.c();
    rep.q_bound = it.q_bound();
    if (it.is_affine_free()) {
        rep.residual_history.push_back(it.advance());
        rep.iterations = 1;
        return Solution{it.current(), rep};
    }
    for (;;) {
        const double r = it.advance();
        rep.residual_history.push_back(r);
        const std::size_t k = rep.residual_history.size();
        if (k >= 2 && rep.residual_history[k - 2] > 0.0) {
            rep.contraction_est = std::max(rep.contraction_est, r / rep.residual_history[k - 2]);
        }
        if (r < options.tol) {
            break;
        }
        if (it.iterations() >= options.max_iter) {
            throw NonConvergenceError("Picard iteration did not reach tol " + std::to_string(options.tol) + " in " +
                                          std::to_string(options.max_iter) + " iterations (last residual " +
                                          std::to_string(r) + ")",
                                      rep.residual_history);
        }
    }
    rep.iterations = it.iterations();
    return Solution{it.current(), rep};
}

} // namespace

Solution solve_multiplicative(const EvoProblem& problem, const SolveOptions& options) {
    if (!(options.tol > 0.0)) {
        throw ParameterError("solve_multiplicative: tol must be positive");
    }
    if (options.max_iter == 0) {
        throw ParameterError("solve_multiplicative: max_iter must be at least 1");
    }
    PicardIteration it(problem, options);
    return run_picard(it, options);
}

AdditiveSolution solve_additive(const MaterialLaw& law, const BlockOperator& op, const Trajectory& f,
                                const Trajectory& x, unsigned k_order, const SolveOptions& options,
                                const Perturbation& perturbation) {
    if (x.dof() != f.dof() || !x.grid().same_axis(f.grid())) {
        throw ShapeError("solve_additive: driver X does not match the forcing layout");
    }
    if (k_order > 0 && !perturbation.is_linear()) {
        throw ParameterError("solve_additive: a nonlinear perturbation cannot be moved through d0^k for k >= 1");
    }
    Trajectory g = f;
    for (unsigned i = 0; i < k_order; ++i) {
        g = d0_inv(g);
    }
    g += x;

    EvoProblem problem{law, op, g, SigmaSpec::zero(), std::nullopt, std::nullopt, perturbation};
    Solution sol = solve_multiplicative(problem, options);

    AdditiveSolution out{sol.u, sol.u, k_order > 0, sol.report};
    for (unsigned i = 0; i < k_order; ++i) {
        out.u = d0(out.u);
    }
    out.report.distributional = k_order > 0;
    return out;
}

Solution solve_ivp(const EvoProblem& problem, const SolveOptions& options) {
    if (!problem.u0) {
        return solve_multiplicative(problem, options);
    }
    const auto pencil = problem.law.pencil_form();
    if (!pencil) {
        throw ParameterError("solve_ivp: initial values require a pencil law M0 + z M1");
    }
    const CVector& u0 = *problem.u0;
    if (static_cast<std::size_t>(u0.size()) != problem.dof()) {
        throw ShapeError("solve_ivp: u0 has the wrong size");
    }
    const TimeGrid& grid = problem.forcing.grid();
    const CVector lift = (pencil->m1 + problem.op.matrix) * u0;

    EvoProblem shifted = problem;
    shifted.u0.reset();
    shifted.forcing = problem.forcing - chi(grid, lift);
    const Trajectory shift = chi(grid, u0);

    PicardIteration it(shifted, options, shift);
    Solution sol = run_picard(it, options);
    sol.u += shift;
    const CVector first = sol.u.at(0);
    sol.report.initial_attainment_error = (pencil->m0 * first - pencil->m0 * u0).norm();
    return sol;
}

} // namespace evo
