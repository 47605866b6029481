#pragma once

// Discrete exponentially weighted time axis: weighted norms, the causal
// derivative and its inverse, Grünwald-Letnikov fractional powers and a
// Fourier-Laplace diagnostic.

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "evo/errors.hpp"

namespace evo {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using RowMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Uniform time grid t_n = t0 + n*dt, n = 0..n_steps-1, carrying the weight
/// parameter nu of the space exp(-2 nu t) dt.
class TimeGrid {
public:
    TimeGrid(double dt, std::size_t n_steps, double nu, double t0 = 0.0);

    double dt() const noexcept { return dt_; }
    std::size_t n_steps() const noexcept { return n_steps_; }
    double nu() const noexcept { return nu_; }
    double t0() const noexcept { return t0_; }

    double time(std::size_t n) const noexcept { return t0_ + static_cast<double>(n) * dt_; }
    double final_time() const noexcept { return time(n_steps_ - 1); }

    /// exp(-2 nu t_n)
    double weight(std::size_t n) const noexcept;
    double weight(std::size_t n, double nu) const noexcept;

    TimeGrid with_nu(double nu) const { return TimeGrid(dt_, n_steps_, nu, t0_); }

    /// Same nodes (t0, dt, n_steps); nu is allowed to differ.
    bool same_axis(const TimeGrid& other) const noexcept;

    friend bool operator==(const TimeGrid& a, const TimeGrid& b) noexcept {
        return a.same_axis(b) && a.nu_ == b.nu_;
    }

private:
    double dt_;
    std::size_t n_steps_;
    double nu_;
    double t0_;
};

/// A space-time field: n_steps rows of dof complex values on a TimeGrid.
class Trajectory {
public:
    Trajectory(TimeGrid grid, std::size_t dof);
    Trajectory(TimeGrid grid, RowMatrix values);

    const TimeGrid& grid() const noexcept { return grid_; }
    std::size_t dof() const noexcept { return static_cast<std::size_t>(values_.cols()); }
    std::size_t n_steps() const noexcept { return static_cast<std::size_t>(values_.rows()); }

    const RowMatrix& values() const noexcept { return values_; }
    RowMatrix& values() noexcept { return values_; }

    auto step(std::size_t n) { return values_.row(static_cast<Eigen::Index>(n)); }
    auto step(std::size_t n) const { return values_.row(static_cast<Eigen::Index>(n)); }

    /// Copy of the step as a column vector.
    CVector at(std::size_t n) const { return values_.row(static_cast<Eigen::Index>(n)).transpose(); }

    /// Columns [offset, offset+size) as a new trajectory.
    Trajectory columns(std::size_t offset, std::size_t size) const;

    Trajectory with_grid(const TimeGrid& grid) const;

    Trajectory& operator+=(const Trajectory& other);
    Trajectory& operator-=(const Trajectory& other);
    Trajectory& operator*=(Complex s);

    friend Trajectory operator+(Trajectory a, const Trajectory& b) { return a += b; }
    friend Trajectory operator-(Trajectory a, const Trajectory& b) { return a -= b; }
    friend Trajectory operator*(Complex s, Trajectory a) { return a *= s; }

    /// Bitwise equality of grid axis, shape and every value.
    bool identical(const Trajectory& other) const noexcept;

private:
    void check_compatible(const Trajectory& other) const;

    TimeGrid grid_;
    RowMatrix values_;
};

/// sqrt(dt * sum_n exp(-2 nu t_n) |u_n|^2), nu taken from the trajectory grid.
double weighted_norm(const Trajectory& u);
double weighted_norm(const Trajectory& u, double nu);
Complex weighted_inner(const Trajectory& u, const Trajectory& v, double nu);

/// Backward difference with zero history u_{-1} = 0.
Trajectory d0(const Trajectory& u);

/// Causal cumulative sum dt * sum_{k<=n} u_k; exact algebraic inverse of d0.
Trajectory d0_inv(const Trajectory& u);

/// Grünwald-Letnikov weights g_0..g_{count-1} for an arbitrary real order.
std::vector<double> gl_weights(double order, std::size_t count);

/// dt^{-order} * sum_j g_j u_{n-j} for any real order (negative orders
/// integrate). Cost is O(n_steps^2 * dof).
Trajectory gl_apply(const Trajectory& u, double order);

/// Fractional derivative of order alpha in (0, 2).
Trajectory d0_frac(const Trajectory& u, double alpha);

/// Discrete Fourier-Laplace transform: per column, the DFT of
/// exp(-nu t_n) u_n scaled by dt / sqrt(2 pi). Row j corresponds to the
/// angular frequency returned by fourier_laplace_frequencies.
RowMatrix fourier_laplace_diag(const Trajectory& u);
std::vector<double> fourier_laplace_frequencies(const TimeGrid& grid);

} // namespace evo
