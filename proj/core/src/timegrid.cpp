#include "evo/timegrid.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <unsupported/Eigen/FFT>

namespace evo {

TimeGrid::TimeGrid(double dt, std::size_t n_steps, double nu, double t0)
    : dt_(dt), n_steps_(n_steps), nu_(nu), t0_(t0) {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw ParameterError("TimeGrid: dt must be positive, got " + std::to_string(dt));
    }
    if (n_steps == 0) {
        throw ParameterError("TimeGrid: n_steps must be at least 1");
    }
    if (!(nu > 0.0) || !std::isfinite(nu)) {
        throw ParameterError("TimeGrid: nu must be positive, got " + std::to_string(nu));
    }
}

double TimeGrid::weight(std::size_t n) const noexcept { return weight(n, nu_); }

double TimeGrid::weight(std::size_t n, double nu) const noexcept {
    return std::exp(-2.0 * nu * time(n));
}

bool TimeGrid::same_axis(const TimeGrid& other) const noexcept {
    return dt_ == other.dt_ && n_steps_ == other.n_steps_ && t0_ == other.t0_;
}

Trajectory::Trajectory(TimeGrid grid, std::size_t dof)
    : grid_(grid), values_(RowMatrix::Zero(static_cast<Eigen::Index>(grid.n_steps()),
                                           static_cast<Eigen::Index>(dof))) {}

Trajectory::Trajectory(TimeGrid grid, RowMatrix values) : grid_(grid), values_(std::move(values)) {
    if (static_cast<std::size_t>(values_.rows()) != grid_.n_steps()) {
        throw ShapeError("Trajectory: values has " + std::to_string(values_.rows()) +
                         " rows but the grid has " + std::to_string(grid_.n_steps()) + " steps");
    }
}

Trajectory Trajectory::columns(std::size_t offset, std::size_t size) const {
    if (offset + size > dof()) {
        throw ShapeError("Trajectory::columns: range exceeds dof");
    }
    return Trajectory(grid_, values_.middleCols(static_cast<Eigen::Index>(offset),
                                                static_cast<Eigen::Index>(size)));
}

Trajectory Trajectory::with_grid(const TimeGrid& grid) const {
    if (!grid.same_axis(grid_)) {
        throw ShapeError("Trajectory::with_grid: time axis differs");
    }
    return Trajectory(grid, values_);
}

void Trajectory::check_compatible(const Trajectory& other) const {
    if (!grid_.same_axis(other.grid_) || dof() != other.dof()) {
        throw ShapeError("Trajectory: operands differ in time axis or dof");
    }
}

Trajectory& Trajectory::operator+=(const Trajectory& other) {
    check_compatible(other);
    values_ += other.values_;
    return *this;
}

Trajectory& Trajectory::operator-=(const Trajectory& other) {
    check_compatible(other);
    values_ -= other.values_;
    return *this;
}

Trajectory& Trajectory::operator*=(Complex s) {
    values_ *= s;
    return *this;
}

bool Trajectory::identical(const Trajectory& other) const noexcept {
    if (!grid_.same_axis(other.grid_) || values_.rows() != other.values_.rows() ||
        values_.cols() != other.values_.cols()) {
        return false;
    }
    const Complex* a = values_.data();
    const Complex* b = other.values_.data();
    for (Eigen::Index i = 0; i < values_.size(); ++i) {
        if (a[i].real() != b[i].real() || a[i].imag() != b[i].imag()) {
            return false;
        }
    }
    return true;
}

double weighted_norm(const Trajectory& u) { return weighted_norm(u, u.grid().nu()); }

double weighted_norm(const Trajectory& u, double nu) {
    const TimeGrid& g = u.grid();
    double acc = 0.0;
    for (std::size_t n = 0; n < u.n_steps(); ++n) {
        acc += g.weight(n, nu) * u.step(n).squaredNorm();
    }
    return std::sqrt(g.dt() * acc);
}

Complex weighted_inner(const Trajectory& u, const Trajectory& v, double nu) {
    if (!u.grid().same_axis(v.grid()) || u.dof() != v.dof()) {
        throw ShapeError("weighted_inner: operands differ in time axis or dof");
    }
    const TimeGrid& g = u.grid();
    Complex acc{0.0, 0.0};
    for (std::size_t n = 0; n < u.n_steps(); ++n) {
        acc += g.weight(n, nu) * u.step(n).dot(v.step(n));
    }
    return g.dt() * acc;
}

Trajectory d0(const Trajectory& u) {
    const double dt = u.grid().dt();
    Trajectory out(u.grid(), u.dof());
    RowMatrix& o = out.values();
    const RowMatrix& x = u.values();
    for (Eigen::Index n = 0; n < x.rows(); ++n) {
        for (Eigen::Index i = 0; i < x.cols(); ++i) {
            const Complex prev = n > 0 ? x(n - 1, i) : Complex{0.0, 0.0};
            o(n, i) = (x(n, i) - prev) / dt;
        }
    }
    return out;
}

Trajectory d0_inv(const Trajectory& u) {
    const double dt = u.grid().dt();
    Trajectory out(u.grid(), u.dof());
    RowMatrix& o = out.values();
    const RowMatrix& x = u.values();
    for (Eigen::Index i = 0; i < x.cols(); ++i) {
        Complex running{0.0, 0.0};
        for (Eigen::Index n = 0; n < x.rows(); ++n) {
            running += x(n, i);
            o(n, i) = dt * running;
        }
    }
    return out;
}

std::vector<double> gl_weights(double order, std::size_t count) {
    std::vector<double> g(count);
    if (count == 0) {
        return g;
    }
    g[0] = 1.0;
    for (std::size_t j = 1; j < count; ++j) {
        g[j] = g[j - 1] * (1.0 - (order + 1.0) / static_cast<double>(j));
    }
    return g;
}

Trajectory gl_apply(const Trajectory& u, double order) {
    const std::size_t n_steps = u.n_steps();
    const std::vector<double> g = gl_weights(order, n_steps);
    const double scale = std::pow(u.grid().dt(), order);
    Trajectory out(u.grid(), u.dof());
    RowMatrix& o = out.values();
    const RowMatrix& x = u.values();
    for (std::size_t n = 0; n < n_steps; ++n) {
        for (Eigen::Index i = 0; i < x.cols(); ++i) {
            Complex acc{0.0, 0.0};
            for (std::size_t j = 0; j <= n; ++j) {
                acc += g[j] * x(static_cast<Eigen::Index>(n - j), i);
            }
            o(static_cast<Eigen::Index>(n), i) = acc / scale;
        }
    }
    return out;
}

Trajectory d0_frac(const Trajectory& u, double alpha) {
    if (!(alpha > 0.0 && alpha < 2.0)) {
        throw ParameterError("d0_frac: alpha must lie in (0, 2), got " + std::to_string(alpha));
    }
    return gl_apply(u, alpha);
}

RowMatrix fourier_laplace_diag(const Trajectory& u) {
    const TimeGrid& g = u.grid();
    const auto n = static_cast<Eigen::Index>(u.n_steps());
    const double scale = g.dt() / std::sqrt(2.0 * std::numbers::pi);
    RowMatrix out(n, static_cast<Eigen::Index>(u.dof()));
    Eigen::FFT<double> fft;
    std::vector<Complex> in(static_cast<std::size_t>(n));
    std::vector<Complex> spectrum;
    for (Eigen::Index c = 0; c < out.cols(); ++c) {
        for (Eigen::Index k = 0; k < n; ++k) {
            // exp(-nu t_n) applied on the absolute time, phase relative to t0
            in[static_cast<std::size_t>(k)] =
                std::exp(-g.nu() * g.time(static_cast<std::size_t>(k))) * u.values()(k, c);
        }
        fft.fwd(spectrum, in);
        for (Eigen::Index k = 0; k < n; ++k) {
            out(k, c) = scale * spectrum[static_cast<std::size_t>(k)];
        }
    }
    return out;
}

std::vector<double> fourier_laplace_frequencies(const TimeGrid& grid) {
    const std::size_t n = grid.n_steps();
    std::vector<double> xi(n);
    const double base = 2.0 * std::numbers::pi / (static_cast<double>(n) * grid.dt());
    for (std::size_t k = 0; k < n; ++k) {
        const auto signed_k = k <= n / 2 ? static_cast<double>(k)
                                         : static_cast<double>(k) - static_cast<double>(n);
        xi[k] = base * signed_k;
    }
    return xi;
}

} // namespace evo
