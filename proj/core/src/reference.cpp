#include "evo/reference.hpp"

#include <cmath>
#include <numbers>

namespace evo {

SineBasis SineBasis::dirichlet(std::size_t n_cells, double length) {
    if (n_cells < 2) {
        throw ParameterError("SineBasis: need at least 2 cells");
    }
    SineBasis b;
    b.n_cells = n_cells;
    b.length = length;
    const auto m = static_cast<Eigen::Index>(n_cells - 1);
    const auto nd = static_cast<double>(n_cells);
    const double h = length / nd;
    b.phi.resize(m, m);
    b.mu.resize(m);
    const double norm = std::sqrt(2.0 / nd);
    for (Eigen::Index j = 1; j <= m; ++j) {
        for (Eigen::Index i = 1; i <= m; ++i) {
            b.phi(i - 1, j - 1) = norm * std::sin(static_cast<double>(j * i) * std::numbers::pi / nd);
        }
        const double s = std::sin(static_cast<double>(j) * std::numbers::pi / (2.0 * nd));
        b.mu(j - 1) = 4.0 / (h * h) * s * s;
    }
    return b;
}

namespace {

void check_path(const SineBasis& basis, const WienerPath& path) {
    if (path.dof() != basis.size()) {
        throw ShapeError("reference: path embedding has " + std::to_string(path.dof()) + " columns, expected " +
                         std::to_string(basis.size()));
    }
}

// Modal noise increment phi^T (s(u_{n-1}) * xi_n).
CVector modal_increment(const SineBasis& basis, const SigmaSpec& sigma, const WienerPath& path,
                        const CVector& u_prev, std::size_t n) {
    CVector s = sigma.shape(u_prev);
    s = s.cwiseProduct(path.field_increments().row(static_cast<Eigen::Index>(n)).transpose().cast<Complex>());
    return basis.phi.transpose().cast<Complex>() * s;
}

} // namespace

MildWaveResult mild_wave_reference(const SineBasis& basis, const SigmaSpec& sigma, const WienerPath& path) {
    check_path(basis, path);
    const TimeGrid& grid = path.grid();
    const auto m = static_cast<Eigen::Index>(basis.size());
    MildWaveResult out{Trajectory(grid, basis.size()), Trajectory(grid, basis.size())};
    if (sigma.is_zero()) {
        return out;
    }
    const Eigen::MatrixXcd phi = basis.phi.cast<Complex>();
    Eigen::VectorXd omega = basis.mu.cwiseSqrt();
    Eigen::VectorXd cs(m);
    Eigen::VectorXd sn(m);
    for (Eigen::Index j = 0; j < m; ++j) {
        cs(j) = std::cos(omega(j) * grid.dt());
        sn(j) = std::sin(omega(j) * grid.dt());
    }
    // P = sum cos(w (t - s)) ds_hat, Q = sum sin(w (t - s)) ds_hat.
    CVector p = CVector::Zero(m);
    CVector q = CVector::Zero(m);
    CVector u_prev = CVector::Zero(m);
    for (std::size_t n = 1; n < grid.n_steps(); ++n) {
        const CVector s = modal_increment(basis, sigma, path, u_prev, n);
        const CVector shifted = p + s;
        for (Eigen::Index j = 0; j < m; ++j) {
            const Complex pj = cs(j) * shifted(j) - sn(j) * q(j);
            const Complex qj = sn(j) * shifted(j) + cs(j) * q(j);
            p(j) = pj;
            q(j) = qj;
        }
        const CVector u_hat = q.cwiseQuotient(omega.cast<Complex>());
        u_prev = phi * u_hat;
        out.u.values().row(static_cast<Eigen::Index>(n)) = u_prev.transpose();
        out.v.values().row(static_cast<Eigen::Index>(n)) = (phi * p).transpose();
    }
    return out;
}

Trajectory variational_heat_reference(const SineBasis& basis, const SigmaSpec& sigma, const WienerPath& path,
                                      const Trajectory* source, HeatScheme scheme) {
    check_path(basis, path);
    const TimeGrid& grid = path.grid();
    const auto m = static_cast<Eigen::Index>(basis.size());
    if (source && (source->dof() != basis.size() || !source->grid().same_axis(grid))) {
        throw ShapeError("variational_heat_reference: source does not match the basis and path grid");
    }
    const Eigen::MatrixXcd phi = basis.phi.cast<Complex>();
    const double dt = grid.dt();
    Eigen::VectorXd decay(m);
    Eigen::VectorXd gain(m);
    for (Eigen::Index j = 0; j < m; ++j) {
        const double mu = basis.mu(j);
        if (scheme == HeatScheme::Exponential) {
            decay(j) = std::exp(-mu * dt);
            gain(j) = -std::expm1(-mu * dt) / mu;
        } else {
            decay(j) = 1.0 / (1.0 + mu * dt);
            gain(j) = dt / (1.0 + mu * dt);
        }
    }
    Trajectory out(grid, basis.size());
    CVector u_hat = CVector::Zero(m);
    CVector u_prev = CVector::Zero(m);
    for (std::size_t n = 0; n < grid.n_steps(); ++n) {
        CVector s = CVector::Zero(m);
        if (n > 0 && !sigma.is_zero()) {
            s = modal_increment(basis, sigma, path, u_prev, n);
        }
        u_hat = decay.cast<Complex>().cwiseProduct(u_hat + s);
        if (source) {
            const CVector g = phi.transpose() * source->at(n);
            u_hat += gain.cast<Complex>().cwiseProduct(g);
        }
        u_prev = phi * u_hat;
        out.values().row(static_cast<Eigen::Index>(n)) = u_prev.transpose();
    }
    return out;
}

} // namespace evo
