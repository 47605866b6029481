#pragma once

// Spectral reference solvers in the discrete sine eigenbasis of the 1D
// Dirichlet Laplacian. They share only the Wiener path with the evolutionary
// solver.

#include <vector>

#include "evo/noise.hpp"

namespace evo {

/// Orthonormal discrete sine vectors phi_j(i) = sqrt(2/N) sin(j pi i / N),
/// i, j = 1..N-1, with -Delta phi_j = mu_j phi_j.
struct SineBasis {
    std::size_t n_cells = 0;
    double length = 1.0;
    Eigen::MatrixXd phi;
    Eigen::VectorXd mu;

    static SineBasis dirichlet(std::size_t n_cells, double length = 1.0);
    std::size_t size() const noexcept { return static_cast<std::size_t>(mu.size()); }
};

/// Mild solution of u_tt - Delta u = sigma(u) dW / dt with zero data: per mode
/// Z_n = e^{i w dt} (Z_{n-1} + s_n), u = Im Z / w, v = u_t = Re Z, where s_n
/// is the left-point noise increment projected on the mode. The path
/// embedding must cover the N-1 nodes.
struct MildWaveResult {
    Trajectory u;
    Trajectory v;
};

MildWaveResult mild_wave_reference(const SineBasis& basis, const SigmaSpec& sigma, const WienerPath& path);

/// Heat reference for u_t - Delta u = g + sigma(u) dW / dt tested against each
/// eigenvector. Exponential: u_n = e^{-mu dt}(u_{n-1} + s_n) + (1 - e^{-mu dt})/mu g_n.
/// Implicit: (1 + mu dt) u_n = u_{n-1} + s_n + dt g_n.
enum class HeatScheme { Exponential, Implicit };

Trajectory variational_heat_reference(const SineBasis& basis, const SigmaSpec& sigma, const WienerPath& path,
                                      const Trajectory* source = nullptr,
                                      HeatScheme scheme = HeatScheme::Exponential);

} // namespace evo
