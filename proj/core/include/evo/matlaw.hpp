#pragma once

// Material laws z -> M(z) and their causal action M(d0^{-1}) on trajectories.

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "evo/timegrid.hpp"

namespace evo {

using SpMat = Eigen::SparseMatrix<Complex>;
using CMatrix = Eigen::MatrixXcd;

/// M(z) = M0 + z M1.
struct Pencil {
    SpMat m0;
    SpMat m1;
};

/// Contiguous dof range whose law is coefficient * z^{1 - alpha}, so that
/// d0 M(d0^{-1}) acts there as coefficient * d0^alpha.
struct FractionalBlock {
    std::size_t offset = 0;
    std::size_t size = 0;
    double alpha = 1.0;
    double coefficient = 1.0;
};

class MaterialLaw {
public:
    enum class Kind { Pencil, FractionalDiagonal, BlockIndicator };

    /// M0 must be self-adjoint and positive semidefinite.
    static MaterialLaw pencil(SpMat m0, SpMat m1);

    /// Blocks must tile [0, dof) and carry exponents in (0, 1].
    static MaterialLaw fractional(std::size_t dof, std::vector<FractionalBlock> blocks);

    /// Diagonal 0/1 masks for the identity part (m0) and the d0^{-1} part
    /// (m1), with optional positive coefficients. Every dof must be covered
    /// by at least one mask.
    static MaterialLaw indicator(std::vector<std::uint8_t> m0_mask, std::vector<std::uint8_t> m1_mask,
                                 std::vector<double> m0_coeff = {}, std::vector<double> m1_coeff = {});

    Kind kind() const noexcept { return kind_; }
    std::size_t dof() const noexcept { return dof_; }

    /// Pencil and BlockIndicator laws as explicit (M0, M1); empty for
    /// fractional laws.
    std::optional<Pencil> pencil_form() const;

    /// True when M(z) is diagonal for every z.
    bool is_diagonal() const noexcept;

    /// diag(M(z)); requires is_diagonal().
    CVector diagonal_at(Complex z) const;

    /// M(z) phi.
    CVector apply_at(Complex z, const CVector& phi) const;

    /// Dense M(z); intended for small dof.
    CMatrix dense_at(Complex z) const;

    const std::vector<FractionalBlock>& fractional_blocks() const noexcept { return blocks_; }
    const std::vector<std::uint8_t>& m0_mask() const noexcept { return m0_mask_; }
    const std::vector<std::uint8_t>& m1_mask() const noexcept { return m1_mask_; }

private:
    MaterialLaw() = default;

    Kind kind_ = Kind::Pencil;
    std::size_t dof_ = 0;
    SpMat m0_;
    SpMat m1_;
    std::vector<FractionalBlock> blocks_;
    std::vector<std::uint8_t> m0_mask_;
    std::vector<std::uint8_t> m1_mask_;
    std::vector<double> m0_coeff_;
    std::vector<double> m1_coeff_;
};

/// Same variant data: pencil forms with bitwise equal entries, or equal
/// fractional blocks.
bool identical(const MaterialLaw& a, const MaterialLaw& b);

/// M(d0^{-1}) u, realized causally in the time domain.
Trajectory apply_material(const MaterialLaw& law, const Trajectory& u);

struct CoercivityReport {
    double r = 0.0;
    /// min over sampled z and sampled unit phi of Re <z^{-1} M(z) phi, phi>.
    double c_est = 0.0;
    std::size_t n_samples = 0;
    Complex worst_z{0.0, 0.0};
    /// min over the sampled z of the smallest eigenvalue of the Hermitian part
    /// of z^{-1} M(z); present for diagonal laws and small dof.
    std::optional<double> c_eig;

    /// The sharper of c_est and c_eig.
    double lower() const noexcept { return c_eig ? std::min(c_est, *c_eig) : c_est; }
};

/// Samples z uniformly in the disc B(r, r) minus |z| < r * 1e-6 and random
/// unit vectors phi. Deterministic for a given seed.
CoercivityReport verify_coercivity(const MaterialLaw& law, double r, std::size_t n_z, std::size_t n_phi,
                                   std::uint64_t seed);

/// Contraction budget for Lipschitz constant L against coercivity c:
/// q(nu) = L / (c sqrt(2 nu)), which is below one iff nu > nu1 = L^2 / (2 c^2).
struct LipschitzBudget {
    double c = 1.0;
    double lipschitz = 0.0;
    double nu1 = 0.0;

    double q(double nu) const;
};

LipschitzBudget lipschitz_budget(double c, double L);

} // namespace evo
