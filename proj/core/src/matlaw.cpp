#include "evo/matlaw.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>

namespace evo {

namespace {

constexpr std::size_t kDenseEigenLimit = 256;

bool sparse_is_diagonal(const SpMat& m) {
    for (int k = 0; k < m.outerSize(); ++k) {
        for (SpMat::InnerIterator it(m, k); it; ++it) {
            if (it.row() != it.col() && it.value() != Complex{0.0, 0.0}) {
                return false;
            }
        }
    }
    return true;
}

double max_abs(const SpMat& m) {
    double out = 0.0;
    for (int k = 0; k < m.outerSize(); ++k) {
        for (SpMat::InnerIterator it(m, k); it; ++it) {
            out = std::max(out, std::abs(it.value()));
        }
    }
    return out;
}

void check_self_adjoint_psd(const SpMat& m0) {
    const double scale = std::max(1.0, max_abs(m0));
    const SpMat skew = SpMat(m0 - SpMat(m0.adjoint()));
    if (max_abs(skew) > 1e-14 * scale) {
        throw ParameterError("MaterialLaw::pencil: M0 is not self-adjoint");
    }
    const double tol = 1e-12 * scale;
    if (sparse_is_diagonal(m0)) {
        for (Eigen::Index i = 0; i < m0.rows(); ++i) {
            if (m0.coeff(i, i).real() < -tol) {
                throw ParameterError("MaterialLaw::pencil: M0 has negative diagonal entry at dof " +
                                     std::to_string(i));
            }
        }
        return;
    }
    if (static_cast<std::size_t>(m0.rows()) <= kDenseEigenLimit) {
        Eigen::SelfAdjointEigenSolver<CMatrix> es(CMatrix(m0), Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -tol) {
            throw ParameterError("MaterialLaw::pencil: M0 is not positive semidefinite");
        }
        return;
    }
    // Gershgorin certificate for large non-diagonal M0.
    Eigen::VectorXd radius = Eigen::VectorXd::Zero(m0.rows());
    for (int k = 0; k < m0.outerSize(); ++k) {
        for (SpMat::InnerIterator it(m0, k); it; ++it) {
            if (it.row() != it.col()) {
                radius(it.row()) += std::abs(it.value());
            }
        }
    }
    for (Eigen::Index i = 0; i < m0.rows(); ++i) {
        if (m0.coeff(i, i).real() - radius(i) < -tol) {
            throw ParameterError("MaterialLaw::pencil: cannot certify M0 >= 0 (Gershgorin row " +
                                 std::to_string(i) + ")");
        }
    }
}

CVector random_unit(std::mt19937_64& rng, std::size_t dof) {
    std::normal_distribution<double> normal(0.0, 1.0);
    CVector phi(static_cast<Eigen::Index>(dof));
    for (Eigen::Index i = 0; i < phi.size(); ++i) {
        const double re = normal(rng);
        const double im = normal(rng);
        phi(i) = Complex{re, im};
    }
    return phi / phi.norm();
}

Complex sample_disc(std::mt19937_64& rng, double r) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (;;) {
        const Complex z{2.0 * r * unif(rng), r * (2.0 * unif(rng) - 1.0)};
        if (std::abs(z - Complex{r, 0.0}) < r && std::abs(z) >= r * 1e-6) {
            return z;
        }
    }
}

} // namespace

MaterialLaw MaterialLaw::pencil(SpMat m0, SpMat m1) {
    if (m0.rows() != m0.cols() || m1.rows() != m1.cols() || m0.rows() != m1.rows()) {
        throw ShapeError("MaterialLaw::pencil: M0 and M1 must be square and of equal size");
    }
    m0.makeCompressed();
    m1.makeCompressed();
    check_self_adjoint_psd(m0);
    MaterialLaw law;
    law.kind_ = Kind::Pencil;
    law.dof_ = static_cast<std::size_t>(m0.rows());
    law.m0_ = std::move(m0);
    law.m1_ = std::move(m1);
    return law;
}

MaterialLaw MaterialLaw::fractional(std::size_t dof, std::vector<FractionalBlock> blocks) {
    std::sort(blocks.begin(), blocks.end(),
              [](const FractionalBlock& a, const FractionalBlock& b) { return a.offset < b.offset; });
    std::size_t cursor = 0;
    for (const auto& b : blocks) {
        if (b.offset != cursor || b.size == 0) {
            throw ParameterError("MaterialLaw::fractional: blocks must tile [0, dof) without gaps");
        }
        if (!(b.alpha > 0.0 && b.alpha <= 1.0)) {
            throw ParameterError("MaterialLaw::fractional: exponent must lie in (0, 1], got " +
                                 std::to_string(b.alpha));
        }
        if (!(b.coefficient > 0.0)) {
            throw ParameterError("MaterialLaw::fractional: coefficient must be positive");
        }
        cursor += b.size;
    }
    if (cursor != dof) {
        throw ParameterError("MaterialLaw::fractional: blocks cover " + std::to_string(cursor) +
                             " of " + std::to_string(dof) + " dof");
    }
    MaterialLaw law;
    law.kind_ = Kind::FractionalDiagonal;
    law.dof_ = dof;
    law.blocks_ = std::move(blocks);
    return law;
}

MaterialLaw MaterialLaw::indicator(std::vector<std::uint8_t> m0_mask, std::vector<std::uint8_t> m1_mask,
                                   std::vector<double> m0_coeff, std::vector<double> m1_coeff) {
    const std::size_t dof = m0_mask.size();
    if (m1_mask.size() != dof) {
        throw ShapeError("MaterialLaw::indicator: masks differ in length");
    }
    if (m0_coeff.empty()) {
        m0_coeff.assign(dof, 1.0);
    }
    if (m1_coeff.empty()) {
        m1_coeff.assign(dof, 1.0);
    }
    if (m0_coeff.size() != dof || m1_coeff.size() != dof) {
        throw ShapeError("MaterialLaw::indicator: coefficient vectors differ in length from masks");
    }
    for (std::size_t i = 0; i < dof; ++i) {
        if (m0_mask[i] > 1 || m1_mask[i] > 1) {
            throw ParameterError("MaterialLaw::indicator: mask entries must be 0 or 1");
        }
        if (m0_mask[i] == 0 && m1_mask[i] == 0) {
            throw ParameterError("MaterialLaw::indicator: dof " + std::to_string(i) +
                                 " belongs to neither mask");
        }
        if (!(m0_coeff[i] > 0.0) || !(m1_coeff[i] > 0.0)) {
            throw ParameterError("MaterialLaw::indicator: coefficients must be positive");
        }
    }
    MaterialLaw law;
    law.kind_ = Kind::BlockIndicator;
    law.dof_ = dof;
    law.m0_mask_ = std::move(m0_mask);
    law.m1_mask_ = std::move(m1_mask);
    law.m0_coeff_ = std::move(m0_coeff);
    law.m1_coeff_ = std::move(m1_coeff);
    return law;
}

std::optional<Pencil> MaterialLaw::pencil_form() const {
    switch (kind_) {
    case Kind::Pencil:
        return Pencil{m0_, m1_};
    case Kind::BlockIndicator: {
        const auto n = static_cast<Eigen::Index>(dof_);
        SpMat m0(n, n);
        SpMat m1(n, n);
        std::vector<Eigen::Triplet<Complex>> t0;
        std::vector<Eigen::Triplet<Complex>> t1;
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto k = static_cast<std::size_t>(i);
            if (m0_mask_[k] != 0) {
                t0.emplace_back(i, i, Complex{m0_coeff_[k], 0.0});
            }
            if (m1_mask_[k] != 0) {
                t1.emplace_back(i, i, Complex{m1_coeff_[k], 0.0});
            }
        }
        m0.setFromTriplets(t0.begin(), t0.end());
        m1.setFromTriplets(t1.begin(), t1.end());
        m0.makeCompressed();
        m1.makeCompressed();
        return Pencil{std::move(m0), std::move(m1)};
    }
    case Kind::FractionalDiagonal:
        return std::nullopt;
    }
    return std::nullopt;
}

bool MaterialLaw::is_diagonal() const noexcept {
    if (kind_ != Kind::Pencil) {
        return true;
    }
    return sparse_is_diagonal(m0_) && sparse_is_diagonal(m1_);
}

CVector MaterialLaw::diagonal_at(Complex z) const {
    if (!is_diagonal()) {
        throw ParameterError("MaterialLaw::diagonal_at: law is not diagonal");
    }
    const auto n = static_cast<Eigen::Index>(dof_);
    CVector d(n);
    switch (kind_) {
    case Kind::Pencil:
        for (Eigen::Index i = 0; i < n; ++i) {
            d(i) = m0_.coeff(i, i) + z * m1_.coeff(i, i);
        }
        break;
    case Kind::BlockIndicator:
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto k = static_cast<std::size_t>(i);
            d(i) = (m0_mask_[k] != 0 ? m0_coeff_[k] : 0.0) + z * (m1_mask_[k] != 0 ? m1_coeff_[k] : 0.0);
        }
        break;
    case Kind::FractionalDiagonal:
        for (const auto& b : blocks_) {
            const Complex value = b.coefficient * std::pow(z, 1.0 - b.alpha);
            d.segment(static_cast<Eigen::Index>(b.offset), static_cast<Eigen::Index>(b.size)).setConstant(value);
        }
        break;
    }
    return d;
}

CVector MaterialLaw::apply_at(Complex z, const CVector& phi) const {
    if (static_cast<std::size_t>(phi.size()) != dof_) {
        throw ShapeError("MaterialLaw::apply_at: dof mismatch");
    }
    if (kind_ == Kind::Pencil) {
        return m0_ * phi + z * (m1_ * phi);
    }
    return diagonal_at(z).cwiseProduct(phi);
}

CMatrix MaterialLaw::dense_at(Complex z) const {
    if (kind_ == Kind::Pencil) {
        return CMatrix(m0_) + z * CMatrix(m1_);
    }
    return diagonal_at(z).asDiagonal();
}

bool identical(const MaterialLaw& a, const MaterialLaw& b) {
    if (a.dof() != b.dof()) {
        return false;
    }
    const auto pa = a.pencil_form();
    const auto pb = b.pencil_form();
    if (pa.has_value() != pb.has_value()) {
        return false;
    }
    if (!pa) {
        const auto& ba = a.fractional_blocks();
        const auto& bb = b.fractional_blocks();
        return std::equal(ba.begin(), ba.end(), bb.begin(), bb.end(), [](const auto& x, const auto& y) {
            return x.offset == y.offset && x.size == y.size && x.alpha == y.alpha && x.coefficient == y.coefficient;
        });
    }
    // Exact subtraction vanishes iff the entries agree.
    return max_abs(SpMat(pa->m0 - pb->m0)) == 0.0 && max_abs(SpMat(pa->m1 - pb->m1)) == 0.0;
}

Trajectory apply_material(const MaterialLaw& law, const Trajectory& u) {
    if (law.dof() != u.dof()) {
        throw ShapeError("apply_material: law has dof " + std::to_string(law.dof()) + ", trajectory has " +
                         std::to_string(u.dof()));
    }
    if (law.kind() == MaterialLaw::Kind::FractionalDiagonal) {
        Trajectory out(u.grid(), u.dof());
        for (const auto& b : law.fractional_blocks()) {
            const auto off = static_cast<Eigen::Index>(b.offset);
            const auto len = static_cast<Eigen::Index>(b.size);
            if (b.alpha == 1.0) {
                out.values().middleCols(off, len) = b.coefficient * u.values().middleCols(off, len);
            } else {
                const Trajectory part = gl_apply(u.columns(b.offset, b.size), b.alpha - 1.0);
                out.values().middleCols(off, len) = b.coefficient * part.values();
            }
        }
        return out;
    }
    const Pencil p = *law.pencil_form();
    const Trajectory integrated = d0_inv(u);
    RowMatrix values = u.values() * SpMat(p.m0.transpose());
    values += integrated.values() * SpMat(p.m1.transpose());
    return Trajectory(u.grid(), std::move(values));
}

CoercivityReport verify_coercivity(const MaterialLaw& law, double r, std::size_t n_z, std::size_t n_phi,
                                   std::uint64_t seed) {
    if (!(r > 0.0)) {
        throw ParameterError("verify_coercivity: r must be positive");
    }
    if (n_z == 0 || n_phi == 0) {
        throw ParameterError("verify_coercivity: sample counts must be at least 1");
    }
    std::mt19937_64 rng(seed);
    CoercivityReport report;
    report.r = r;
    report.c_est = std::numeric_limits<double>::infinity();
    report.n_samples = n_z * n_phi;

    const bool diagonal = law.is_diagonal();
    const bool dense = !diagonal && law.dof() <= kDenseEigenLimit;
    if (diagonal || dense) {
        report.c_eig = std::numeric_limits<double>::infinity();
    }

    for (std::size_t iz = 0; iz < n_z; ++iz) {
        const Complex z = sample_disc(rng, r);
        for (std::size_t ip = 0; ip < n_phi; ++ip) {
            const CVector phi = random_unit(rng, law.dof());
            const CVector image = law.apply_at(z, phi) / z;
            const double value = phi.dot(image).real();
            if (value < report.c_est) {
                report.c_est = value;
                report.worst_z = z;
            }
        }
        if (diagonal) {
            const CVector d = law.diagonal_at(z) / z;
            report.c_eig = std::min(*report.c_eig, d.real().minCoeff());
        } else if (dense) {
            const CMatrix b = law.dense_at(z) / z;
            const CMatrix h = 0.5 * (b + b.adjoint());
            Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
            report.c_eig = std::min(*report.c_eig, es.eigenvalues().minCoeff());
        }
    }
    return report;
}

double LipschitzBudget::q(double nu) const {
    if (!(nu > 0.0)) {
        throw ParameterError("LipschitzBudget::q: nu must be positive");
    }
    return lipschitz / (c * std::sqrt(2.0 * nu));
}

LipschitzBudget lipschitz_budget(double c, double L) {
    if (!(c > 0.0)) {
        throw ParameterError("lipschitz_budget: c must be positive");
    }
    if (L < 0.0) {
        throw ParameterError("lipschitz_budget: L must be non-negative");
    }
    return LipschitzBudget{c, L, L * L / (2.0 * c * c)};
}

} // namespace evo
