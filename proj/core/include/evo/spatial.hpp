#pragma once

// Rectangular staggered grids and the skew-adjoint block operators built from
// discrete grad/div and curl pairs.

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "evo/matlaw.hpp"

namespace evo {

/// A named contiguous range of dof (e.g. "u", "q", "E", "H").
struct FieldBlock {
    std::string name;
    std::size_t offset = 0;
    std::size_t size = 0;
};

using Point = std::array<double, 3>;

/// Box [0, extent_0] x ... with n_cells per axis plus the dof layout of the
/// fields living on it. The layout is empty until an operator builder fills it.
class SpaceDescriptor {
public:
    static SpaceDescriptor box(int dimension, Point extent, std::array<std::size_t, 3> n_cells);
    /// Unit interval/square/cube with n cells per axis.
    static SpaceDescriptor unit(int dimension, std::size_t n);

    int dimension() const noexcept { return dimension_; }
    double extent(int axis) const { return extent_.at(static_cast<std::size_t>(axis)); }
    std::size_t n_cells(int axis) const { return n_cells_.at(static_cast<std::size_t>(axis)); }
    double h(int axis) const { return extent(axis) / static_cast<double>(n_cells(axis)); }

    const std::vector<FieldBlock>& layout() const noexcept { return layout_; }
    const FieldBlock& block(const std::string& name) const;
    bool has_block(const std::string& name) const noexcept;
    std::size_t dof() const noexcept;

    /// Physical location of every dof (unused axes are 0).
    const std::vector<Point>& positions() const noexcept { return positions_; }

    /// Copy with a new layout; blocks must be contiguous from 0 and match
    /// positions in length.
    SpaceDescriptor with_layout(std::vector<FieldBlock> layout, std::vector<Point> positions) const;

private:
    SpaceDescriptor() = default;

    int dimension_ = 1;
    Point extent_{1.0, 1.0, 1.0};
    std::array<std::size_t, 3> n_cells_{1, 1, 1};
    std::vector<FieldBlock> layout_;
    std::vector<Point> positions_;
};

/// Sparse block operator. `matrix` is skew-adjoint in the flat inner product,
/// or in the inner product given by `weight` when present.
struct BlockOperator {
    SpaceDescriptor space;
    SpMat matrix;
    /// Which sub-operator carries the homogeneous boundary condition
    /// ("grad", "div", "icurl" or "laplacian").
    std::string bc_tag;
    std::map<std::string, SpMat> parts;
    std::optional<SpMat> weight;

    /// max |A^dagger + A| (flat) or max |W A + A^dagger W| (weighted).
    double skew_residual() const;

    BlockOperator negated() const;
    const SpMat& part(const std::string& name) const;
};

/// Staggered grad/div block. dirichlet_on_grad = true: u on interior nodes,
/// q on edges, block (0 div; interior-grad 0). false: u on cell centers, q on
/// interior faces, block (0 interior-div; grad 0). Parts "grad" and "div".
BlockOperator build_grad_div(const SpaceDescriptor& space, bool dirichlet_on_grad);

/// Yee curl pair on a 3D box with vanishing tangential E: block
/// (0 -curl; interior-curl 0). Parts "icurl" (E -> H) and "curl" (H -> E).
BlockOperator build_curl_pair(const SpaceDescriptor& space);

/// Gradient from interior nodes to the interior E edges of the Yee lattice;
/// icurl * node_gradient vanishes.
SpMat build_node_gradient(const SpaceDescriptor& space);

/// Block (0 1; Delta 0) on (u, w), Delta = div o interior-grad with Dirichlet
/// data, together with the weight diag(grad^T grad, 1) in which it is
/// skew-adjoint.
BlockOperator build_laplacian_block(const SpaceDescriptor& space);

/// Per-cell symmetric positive definite coefficient matrices (dimension x
/// dimension, row-major, cells ordered with axis 0 fastest).
struct CellCoefficients {
    int dimension = 1;
    std::vector<std::vector<double>> a;
};

/// Heat-type pencil M0 = diag(0, a^{-1}), M1 = diag(1, 0) on the layout of a
/// grad/div operator. On the staggered layout each q dof takes the average of
/// (a^{-1})_{kk} over the cells it touches, k being its axis.
MaterialLaw apply_variable_coefficient(const CellCoefficients& cells, const BlockOperator& op);

/// Closed-form eigenvalues 4/h^2 sin^2(k pi / (2n)), k = 1..n-1, of
/// -div o interior-grad on a 1D Dirichlet grid with n cells on [0, length].
std::vector<double> dirichlet_laplacian_eigenvalues(std::size_t n, double length = 1.0);

} // namespace evo
