#include "evo/spatial.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>

namespace evo {

namespace {

using Triplets = std::vector<Eigen::Triplet<Complex>>;
using Index3 = std::array<long, 3>;

// Tensor-product index set with axis 0 fastest.
struct Lattice {
    std::array<long, 3> n{1, 1, 1};

    std::size_t size() const { return static_cast<std::size_t>(n[0] * n[1] * n[2]); }

    bool contains(const Index3& i) const {
        for (int a = 0; a < 3; ++a) {
            if (i[a] < 0 || i[a] >= n[a]) {
                return false;
            }
        }
        return true;
    }

    long index(const Index3& i) const { return i[0] + n[0] * (i[1] + n[1] * i[2]); }

    Index3 unravel(long k) const {
        Index3 i{};
        i[0] = k % n[0];
        k /= n[0];
        i[1] = k % n[1];
        i[2] = k / n[1];
        return i;
    }
};

// Staggered scalar/vector layout for grad/div. s = 1: Dirichlet (points are
// interior nodes, edges are all cells along the axis); s = 0: Neumann (points
// are cell centers, edges are interior faces). Edge e along axis a joins
// points e - s and e - s + 1.
struct GradLayout {
    int dim = 1;
    long s = 1;
    Lattice points;
    std::array<Lattice, 3> edges;
    std::array<std::size_t, 3> edge_offset{};
    std::size_t n_edges = 0;
};

GradLayout grad_layout(const SpaceDescriptor& space, bool dirichlet) {
    GradLayout g;
    g.dim = space.dimension();
    g.s = dirichlet ? 1 : 0;
    for (int a = 0; a < g.dim; ++a) {
        g.points.n[a] = static_cast<long>(space.n_cells(a)) - g.s;
    }
    for (int a = 0; a < g.dim; ++a) {
        g.edges[a] = g.points;
        g.edges[a].n[a] = g.points.n[a] + 2 * g.s - 1;
        g.edge_offset[a] = g.n_edges;
        g.n_edges += g.edges[a].size();
    }
    return g;
}

double point_coord(const SpaceDescriptor& space, int axis, long i, long s) {
    const double offset = s == 1 ? 1.0 : 0.5;
    return (static_cast<double>(i) + offset) * space.h(axis);
}

double edge_coord(const SpaceDescriptor& space, int axis, long e, long s) {
    const double offset = s == 1 ? 0.5 : 1.0;
    return (static_cast<double>(e) + offset) * space.h(axis);
}

SpMat from_triplets(long rows, long cols, const Triplets& t) {
    SpMat m(rows, cols);
    m.setFromTriplets(t.begin(), t.end());
    m.makeCompressed();
    return m;
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

// Block matrix [[0, top_right], [bottom_left, 0]] with square diagonal blocks.
SpMat off_diagonal_block(const SpMat& top_right, const SpMat& bottom_left) {
    const long n_top = top_right.rows();
    const long n = n_top + bottom_left.rows();
    Triplets t;
    t.reserve(static_cast<std::size_t>(top_right.nonZeros() + bottom_left.nonZeros()));
    for (int k = 0; k < top_right.outerSize(); ++k) {
        for (SpMat::InnerIterator it(top_right, k); it; ++it) {
            t.emplace_back(it.row(), n_top + it.col(), it.value());
        }
    }
    for (int k = 0; k < bottom_left.outerSize(); ++k) {
        for (SpMat::InnerIterator it(bottom_left, k); it; ++it) {
            t.emplace_back(n_top + it.row(), it.col(), it.value());
        }
    }
    return from_triplets(n, n, t);
}

SpMat build_grad(const SpaceDescriptor& space, const GradLayout& g) {
    Triplets t;
    for (int a = 0; a < g.dim; ++a) {
        const double inv_h = 1.0 / space.h(a);
        const Lattice& edges = g.edges[a];
        for (long k = 0; k < static_cast<long>(edges.size()); ++k) {
            const Index3 e = edges.unravel(k);
            const long row = static_cast<long>(g.edge_offset[a]) + k;
            Index3 lo = e;
            lo[a] = e[a] - g.s;
            Index3 hi = e;
            hi[a] = e[a] - g.s + 1;
            if (g.points.contains(hi)) {
                t.emplace_back(row, g.points.index(hi), Complex{inv_h, 0.0});
            }
            if (g.points.contains(lo)) {
                t.emplace_back(row, g.points.index(lo), Complex{-inv_h, 0.0});
            }
        }
    }
    return from_triplets(static_cast<long>(g.n_edges), static_cast<long>(g.points.size()), t);
}

std::vector<Point> grad_positions(const SpaceDescriptor& space, const GradLayout& g) {
    std::vector<Point> pos;
    pos.reserve(g.points.size() + g.n_edges);
    for (long k = 0; k < static_cast<long>(g.points.size()); ++k) {
        const Index3 i = g.points.unravel(k);
        Point p{0.0, 0.0, 0.0};
        for (int b = 0; b < g.dim; ++b) {
            p[b] = point_coord(space, b, i[b], g.s);
        }
        pos.push_back(p);
    }
    for (int a = 0; a < g.dim; ++a) {
        for (long k = 0; k < static_cast<long>(g.edges[a].size()); ++k) {
            const Index3 e = g.edges[a].unravel(k);
            Point p{0.0, 0.0, 0.0};
            for (int b = 0; b < g.dim; ++b) {
                p[b] = b == a ? edge_coord(space, b, e[b], g.s) : point_coord(space, b, e[b], g.s);
            }
            pos.push_back(p);
        }
    }
    return pos;
}

// Yee lattice on a 3D box. E_c: cells along c, interior nodes along the other
// two axes. H_c: all nodes along c, cells along the other two axes.
struct YeeLayout {
    std::array<long, 3> n{};
    std::array<Lattice, 3> e;
    std::array<Lattice, 3> h;
    std::array<std::size_t, 3> e_offset{};
    std::array<std::size_t, 3> h_offset{};
    std::size_t n_e = 0;
    std::size_t n_h = 0;
};

YeeLayout yee_layout(const SpaceDescriptor& space) {
    if (space.dimension() != 3) {
        throw ParameterError("Yee lattice requires dimension 3, got " + std::to_string(space.dimension()));
    }
    YeeLayout y;
    for (int a = 0; a < 3; ++a) {
        y.n[a] = static_cast<long>(space.n_cells(a));
        if (y.n[a] < 2) {
            throw ParameterError("Yee lattice needs at least 2 cells per axis");
        }
    }
    for (int c = 0; c < 3; ++c) {
        for (int a = 0; a < 3; ++a) {
            y.e[c].n[a] = a == c ? y.n[a] : y.n[a] - 1;
            y.h[c].n[a] = a == c ? y.n[a] + 1 : y.n[a];
        }
        y.e_offset[c] = y.n_e;
        y.n_e += y.e[c].size();
        y.h_offset[c] = y.n_h;
        y.n_h += y.h[c].size();
    }
    return y;
}

// Row of E_comp at cell index `cell` along comp and node indices elsewhere;
// -1 when the edge lies on the boundary (tangential E vanishes there).
long e_row(const YeeLayout& y, int comp, Index3 idx) {
    for (int a = 0; a < 3; ++a) {
        if (a != comp) {
            if (idx[a] < 1 || idx[a] > y.n[a] - 1) {
                return -1;
            }
            idx[a] -= 1;
        }
    }
    if (!y.e[comp].contains(idx)) {
        return -1;
    }
    return static_cast<long>(y.e_offset[comp]) + y.e[comp].index(idx);
}

} // namespace

SpaceDescriptor SpaceDescriptor::box(int dimension, Point extent, std::array<std::size_t, 3> n_cells) {
    if (dimension < 1 || dimension > 3) {
        throw ParameterError("SpaceDescriptor: dimension must be 1, 2 or 3, got " + std::to_string(dimension));
    }
    SpaceDescriptor s;
    s.dimension_ = dimension;
    for (int a = 0; a < 3; ++a) {
        const auto k = static_cast<std::size_t>(a);
        if (a < dimension) {
            if (n_cells[k] == 0) {
                throw ParameterError("SpaceDescriptor: axis " + std::to_string(a) + " has zero cells");
            }
            if (!(extent[k] > 0.0)) {
                throw ParameterError("SpaceDescriptor: axis " + std::to_string(a) + " has non-positive extent");
            }
            s.extent_[k] = extent[k];
            s.n_cells_[k] = n_cells[k];
        } else {
            s.extent_[k] = 1.0;
            s.n_cells_[k] = 1;
        }
    }
    return s;
}

SpaceDescriptor SpaceDescriptor::unit(int dimension, std::size_t n) {
    return box(dimension, {1.0, 1.0, 1.0}, {n, n, n});
}

const FieldBlock& SpaceDescriptor::block(const std::string& name) const {
    for (const auto& b : layout_) {
        if (b.name == name) {
            return b;
        }
    }
    throw ShapeError("SpaceDescriptor: no field block named '" + name + "'");
}

bool SpaceDescriptor::has_block(const std::string& name) const noexcept {
    return std::any_of(layout_.begin(), layout_.end(), [&](const FieldBlock& b) { return b.name == name; });
}

std::size_t SpaceDescriptor::dof() const noexcept {
    std::size_t n = 0;
    for (const auto& b : layout_) {
        n += b.size;
    }
    return n;
}

SpaceDescriptor SpaceDescriptor::with_layout(std::vector<FieldBlock> layout, std::vector<Point> positions) const {
    std::size_t cursor = 0;
    for (const auto& b : layout) {
        if (b.offset != cursor) {
            throw ShapeError("SpaceDescriptor: layout block '" + b.name + "' is not contiguous");
        }
        cursor += b.size;
    }
    if (positions.size() != cursor) {
        throw ShapeError("SpaceDescriptor: positions do not match layout size");
    }
    SpaceDescriptor out = *this;
    out.layout_ = std::move(layout);
    out.positions_ = std::move(positions);
    return out;
}

double BlockOperator::skew_residual() const {
    const SpMat adj = SpMat(matrix.adjoint());
    if (weight) {
        const SpMat r = SpMat(*weight * matrix) + SpMat(adj * *weight);
        return max_abs(r);
    }
    return max_abs(SpMat(matrix + adj));
}

BlockOperator BlockOperator::negated() const {
    BlockOperator out = *this;
    out.matrix = -matrix;
    return out;
}

const SpMat& BlockOperator::part(const std::string& name) const {
    const auto it = parts.find(name);
    if (it == parts.end()) {
        throw ShapeError("BlockOperator: no part named '" + name + "'");
    }
    return it->second;
}

BlockOperator build_grad_div(const SpaceDescriptor& space, bool dirichlet_on_grad) {
    if (dirichlet_on_grad) {
        for (int a = 0; a < space.dimension(); ++a) {
            if (space.n_cells(a) < 2) {
                throw ParameterError("build_grad_div: Dirichlet layout needs at least 2 cells per axis");
            }
        }
    }
    const GradLayout g = grad_layout(space, dirichlet_on_grad);
    SpMat grad = build_grad(space, g);
    SpMat div = SpMat(-SpMat(grad.transpose()));

    BlockOperator op{space.with_layout({{"u", 0, g.points.size()}, {"q", g.points.size(), g.n_edges}},
                                       grad_positions(space, g)),
                     off_diagonal_block(div, grad), dirichlet_on_grad ? "grad" : "div", {}, std::nullopt};
    op.parts.emplace("grad", std::move(grad));
    op.parts.emplace("div", std::move(div));
    return op;
}

BlockOperator build_curl_pair(const SpaceDescriptor& space) {
    const YeeLayout y = yee_layout(space);
    Triplets t;
    for (int c = 0; c < 3; ++c) {
        const int a = (c + 1) % 3;
        const int b = (c + 2) % 3;
        const double inv_ha = 1.0 / space.h(a);
        const double inv_hb = 1.0 / space.h(b);
        for (long k = 0; k < static_cast<long>(y.h[c].size()); ++k) {
            const Index3 hidx = y.h[c].unravel(k);
            const long row = static_cast<long>(y.h_offset[c]) + k;
            // + d_a E_b: E_b sits on nodes along a and c, cell m_b along b.
            Index3 eb = hidx;
            eb[a] = hidx[a] + 1;
            if (const long col = e_row(y, b, eb); col >= 0) {
                t.emplace_back(row, col, Complex{inv_ha, 0.0});
            }
            eb[a] = hidx[a];
            if (const long col = e_row(y, b, eb); col >= 0) {
                t.emplace_back(row, col, Complex{-inv_ha, 0.0});
            }
            // - d_b E_a
            Index3 ea = hidx;
            ea[b] = hidx[b] + 1;
            if (const long col = e_row(y, a, ea); col >= 0) {
                t.emplace_back(row, col, Complex{-inv_hb, 0.0});
            }
            ea[b] = hidx[b];
            if (const long col = e_row(y, a, ea); col >= 0) {
                t.emplace_back(row, col, Complex{inv_hb, 0.0});
            }
        }
    }
    SpMat icurl = from_triplets(static_cast<long>(y.n_h), static_cast<long>(y.n_e), t);
    SpMat curl = SpMat(icurl.transpose());

    std::vector<Point> pos;
    pos.reserve(y.n_e + y.n_h);
    for (int c = 0; c < 3; ++c) {
        for (long k = 0; k < static_cast<long>(y.e[c].size()); ++k) {
            const Index3 i = y.e[c].unravel(k);
            Point p{};
            for (int a = 0; a < 3; ++a) {
                p[a] = (a == c ? static_cast<double>(i[a]) + 0.5 : static_cast<double>(i[a] + 1)) * space.h(a);
            }
            pos.push_back(p);
        }
    }
    for (int c = 0; c < 3; ++c) {
        for (long k = 0; k < static_cast<long>(y.h[c].size()); ++k) {
            const Index3 i = y.h[c].unravel(k);
            Point p{};
            for (int a = 0; a < 3; ++a) {
                p[a] = (a == c ? static_cast<double>(i[a]) : static_cast<double>(i[a]) + 0.5) * space.h(a);
            }
            pos.push_back(p);
        }
    }

    BlockOperator op{space.with_layout({{"E", 0, y.n_e}, {"H", y.n_e, y.n_h}}, std::move(pos)),
                     off_diagonal_block(SpMat(-curl), icurl), "icurl", {}, std::nullopt};
    op.parts.emplace("icurl", std::move(icurl));
    op.parts.emplace("curl", std::move(curl));
    return op;
}

SpMat build_node_gradient(const SpaceDescriptor& space) {
    const YeeLayout y = yee_layout(space);
    Lattice nodes;
    for (int a = 0; a < 3; ++a) {
        nodes.n[a] = y.n[a] - 1;
    }
    Triplets t;
    for (int c = 0; c < 3; ++c) {
        const double inv_h = 1.0 / space.h(c);
        for (long k = 0; k < static_cast<long>(y.e[c].size()); ++k) {
            const Index3 i = y.e[c].unravel(k);
            const long row = static_cast<long>(y.e_offset[c]) + k;
            // E_c cell i[c] joins nodes i[c] and i[c] + 1; interior node j maps to j - 1.
            Index3 hi = i;
            hi[c] = i[c];
            Index3 lo = i;
            lo[c] = i[c] - 1;
            if (nodes.contains(hi)) {
                t.emplace_back(row, nodes.index(hi), Complex{inv_h, 0.0});
            }
            if (nodes.contains(lo)) {
                t.emplace_back(row, nodes.index(lo), Complex{-inv_h, 0.0});
            }
        }
    }
    return from_triplets(static_cast<long>(y.n_e), static_cast<long>(nodes.size()), t);
}

BlockOperator build_laplacian_block(const SpaceDescriptor& space) {
    const BlockOperator gd = build_grad_div(space, true);
    const SpMat& grad = gd.part("grad");
    const SpMat stiff = SpMat(SpMat(grad.transpose()) * grad);
    const long n = stiff.rows();

    SpMat identity(n, n);
    identity.setIdentity();
    SpMat matrix = off_diagonal_block(identity, SpMat(-stiff));

    Triplets wt;
    for (int k = 0; k < stiff.outerSize(); ++k) {
        for (SpMat::InnerIterator it(stiff, k); it; ++it) {
            wt.emplace_back(it.row(), it.col(), it.value());
        }
    }
    for (long i = 0; i < n; ++i) {
        wt.emplace_back(n + i, n + i, Complex{1.0, 0.0});
    }

    const std::vector<Point>& node_pos = gd.space.positions();
    std::vector<Point> pos(node_pos.begin(), node_pos.begin() + n);
    pos.insert(pos.end(), node_pos.begin(), node_pos.begin() + n);

    const auto un = static_cast<std::size_t>(n);
    BlockOperator op{space.with_layout({{"u", 0, un}, {"w", un, un}}, std::move(pos)), std::move(matrix),
                     "laplacian", {}, from_triplets(2 * n, 2 * n, wt)};
    op.parts.emplace("grad", grad);
    op.parts.emplace("laplacian", SpMat(-stiff));
    return op;
}

MaterialLaw apply_variable_coefficient(const CellCoefficients& cells, const BlockOperator& op) {
    const SpaceDescriptor& space = op.space;
    const int dim = space.dimension();
    if (cells.dimension != dim) {
        throw ShapeError("apply_variable_coefficient: coefficient dimension " + std::to_string(cells.dimension) +
                         " differs from space dimension " + std::to_string(dim));
    }
    if (op.bc_tag != "grad" && op.bc_tag != "div") {
        throw ParameterError("apply_variable_coefficient: operator is not a grad/div block");
    }
    const bool dirichlet = op.bc_tag == "grad";
    const GradLayout g = grad_layout(space, dirichlet);

    Lattice cell_lattice;
    for (int a = 0; a < dim; ++a) {
        cell_lattice.n[a] = static_cast<long>(space.n_cells(a));
    }
    if (cells.a.size() != cell_lattice.size()) {
        throw ShapeError("apply_variable_coefficient: expected " + std::to_string(cell_lattice.size()) +
                         " cell matrices, got " + std::to_string(cells.a.size()));
    }

    // Diagonal of a^{-1} per cell.
    std::vector<std::array<double, 3>> inv_diag(cells.a.size());
    for (std::size_t c = 0; c < cells.a.size(); ++c) {
        const auto& entries = cells.a[c];
        if (entries.size() != static_cast<std::size_t>(dim * dim)) {
            throw ShapeError("apply_variable_coefficient: cell " + std::to_string(c) + " has " +
                             std::to_string(entries.size()) + " entries");
        }
        Eigen::MatrixXd m(dim, dim);
        for (int i = 0; i < dim; ++i) {
            for (int j = 0; j < dim; ++j) {
                m(i, j) = entries[static_cast<std::size_t>(i * dim + j)];
            }
        }
        const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
        if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-14 * scale) {
            throw ParameterError("apply_variable_coefficient: coefficient in cell " + std::to_string(c) +
                                 " is not symmetric");
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
        const double lo = es.eigenvalues().minCoeff();
        if (!(lo > 0.0)) {
            throw ParameterError("apply_variable_coefficient: coefficient in cell " + std::to_string(c) +
                                 " is not positive definite (smallest eigenvalue " + std::to_string(lo) + ")");
        }
        const Eigen::MatrixXd inv = m.inverse();
        for (int i = 0; i < dim; ++i) {
            inv_diag[c][static_cast<std::size_t>(i)] = inv(i, i);
        }
    }

    const long n_u = static_cast<long>(g.points.size());
    const long n = n_u + static_cast<long>(g.n_edges);
    Triplets t0;
    Triplets t1;
    for (long i = 0; i < n_u; ++i) {
        t1.emplace_back(i, i, Complex{1.0, 0.0});
    }
    for (int a = 0; a < dim; ++a) {
        for (long k = 0; k < static_cast<long>(g.edges[a].size()); ++k) {
            const Index3 e = g.edges[a].unravel(k);
            // Cells touched by this edge: along a, the cell it spans (Dirichlet)
            // or the two cells it separates (Neumann); along the others, the
            // two cells around a node (Dirichlet) or the cell itself (Neumann).
            std::array<std::array<long, 2>, 3> range{};
            for (int b = 0; b < 3; ++b) {
                if (b >= dim) {
                    range[b] = {0, 0};
                } else if (b == a) {
                    range[b] = dirichlet ? std::array<long, 2>{e[b], e[b]} : std::array<long, 2>{e[b], e[b] + 1};
                } else {
                    range[b] = dirichlet ? std::array<long, 2>{e[b], e[b] + 1} : std::array<long, 2>{e[b], e[b]};
                }
            }
            double sum = 0.0;
            int count = 0;
            for (long i2 = range[2][0]; i2 <= range[2][1]; ++i2) {
                for (long i1 = range[1][0]; i1 <= range[1][1]; ++i1) {
                    for (long i0 = range[0][0]; i0 <= range[0][1]; ++i0) {
                        const Index3 c{i0, i1, i2};
                        sum += inv_diag[static_cast<std::size_t>(cell_lattice.index(c))][static_cast<std::size_t>(a)];
                        ++count;
                    }
                }
            }
            const long row = n_u + static_cast<long>(g.edge_offset[a]) + k;
            t0.emplace_back(row, row, Complex{sum / count, 0.0});
        }
    }
    return MaterialLaw::pencil(from_triplets(n, n, t0), from_triplets(n, n, t1));
}

std::vector<double> dirichlet_laplacian_eigenvalues(std::size_t n, double length) {
    if (n < 2) {
        throw ParameterError("dirichlet_laplacian_eigenvalues: need at least 2 cells");
    }
    const double h = length / static_cast<double>(n);
    std::vector<double> out;
    out.reserve(n - 1);
    for (std::size_t k = 1; k < n; ++k) {
        const double s = std::sin(static_cast<double>(k) * std::numbers::pi / (2.0 * static_cast<double>(n)));
        out.push_back(4.0 / (h * h) * s * s);
    }
    return out;
}

} // namespace evo
