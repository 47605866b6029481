#pragma once

#include <random>

#include "evo/models.hpp"

namespace evo::test {

inline Trajectory random_trajectory(const TimeGrid& grid, std::size_t dof, std::uint64_t seed,
                                    std::size_t zero_rows = 0, bool complex_values = true) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Trajectory u(grid, dof);
    for (std::size_t n = zero_rows; n < grid.n_steps(); ++n) {
        for (std::size_t i = 0; i < dof; ++i) {
            const double im = complex_values ? normal(rng) : 0.0;
            u.values()(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(i)) = Complex{normal(rng), im};
        }
    }
    return u;
}

inline double max_abs(const RowMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

inline CVector random_vector(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    CVector v(static_cast<Eigen::Index>(n));
    for (auto& x : v) {
        x = Complex{normal(rng), normal(rng)};
    }
    return v;
}

// Affine sigma whose computed Lipschitz bound equals L.
inline void set_affine_sigma(Model& m, double c0, double L) {
    const double b = SigmaSpec::affine(0.0, 1.0, 0.0).lipschitz_bound(m.lambdas, m.embedding);
    m.spec.sigma = SigmaSpec::affine(c0, L / b, L);
}

inline ModelSpec spec_of(ModelName name, std::size_t n_cells = 16) {
    ModelSpec s;
    s.name = name;
    s.n_cells = n_cells;
    if (name == ModelName::Maxwell) {
        s.dimension = 3;
    }
    return s;
}

} // namespace evo::test
