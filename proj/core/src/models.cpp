#include "evo/models.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/SparseLU>

#include "evo/reference.hpp"

namespace evo {

namespace {

using Triplets = std::vector<Eigen::Triplet<Complex>>;

SpMat diagonal(const std::vector<double>& d) {
    const auto n = static_cast<Eigen::Index>(d.size());
    Triplets t;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (d[static_cast<std::size_t>(i)] != 0.0) {
            t.emplace_back(i, i, Complex{d[static_cast<std::size_t>(i)], 0.0});
        }
    }
    SpMat m(n, n);
    m.setFromTriplets(t.begin(), t.end());
    m.makeCompressed();
    return m;
}

MaterialLaw identity_law(std::size_t dof) {
    return MaterialLaw::pencil(diagonal(std::vector<double>(dof, 1.0)), diagonal(std::vector<double>(dof, 0.0)));
}

RealRowMatrix build_embedding(const SpaceDescriptor& space, const std::string& block, std::size_t n_modes,
                              bool cosine) {
    const FieldBlock& fb = space.block(block);
    RealRowMatrix e = RealRowMatrix::Zero(static_cast<Eigen::Index>(n_modes), static_cast<Eigen::Index>(space.dof()));
    const double length = space.extent(0);
    for (std::size_t k = 1; k <= n_modes; ++k) {
        for (std::size_t i = fb.offset; i < fb.offset + fb.size; ++i) {
            const double x = space.positions()[i][0];
            const double arg = static_cast<double>(k) * std::numbers::pi * x / length;
            e(static_cast<Eigen::Index>(k - 1), static_cast<Eigen::Index>(i)) =
                std::numbers::sqrt2 * (cosine ? std::cos(arg) : std::sin(arg));
        }
    }
    return e;
}

RegionType region_of(const std::vector<Region>& regions, double x) {
    for (const auto& r : regions) {
        if (x >= r.lo && x < r.hi) {
            return r.type;
        }
    }
    throw ParameterError("mixed model: position " + std::to_string(x) + " is not covered by any region");
}

MaterialLaw mixed_law(const SpaceDescriptor& space, std::vector<Region> regions) {
    const double length = space.extent(0);
    if (regions.empty()) {
        regions = {{RegionType::Hyperbolic, 0.0, length / 3.0},
                   {RegionType::Parabolic, length / 3.0, 2.0 * length / 3.0},
                   {RegionType::Elliptic, 2.0 * length / 3.0, length + 1e-12}};
    }
    for (const auto& r : regions) {
        if (!(r.hi > r.lo)) {
            throw ParameterError("mixed model: region bounds must satisfy lo < hi");
        }
    }
    for (std::size_t a = 0; a < regions.size(); ++a) {
        for (std::size_t b = a + 1; b < regions.size(); ++b) {
            if (regions[a].lo < regions[b].hi && regions[b].lo < regions[a].hi) {
                throw ParameterError("mixed model: regions overlap");
            }
        }
    }
    const FieldBlock& u = space.block("u");
    const std::size_t dof = space.dof();
    std::vector<std::uint8_t> m0(dof, 0);
    std::vector<std::uint8_t> m1(dof, 0);
    for (std::size_t i = 0; i < dof; ++i) {
        const RegionType type = region_of(regions, space.positions()[i][0]);
        const bool is_u = i >= u.offset && i < u.offset + u.size;
        // u: M0 = 1_h, M1 = 1_p + 1_e.  q: M0 = 1_p + 1_h, M1 = 1_e.
        if (is_u) {
            m0[i] = type == RegionType::Hyperbolic ? 1 : 0;
            m1[i] = type == RegionType::Hyperbolic ? 0 : 1;
        } else {
            m0[i] = type == RegionType::Elliptic ? 0 : 1;
            m1[i] = type == RegionType::Elliptic ? 1 : 0;
        }
    }
    return MaterialLaw::indicator(std::move(m0), std::move(m1));
}

} // namespace

ModelName parse_model_name(const std::string& name) {
    static const std::vector<std::pair<std::string, ModelName>> table = {
        {"heat", ModelName::Heat},
        {"heat_varcoef", ModelName::HeatVarcoef},
        {"wave_v1", ModelName::WaveV1},
        {"wave_v2", ModelName::WaveV2},
        {"schroedinger", ModelName::Schroedinger},
        {"maxwell", ModelName::Maxwell},
        {"fractional", ModelName::Fractional},
        {"mixed", ModelName::Mixed},
    };
    for (const auto& [key, value] : table) {
        if (key == name) {
            return value;
        }
    }
    throw ParameterError("unknown model '" + name + "'");
}

std::string to_string(ModelName name) {
    switch (name) {
    case ModelName::Heat:
        return "heat";
    case ModelName::HeatVarcoef:
        return "heat_varcoef";
    case ModelName::WaveV1:
        return "wave_v1";
    case ModelName::WaveV2:
        return "wave_v2";
    case ModelName::Schroedinger:
        return "schroedinger";
    case ModelName::Maxwell:
        return "maxwell";
    case ModelName::Fractional:
        return "fractional";
    case ModelName::Mixed:
        return "mixed";
    }
    return "heat";
}

RegionType parse_region_type(const std::string& name) {
    if (name == "hyperbolic") {
        return RegionType::Hyperbolic;
    }
    if (name == "parabolic") {
        return RegionType::Parabolic;
    }
    if (name == "elliptic") {
        return RegionType::Elliptic;
    }
    throw ParameterError("unknown region type '" + name + "' (expected hyperbolic, parabolic or elliptic)");
}

MaterialLaw heat_law(const SpaceDescriptor& layout) {
    const FieldBlock& u = layout.block("u");
    std::vector<double> d0(layout.dof(), 0.0);
    std::vector<double> d1(layout.dof(), 0.0);
    for (std::size_t i = 0; i < layout.dof(); ++i) {
        const bool is_u = i >= u.offset && i < u.offset + u.size;
        (is_u ? d1 : d0)[i] = 1.0;
    }
    return MaterialLaw::pencil(diagonal(d0), diagonal(d1));
}

WienerPath Model::sample_path(const TimeGrid& grid, std::uint64_t seed, std::uint64_t stream) const {
    return WienerPath::sample(grid, lambdas, embedding, seed, stream);
}

EvoProblem Model::problem(const Trajectory& forcing, std::optional<WienerPath> path) const {
    return EvoProblem{law, op, forcing, spec.sigma, std::move(path), std::nullopt, perturbation};
}

Model build(const ModelSpec& spec) {
    if (spec.n_modes == 0) {
        throw ParameterError("model: n_modes must be at least 1");
    }
    const int dim = spec.dimension;
    const SpaceDescriptor space = SpaceDescriptor::box(dim, {spec.extent, spec.extent, spec.extent},
                                                       {spec.n_cells, spec.n_cells, spec.n_cells});
    std::optional<BlockOperator> op;
    std::optional<MaterialLaw> law;
    std::string noise_block = "u";
    bool cosine = false;
    Perturbation perturbation = Perturbation::none();

    switch (spec.name) {
    case ModelName::Heat:
        op = build_grad_div(space, true);
        law = heat_law(op->space);
        break;
    case ModelName::HeatVarcoef: {
        op = build_grad_div(space, true);
        CellCoefficients cells;
        cells.dimension = dim;
        std::size_t n_cells_total = 1;
        for (int a = 0; a < dim; ++a) {
            n_cells_total *= spec.n_cells;
        }
        const double h = space.h(0);
        for (std::size_t c = 0; c < n_cells_total; ++c) {
            const double x = (static_cast<double>(c % spec.n_cells) + 0.5) * h;
            const double value =
                spec.coefficient_base + spec.coefficient_amplitude * std::sin(2.0 * std::numbers::pi * x / spec.extent);
            std::vector<double> a(static_cast<std::size_t>(dim * dim), 0.0);
            for (int i = 0; i < dim; ++i) {
                a[static_cast<std::size_t>(i * dim + i)] = value;
            }
            cells.a.push_back(std::move(a));
        }
        law = apply_variable_coefficient(cells, *op);
        break;
    }
    case ModelName::WaveV1:
        op = build_grad_div(space, true).negated();
        law = identity_law(op->space.dof());
        break;
    case ModelName::WaveV2:
        op = build_laplacian_block(space);
        law = identity_law(op->space.dof());
        break;
    case ModelName::Schroedinger: {
        const BlockOperator gd = build_grad_div(space, true);
        const SpMat& grad = gd.part("grad");
        const SpMat stiff = SpMat(SpMat(grad.transpose()) * grad);
        const FieldBlock& u = gd.space.block("u");
        std::vector<Point> pos(gd.space.positions().begin(), gd.space.positions().begin() + static_cast<long>(u.size));
        BlockOperator s{space.with_layout({{"u", 0, u.size}}, std::move(pos)), SpMat(Complex{0.0, 1.0} * stiff),
                        "laplacian", {}, std::nullopt};
        s.parts.emplace("grad", grad);
        s.parts.emplace("laplacian", SpMat(-stiff));
        op = std::move(s);
        law = identity_law(u.size);
        if (spec.potential != 0.0) {
            perturbation = Perturbation::linear(Complex{0.0, spec.potential});
        }
        break;
    }
    case ModelName::Maxwell: {
        if (dim != 3) {
            throw ParameterError("maxwell: dimension must be 3");
        }
        if (!(spec.epsilon > 0.0)) {
            throw ParameterError("maxwell: epsilon must be positive definite");
        }
        if (!(spec.mu > 0.0)) {
            throw ParameterError("maxwell: mu must be positive definite");
        }
        op = build_curl_pair(space);
        const FieldBlock& e = op->space.block("E");
        const FieldBlock& hb = op->space.block("H");
        std::vector<double> d0(op->space.dof());
        std::vector<double> d1(op->space.dof(), 0.0);
        for (std::size_t i = 0; i < e.size; ++i) {
            d0[e.offset + i] = spec.epsilon;
            d1[e.offset + i] = spec.zeta;
        }
        for (std::size_t i = 0; i < hb.size; ++i) {
            d0[hb.offset + i] = spec.mu;
        }
        law = MaterialLaw::pencil(diagonal(d0), diagonal(d1));
        noise_block = "E";
        break;
    }
    case ModelName::Fractional: {
        if (!(spec.alpha > 0.0 && spec.alpha <= 1.0)) {
            throw ParameterError("fractional: alpha must lie in (0, 1], got " + std::to_string(spec.alpha));
        }
        op = build_grad_div(space, false);
        const FieldBlock& u = op->space.block("u");
        const FieldBlock& q = op->space.block("q");
        std::vector<FractionalBlock> blocks{{u.offset, u.size, spec.alpha, 1.0}};
        if (q.size > 0) {
            blocks.push_back({q.offset, q.size, 1.0, 1.0});
        }
        law = MaterialLaw::fractional(op->space.dof(), std::move(blocks));
        cosine = true;
        break;
    }
    case ModelName::Mixed:
        op = build_grad_div(space, true).negated();
        law = mixed_law(op->space, spec.regions);
        break;
    }

    Model m{spec, std::move(*op), std::move(*law), noise_block, eigenvalues(spec.eigen_sequence, spec.n_modes),
            RealRowMatrix(), perturbation};
    m.embedding = build_embedding(m.op.space, noise_block, spec.n_modes, cosine);
    if (!spec.sigma.is_zero()) {
        spec.sigma.check_declared(m.lambdas, m.embedding);
    }
    return m;
}

CVector dirichlet_mode(const Model& model, std::size_t j) {
    if (model.spec.dimension != 1 || !model.op.space.has_block("u") || model.spec.name == ModelName::Fractional ||
        model.spec.name == ModelName::Maxwell) {
        throw ParameterError("dirichlet_mode: needs a 1D Dirichlet model");
    }
    const FieldBlock& u = model.block("u");
    CVector v(static_cast<Eigen::Index>(u.size));
    for (std::size_t i = 0; i < u.size; ++i) {
        const double x = model.op.space.positions()[u.offset + i][0];
        v(static_cast<Eigen::Index>(i)) = std::sin(static_cast<double>(j) * std::numbers::pi * x / model.spec.extent);
    }
    return v;
}

double dirichlet_eigenvalue(const Model& model, std::size_t j) {
    const double h = model.op.space.h(0);
    const double s = std::sin(static_cast<double>(j) * std::numbers::pi * h / (2.0 * model.spec.extent));
    return 4.0 / (h * h) * s * s;
}

CVector lift_heat_initial(const Model& model, const CVector& u_init) {
    const SpMat& grad = model.op.part("grad");
    const FieldBlock& u = model.block("u");
    if (static_cast<std::size_t>(u_init.size()) != u.size) {
        throw ShapeError("lift_heat_initial: u_init has the wrong size");
    }
    SpMat stiff = SpMat(SpMat(grad.transpose()) * grad);
    stiff.makeCompressed();
    Eigen::SparseLU<SpMat> lu(stiff);
    if (lu.info() != Eigen::Success) {
        throw SolverError("lift_heat_initial: stiffness matrix is singular", 0.0);
    }
    const CVector b = lu.solve(u_init);
    CVector out(static_cast<Eigen::Index>(model.dof()));
    out.segment(static_cast<Eigen::Index>(u.offset), static_cast<Eigen::Index>(u.size)) = u_init;
    const FieldBlock& q = model.block("q");
    out.segment(static_cast<Eigen::Index>(q.offset), static_cast<Eigen::Index>(q.size)) = grad * b;
    return out;
}

namespace {

enum class Reference { MildWave, Heat };

CrossValidationReport crossval(const CrossValidationSettings& s, Reference kind) {
    if (s.n_paths == 0) {
        throw ParameterError("crossval: n_paths must be at least 1");
    }
    ModelSpec spec;
    spec.name = kind == Reference::MildWave ? ModelName::WaveV1 : ModelName::Heat;
    spec.n_cells = s.n_cells;
    spec.n_modes = s.n_modes;
    Model model = build(spec);
    const SigmaSpec probe = SigmaSpec::affine(s.c0, s.c1, 0.0);
    const double lip = probe.lipschitz_bound(model.lambdas, model.embedding);
    model.spec.sigma = SigmaSpec::affine(s.c0, s.c1, lip);

    const FieldBlock& ub = model.block("u");
    const RealRowMatrix ref_embedding =
        model.embedding.middleCols(static_cast<Eigen::Index>(ub.offset), static_cast<Eigen::Index>(ub.size));
    const SineBasis basis = SineBasis::dirichlet(s.n_cells, model.spec.extent);

    const std::size_t levels = s.refinements + 1;
    const std::size_t top = std::size_t{1} << s.refinements;
    const double dt_fine = s.dt / static_cast<double>(top);
    const auto coarse_steps = static_cast<std::size_t>(std::llround(s.final_time / s.dt));
    const TimeGrid fine_grid(dt_fine, coarse_steps * top + 1, s.nu);

    std::vector<std::vector<double>> err(s.n_paths, std::vector<double>(levels));
    std::vector<std::vector<double>> ref(s.n_paths, std::vector<double>(levels));
    std::vector<double> gap(s.n_paths, 0.0);

    parallel_for(s.n_paths, s.threads, [&](std::size_t p) {
        const WienerPath fine = model.sample_path(fine_grid, s.seed, p);
        for (std::size_t l = 0; l < levels; ++l) {
            const WienerPath path = fine.coarsened(top >> l);
            const EvoProblem problem = model.problem(model.zero_forcing(path.grid()), path);
            const Solution sol = solve_multiplicative(problem, SolveOptions{s.nu, s.tol, 200, std::nullopt});
            const Trajectory u_evo = sol.u.columns(ub.offset, ub.size);
            const WienerPath ref_path = path.with_embedding(ref_embedding);
            Trajectory u_ref = kind == Reference::MildWave
                                   ? mild_wave_reference(basis, model.spec.sigma, ref_path).u
                                   : variational_heat_reference(basis, model.spec.sigma, ref_path);
            const double e = weighted_norm(u_evo - u_ref, s.nu);
            const double r = weighted_norm(u_ref, s.nu);
            err[p][l] = e * e;
            ref[p][l] = r * r;
            if (kind == Reference::Heat) {
                const Trajectory u_imp = variational_heat_reference(basis, model.spec.sigma, ref_path, nullptr,
                                                                    HeatScheme::Implicit);
                gap[p] = std::max(gap[p], weighted_norm(u_evo - u_imp, s.nu) / std::max(r, 1e-300));
            }
        }
    });

    CrossValidationReport rep;
    rep.model = kind == Reference::MildWave ? "wave_v1" : "heat";
    rep.n_paths = s.n_paths;
    for (std::size_t l = 0; l < levels; ++l) {
        double se = 0.0;
        double sr = 0.0;
        for (std::size_t p = 0; p < s.n_paths; ++p) {
            se += err[p][l];
            sr += ref[p][l];
        }
        rep.dts.push_back(s.dt / static_cast<double>(std::size_t{1} << l));
        rep.rel_errors.push_back(sr > 0.0 ? std::sqrt(se / sr) : 0.0);
        if (l > 0) {
            rep.ratios.push_back(rep.rel_errors[l - 1] / rep.rel_errors[l]);
        }
    }
    if (kind == Reference::Heat) {
        rep.implicit_gap = *std::max_element(gap.begin(), gap.end());
    }
    return rep;
}

} // namespace

CrossValidationReport crossval_wave(const CrossValidationSettings& settings) {
    return crossval(settings, Reference::MildWave);
}

CrossValidationReport crossval_heat(const CrossValidationSettings& settings) {
    return crossval(settings, Reference::Heat);
}

} // namespace evo
