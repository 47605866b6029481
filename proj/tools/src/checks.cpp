#include "evo/cli/checks.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <stdexcept>

#include "evo/cli/runner.hpp"
#include "evo/models.hpp"

namespace evo::cli {

namespace {

using Clock = std::chrono::steady_clock;

SuiteResult timed(const std::string& name, const std::function<void(std::vector<Check>&)>& body) {
    SuiteResult r;
    r.suite = name;
    const auto t0 = Clock::now();
    body(r.checks);
    r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    return r;
}

Trajectory random_trajectory(const TimeGrid& grid, std::size_t dof, std::mt19937_64& rng, std::size_t zero_rows = 0) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Trajectory u(grid, dof);
    for (std::size_t n = zero_rows; n < grid.n_steps(); ++n) {
        for (std::size_t i = 0; i < dof; ++i) {
            u.values()(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(i)) = Complex{normal(rng), normal(rng)};
        }
    }
    return u;
}

double max_abs(const RowMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

ModelSpec small_spec(ModelName name, std::size_t n_cells) {
    ModelSpec s;
    s.name = name;
    s.n_cells = n_cells;
    if (name == ModelName::Maxwell) {
        s.dimension = 3;
    }
    return s;
}

// Affine sigma with intercept c0 whose computed Lipschitz bound equals L.
void set_affine_sigma(Model& m, double c0, double L) {
    const double b = SigmaSpec::affine(0.0, 1.0, 0.0).lipschitz_bound(m.lambdas, m.embedding);
    m.spec.sigma = SigmaSpec::affine(c0, L / b, L);
}

// Forcing supported on the first field block only.
Trajectory random_block_forcing(const Model& m, const TimeGrid& grid, std::mt19937_64& rng) {
    Trajectory f(grid, m.dof());
    const FieldBlock& b = m.block(m.noise_block);
    const Trajectory r = random_trajectory(grid, b.size, rng);
    f.values().middleCols(static_cast<Eigen::Index>(b.offset), static_cast<Eigen::Index>(b.size)) = r.values();
    return f;
}

double block_max_diff(const Trajectory& a, const Trajectory& b, const FieldBlock& blk, double sign) {
    const auto off = static_cast<Eigen::Index>(blk.offset);
    const auto len = static_cast<Eigen::Index>(blk.size);
    return max_abs(a.values().middleCols(off, len) - sign * b.values().middleCols(off, len));
}

// Minimum over a polar grid of B(r, r) of the smallest real part of the
// diagonal of z^{-1} M(z).
double coercivity_grid(const MaterialLaw& law, double r) {
    double best = std::numeric_limits<double>::infinity();
    const int n_rho = 100;
    const int n_theta = 256;
    for (int a = 0; a <= n_rho; ++a) {
        const double rho = r * static_cast<double>(a) / n_rho;
        for (int t = 0; t < n_theta; ++t) {
            const double theta = 2.0 * std::numbers::pi * t / n_theta;
            const Complex z = Complex{r, 0.0} + std::polar(rho, theta);
            if (std::abs(z) < r * 1e-6) {
                continue;
            }
            const CVector d = law.diagonal_at(z) / z;
            best = std::min(best, d.real().minCoeff());
        }
    }
    return best;
}

} // namespace

Check check_le(std::string name, double measured, double bound) {
    return Check{std::move(name), measured, bound, "<=", measured <= bound};
}

Check check_ge(std::string name, double measured, double bound) {
    return Check{std::move(name), measured, bound, ">=", measured >= bound};
}

bool SuiteResult::passed() const noexcept {
    for (const auto& c : checks) {
        if (!c.pass) {
            return false;
        }
    }
    return !checks.empty();
}

SuiteResult operator_suite(const VerifyOptions& options) {
    return timed("operators", [&](std::vector<Check>& out) {
        const double tol = 1e-12;
        const std::size_t sizes[] = {16, 8, 6};
        for (int dim = 1; dim <= 3; ++dim) {
            const SpaceDescriptor space = SpaceDescriptor::unit(dim, sizes[dim - 1]);
            for (bool dirichlet : {true, false}) {
                const BlockOperator op = build_grad_div(space, dirichlet);
                out.push_back(check_le("grad_div_" + std::string(dirichlet ? "dirichlet_" : "neumann_") +
                                           std::to_string(dim) + "d",
                                       op.skew_residual(), tol));
            }
            out.push_back(check_le("laplacian_block_weighted_" + std::to_string(dim) + "d",
                                   build_laplacian_block(space).skew_residual(), tol));
        }
        const SpaceDescriptor cube = SpaceDescriptor::unit(3, 8);
        out.push_back(check_le("curl_pair_8x8x8", build_curl_pair(cube).skew_residual(), tol));
        const BlockOperator curl = build_curl_pair(cube);
        const SpMat cg = SpMat(curl.part("icurl") * build_node_gradient(cube));
        double cg_max = 0.0;
        for (int k = 0; k < cg.outerSize(); ++k) {
            for (SpMat::InnerIterator it(cg, k); it; ++it) {
                cg_max = std::max(cg_max, std::abs(it.value()));
            }
        }
        out.push_back(check_le("curl_of_gradient", cg_max, tol));

        for (ModelName name : {ModelName::Heat, ModelName::HeatVarcoef, ModelName::WaveV1, ModelName::WaveV2,
                               ModelName::Schroedinger, ModelName::Maxwell, ModelName::Fractional, ModelName::Mixed}) {
            const Model m = build(small_spec(name, name == ModelName::Maxwell ? 6 : 16));
            out.push_back(check_le("model_" + to_string(name), m.op.skew_residual(), tol));
        }
        for (ModelName name : {ModelName::Heat, ModelName::WaveV1}) {
            ModelSpec s = small_spec(name, 8);
            s.dimension = 2;
            out.push_back(check_le("model_" + to_string(name) + "_2d", build(s).op.skew_residual(), tol));
        }

        std::mt19937_64 rng = make_rng(options.seed, 1);
        const TimeGrid grid(1e-2, 200, 2.0);
        const Trajectory u = random_trajectory(grid, 5, rng);
        out.push_back(check_le("d0_inv_after_d0", max_abs((d0_inv(d0(u)) - u).values()), tol));
        out.push_back(check_le("d0_after_d0_inv", max_abs((d0(d0_inv(u)) - u).values()), tol));
    });
}

SuiteResult ito_suite(const VerifyOptions& options) {
    return timed("ito", [&](std::vector<Check>& out) {
        const double nu = 2.0;
        const double dt = 1e-2;
        const TimeGrid grid(dt, 201, nu);
        const std::size_t n_modes = 4;
        const std::size_t dof = 3;
        const auto lambdas = eigenvalues(EigenSequence::InverseSquare, n_modes);
        // Adapted integrand: Z_k[n] depends on W(t_n) only.
        const IntegrandGenerator zgen = [&](const WienerPath& path, std::uint64_t) {
            const RealRowMatrix w = path.values();
            std::vector<Trajectory> z;
            for (std::size_t k = 0; k < n_modes; ++k) {
                Trajectory zk(grid, dof);
                for (std::size_t n = 0; n < grid.n_steps(); ++n) {
                    for (std::size_t i = 0; i < dof; ++i) {
                        const double wk = w(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>((k + i) % n_modes));
                        zk.values()(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(i)) =
                            std::cos(static_cast<double>(k + i)) + 0.5 * std::tanh(wk);
                    }
                }
                z.push_back(std::move(zk));
            }
            return z;
        };
        const IsometryReport rep = verify_ito_isometry(zgen, grid, lambdas, dof, 10000, options.seed, options.threads);
        const double tol = std::max(3.0 * rep.standard_error, 5.0 * dt);
        out.push_back(check_le("isometry_ratio_deviation", std::abs(rep.ratio - 1.0), tol));
        out.push_back(check_le("isometry_standard_error", rep.standard_error, 5.0 * dt));
        out.push_back(check_le("isometry_bias_deviation", std::abs(rep.discretization_bias - 1.0), 5.0 * dt));
    });
}

SuiteResult coercivity_suite(const VerifyOptions& options) {
    return timed("coercivity", [&](std::vector<Check>& out) {
        const double bound = 0.5 - 1e-9;
        const Model heat = build(small_spec(ModelName::Heat, 16));
        const CoercivityReport hr = verify_coercivity(heat.law, 1.0, 2000, 16, options.seed);
        out.push_back(check_ge("heat_sampled_r1", hr.lower(), bound));
        out.push_back(check_ge("heat_grid_r1", coercivity_grid(heat.law, 1.0), bound));
        const Model mixed = build(small_spec(ModelName::Mixed, 18));
        out.push_back(check_ge("mixed_grid_r1", coercivity_grid(mixed.law, 1.0), bound));
        const CoercivityReport mr = verify_coercivity(mixed.law, 1.0, 2000, 16, options.seed + 1);
        out.push_back(check_ge("mixed_sampled_r1", mr.lower(), bound));
    });
}

SuiteResult contraction_suite(const VerifyOptions& options) {
    return timed("contraction", [&](std::vector<Check>& out) {
        Model m = build(small_spec(ModelName::Heat, 16));
        set_affine_sigma(m, 0.5, 1.0);
        const TimeGrid grid(1e-2, 201, 2.0);
        const SolveOptions opts{2.0, 1e-8, 40, std::nullopt};
        const std::size_t n_seeds = 20;
        std::vector<double> contraction(n_seeds, 0.0);
        std::vector<double> iterations(n_seeds, 0.0);
        std::vector<double> residual(n_seeds, 0.0);
        std::vector<double> q(n_seeds, 0.0);
        parallel_for(n_seeds, options.threads, [&](std::size_t s) {
            const WienerPath path = m.sample_path(grid, options.seed + s);
            try {
                const Solution sol = solve_multiplicative(m.problem(m.zero_forcing(grid), path), opts);
                contraction[s] = sol.report.contraction_est;
                iterations[s] = static_cast<double>(sol.report.iterations);
                residual[s] = sol.report.residual_history.back();
                q[s] = sol.report.q_bound;
            } catch (const NonConvergenceError& e) {
                contraction[s] = std::numeric_limits<double>::infinity();
                iterations[s] = static_cast<double>(opts.max_iter + 1);
                residual[s] = e.residual_history().back();
            }
        });
        const auto maxof = [](const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); };
        double q_dev = 0.0;
        for (double x : q) {
            q_dev = std::max(q_dev, std::abs(x - 0.5));
        }
        out.push_back(check_le("q_bound_deviation_from_half", q_dev, 1e-9));
        out.push_back(check_le("max_contraction_est_20_seeds", maxof(contraction), 0.6));
        out.push_back(check_le("max_iterations_20_seeds", maxof(iterations), 40.0));
        out.push_back(check_le("max_final_residual_20_seeds", maxof(residual), 1e-8));
    });
}

SuiteResult causality_suite(const VerifyOptions& options) {
    return timed("causality", [&](std::vector<Check>& out) {
        const ModelName names[] = {ModelName::Heat,         ModelName::HeatVarcoef, ModelName::WaveV1,
                                   ModelName::WaveV2,       ModelName::Schroedinger, ModelName::Maxwell,
                                   ModelName::Fractional,   ModelName::Mixed};
        const std::size_t n_cases = 100;
        const std::size_t n_iterates = 5;
        std::vector<double> prefix_det(n_cases, 0.0);
        std::vector<double> prefix_mult(n_cases, 0.0);
        std::vector<double> truncation(n_cases, 0.0);
        parallel_for(n_cases, options.threads, [&](std::size_t c) {
            std::mt19937_64 rng = make_rng(options.seed, 1000 + c);
            const ModelName name = names[c % std::size(names)];
            const std::size_t cells = name == ModelName::Maxwell ? 3 + rng() % 2 : 4 + rng() % 7;
            Model m = build(small_spec(name, cells));
            const std::size_t n_steps = 20 + rng() % 41;
            const TimeGrid grid(1e-2, n_steps, 2.0);
            const SolveOptions opts{2.0, 1e-12, 100, std::nullopt};

            // Zero prefix: deterministic solve and a linear sigma (sigma(0) = 0).
            const std::size_t m_zero = rng() % (n_steps - 1);
            const Trajectory f = random_trajectory(grid, m.dof(), rng, m_zero + 1);
            const Trajectory u = solve_deterministic(m.law, m.op, f, 2.0);
            prefix_det[c] = max_abs(u.values().topRows(static_cast<Eigen::Index>(m_zero + 1)));

            set_affine_sigma(m, 0.0, 0.5);
            const WienerPath path = m.sample_path(grid, options.seed, c);
            const EvoProblem linear = m.problem(f, path);
            PicardIteration lin(linear, opts);
            for (std::size_t k = 0; k < n_iterates; ++k) {
                lin.advance();
                prefix_mult[c] = std::max(
                    prefix_mult[c], max_abs(lin.current().values().topRows(static_cast<Eigen::Index>(m_zero + 1))));
            }

            // Truncated future increments: every iterate agrees bitwise up to the cut.
            set_affine_sigma(m, 1.0, 0.5);
            const std::size_t cut = 1 + rng() % (n_steps - 2);
            RealRowMatrix inc = path.increments();
            std::normal_distribution<double> normal(0.0, std::sqrt(grid.dt()));
            const bool redraw = rng() % 2 == 0;
            for (Eigen::Index n = static_cast<Eigen::Index>(cut) + 1; n < inc.rows(); ++n) {
                for (Eigen::Index k = 0; k < inc.cols(); ++k) {
                    inc(n, k) = redraw ? normal(rng) : 0.0;
                }
            }
            const Trajectory g = random_trajectory(grid, m.dof(), rng);
            const EvoProblem full = m.problem(g, path);
            const EvoProblem cutp = m.problem(g, path.with_increments(inc));
            PicardIteration a(full, opts);
            PicardIteration b(cutp, opts);
            const auto rows = static_cast<Eigen::Index>(cut + 1);
            for (std::size_t k = 0; k < n_iterates; ++k) {
                a.advance();
                b.advance();
                const bool same = a.current().values().topRows(rows) == b.current().values().topRows(rows);
                if (!same) {
                    truncation[c] += 1.0;
                }
            }
        });
        double det = 0.0;
        double mult = 0.0;
        double mismatched = 0.0;
        for (std::size_t c = 0; c < n_cases; ++c) {
            det = std::max(det, prefix_det[c]);
            mult = std::max(mult, prefix_mult[c]);
            mismatched += truncation[c] > 0.0 ? 1.0 : 0.0;
        }
        out.push_back(check_le("zero_prefix_deterministic_max_abs", det, 0.0));
        out.push_back(check_le("zero_prefix_multiplicative_max_abs", mult, 0.0));
        out.push_back(check_le("truncated_increments_mismatched_cases", mismatched, 0.0));
    });
}

namespace {

SuiteResult crossval_suite(const std::string& name, bool wave, const VerifyOptions& options) {
    return timed(name, [&](std::vector<Check>& out) {
        CrossValidationSettings s;
        s.seed = options.seed;
        s.threads = options.threads;
        const CrossValidationReport rep = wave ? crossval_wave(s) : crossval_heat(s);
        for (std::size_t l = 0; l < rep.rel_errors.size(); ++l) {
            out.push_back(check_le("rel_error_level_" + std::to_string(l), rep.rel_errors[l], 0.10));
        }
        for (std::size_t l = 0; l < rep.ratios.size(); ++l) {
            out.push_back(check_ge("refinement_ratio_" + std::to_string(l + 1), rep.ratios[l], 1.3));
        }
        if (rep.implicit_gap) {
            out.push_back(check_le("implicit_scheme_gap", *rep.implicit_gap, 1e-8));
        }
    });
}

} // namespace

SuiteResult crossval_wave_suite(const VerifyOptions& options) { return crossval_suite("crossval_wave", true, options); }

SuiteResult crossval_heat_suite(const VerifyOptions& options) {
    return crossval_suite("crossval_heat", false, options);
}

SuiteResult oracle_suite(const VerifyOptions& options) {
    return timed("oracles", [&](std::vector<Check>& out) {
        const Model heat = build(small_spec(ModelName::Heat, 16));
        const double dt = 1e-2;
        const TimeGrid grid(dt, 101, 2.0);
        const FieldBlock& ub = heat.block("u");
        const auto u_cols = [&](const Trajectory& u) {
            return u.values().middleCols(static_cast<Eigen::Index>(ub.offset), static_cast<Eigen::Index>(ub.size));
        };
        for (std::size_t j : {1, 2, 3}) {
            const CVector e = dirichlet_mode(heat, j);
            const double mu = dirichlet_eigenvalue(heat, j);

            Trajectory g(grid, heat.dof());
            for (std::size_t n = 0; n < grid.n_steps(); ++n) {
                g.step(n).segment(static_cast<Eigen::Index>(ub.offset), static_cast<Eigen::Index>(ub.size)) =
                    e.transpose();
            }
            const Trajectory u = solve_deterministic(heat.law, heat.op, d0_inv(g), 2.0);
            RowMatrix expect(grid.n_steps(), ub.size);
            for (std::size_t n = 0; n < grid.n_steps(); ++n) {
                expect.row(static_cast<Eigen::Index>(n)) = (1.0 - std::exp(-mu * grid.time(n))) / mu * e.transpose();
            }
            out.push_back(check_le("heat_eigenmode_forcing_j" + std::to_string(j), max_abs(u_cols(u) - expect),
                                   5.0 * dt * mu));

            EvoProblem ivp = heat.problem(heat.zero_forcing(grid));
            ivp.u0 = lift_heat_initial(heat, e);
            const Solution sol = solve_ivp(ivp, SolveOptions{2.0, 1e-10, 10, std::nullopt});
            for (std::size_t n = 0; n < grid.n_steps(); ++n) {
                expect.row(static_cast<Eigen::Index>(n)) = std::exp(-mu * grid.time(n)) * e.transpose();
            }
            out.push_back(check_le("heat_initial_decay_j" + std::to_string(j), max_abs(u_cols(sol.u) - expect),
                                   5.0 * dt * mu));
        }

        const ModelName names[] = {ModelName::Heat,         ModelName::HeatVarcoef, ModelName::WaveV1,
                                   ModelName::Schroedinger, ModelName::Maxwell,     ModelName::Fractional,
                                   ModelName::Mixed};
        std::mt19937_64 rng = make_rng(options.seed, 2);
        std::uniform_real_distribution<double> nu_dist(0.5, 4.0);
        double worst = 0.0;
        for (std::size_t c = 0; c < 50; ++c) {
            const ModelName name = names[c % std::size(names)];
            const Model m = build(small_spec(name, name == ModelName::Maxwell ? 4 : 12));
            const double nu = nu_dist(rng);
            const TimeGrid g(dt, 80, nu);
            const Trajectory f = random_trajectory(g, m.dof(), rng);
            const Trajectory u = solve_deterministic(m.law, m.op, f, nu);
            const double c_law = solver_coercivity(m.law, nu);
            worst = std::max(worst, c_law * weighted_norm(u) / weighted_norm(f));
        }
        out.push_back(check_le("solution_operator_norm_50_random", worst, 1.0 + 5.0 * dt));
    });
}

SuiteResult reduction_suite(const VerifyOptions& options) {
    return timed("reductions", [&](std::vector<Check>& out) {
        const TimeGrid grid(1e-2, 101, 2.0);
        const SolveOptions opts{2.0, 1e-10, 100, std::nullopt};
        std::mt19937_64 rng = make_rng(options.seed, 3);

        const auto single_region = [](RegionType type) {
            ModelSpec s = small_spec(ModelName::Mixed, 16);
            s.regions = {Region{type, 0.0, s.extent}};
            return s;
        };

        Model heat = build(small_spec(ModelName::Heat, 16));
        Model mixed_p = build(single_region(RegionType::Parabolic));
        out.push_back(check_le("mixed_parabolic_law_differs_from_heat", identical(heat.law, mixed_p.law) ? 0.0 : 1.0,
                               0.0));
        set_affine_sigma(heat, 1.0, 0.5);
        set_affine_sigma(mixed_p, 1.0, 0.5);
        const WienerPath path = heat.sample_path(grid, options.seed, 0);
        const Trajectory f = random_block_forcing(heat, grid, rng);
        const Solution sh = solve_multiplicative(heat.problem(f, path), opts);
        const Solution sp = solve_multiplicative(mixed_p.problem(f, path), opts);
        out.push_back(check_le("mixed_parabolic_u_vs_heat_u", block_max_diff(sp.u, sh.u, heat.block("u"), 1.0), 0.0));
        out.push_back(
            check_le("mixed_parabolic_q_vs_minus_heat_q", block_max_diff(sp.u, sh.u, heat.block("q"), -1.0), 0.0));

        Model wave = build(small_spec(ModelName::WaveV1, 16));
        Model mixed_h = build(single_region(RegionType::Hyperbolic));
        out.push_back(check_le("mixed_hyperbolic_law_differs_from_wave_v1",
                               identical(wave.law, mixed_h.law) ? 0.0 : 1.0, 0.0));
        set_affine_sigma(wave, 1.0, 0.5);
        set_affine_sigma(mixed_h, 1.0, 0.5);
        const Trajectory fw = random_block_forcing(wave, grid, rng);
        const Solution sw = solve_multiplicative(wave.problem(fw, path), opts);
        const Solution sm = solve_multiplicative(mixed_h.problem(fw, path), opts);
        out.push_back(check_le("mixed_hyperbolic_vs_wave_v1", max_abs((sm.u - sw.u).values()), 0.0));

        const Trajectory v = random_trajectory(grid, 6, rng);
        out.push_back(check_le("d0_frac_alpha1_vs_d0", max_abs((d0_frac(v, 1.0) - d0(v)).values()), 0.0));
        const MaterialLaw frac = MaterialLaw::fractional(6, {FractionalBlock{0, 6, 1.0, 1.0}});
        out.push_back(check_le("fractional_law_alpha1_is_identity", max_abs((apply_material(frac, v) - v).values()),
                               0.0));
    });
}

SuiteResult reproducibility_suite(const VerifyOptions& options) {
    return timed("reproducibility", [&](std::vector<Check>& out) {
        const nlohmann::json configs[] = {
            {{"model", {{"name", "heat"}, {"n_cells", 16}}},
             {"sigma", {{"kind", "affine"}, {"c0", 1.0}, {"c1", 0.5}}},
             {"noise", {{"n_modes", 4}}},
             {"forcing", {{"kind", "mode"}, {"mode", 1}, {"integrated", true}}},
             {"grid", {{"dt", 1e-2}, {"n_steps", 101}}},
             {"solver", {{"nu", 2.0}, {"tol", 1e-10}}},
             {"n_paths", 6},
             {"outputs", {"trajectory_csv", "report_json", "convergence_csv"}}},
            {{"model", {{"name", "schroedinger"}, {"n_cells", 16}, {"potential", 0.5}}},
             {"noise", {{"n_modes", 4}, {"additive", {{"kind", "fbm"}, {"order", 1}}}}},
             {"grid", {{"dt", 1e-2}, {"n_steps", 101}}},
             {"n_paths", 4},
             {"outputs", {"trajectory_csv", "report_json", "convergence_csv"}}},
        };
        const char* labels[] = {"heat_multiplicative", "schroedinger_additive"};
        for (std::size_t c = 0; c < std::size(configs); ++c) {
            const ExperimentConfig cfg = parse_config(configs[c]);
            std::vector<std::vector<std::string>> sums;
            for (unsigned threads : {1u, 1u, 3u}) {
                RunOptions ro;
                ro.seed = options.seed;
                ro.threads = threads;
                ro.out_dir = options.work_dir / (std::string(labels[c]) + "_" + std::to_string(sums.size()));
                const RunOutcome res = run(cfg, ro);
                std::vector<std::string> s;
                for (const auto& a : res.artifacts) {
                    s.push_back(a.checksum);
                }
                sums.push_back(s);
            }
            double mismatches = 0.0;
            for (std::size_t r = 1; r < sums.size(); ++r) {
                mismatches += sums[r] == sums[0] ? 0.0 : 1.0;
            }
            out.push_back(check_ge(std::string(labels[c]) + "_artifact_count", static_cast<double>(sums[0].size()),
                                   3.0));
            out.push_back(check_le(std::string(labels[c]) + "_checksum_mismatches_threads_1_1_3", mismatches, 0.0));
        }
    });
}

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{"operators", "ito",      "coercivity", "contraction",     "causality",
                                                "crossval",  "oracles",  "reductions", "reproducibility", "all"};
    return names;
}

std::vector<SuiteResult> run_suites(const std::string& name, const VerifyOptions& options) {
    using Fn = SuiteResult (*)(const VerifyOptions&);
    const std::vector<std::pair<std::string, std::vector<Fn>>> table{
        {"operators", {operator_suite}},
        {"ito", {ito_suite}},
        {"coercivity", {coercivity_suite}},
        {"contraction", {contraction_suite}},
        {"causality", {causality_suite}},
        {"crossval", {crossval_wave_suite, crossval_heat_suite}},
        {"oracles", {oracle_suite}},
        {"reductions", {reduction_suite}},
        {"reproducibility", {reproducibility_suite}},
    };
    std::vector<SuiteResult> results;
    for (const auto& [key, fns] : table) {
        if (name == key || name == "all") {
            for (Fn fn : fns) {
                results.push_back(fn(options));
            }
        }
    }
    if (results.empty()) {
        throw std::invalid_argument("unknown suite '" + name + "'");
    }
    return results;
}

nlohmann::json to_json(const std::vector<SuiteResult>& suites) {
    nlohmann::json doc;
    doc["command"] = "verify";
    bool all = true;
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& s : suites) {
        nlohmann::json checks = nlohmann::json::array();
        for (const auto& c : s.checks) {
            checks.push_back({{"name", c.name}, {"measured", c.measured}, {"bound", c.bound},
                              {"relation", c.relation}, {"pass", c.pass}});
        }
        arr.push_back({{"suite", s.suite}, {"passed", s.passed()}, {"checks", checks}});
        all = all && s.passed();
    }
    doc["suites"] = arr;
    doc["passed"] = all;
    return doc;
}

} // namespace evo::cli
