#include "evo/cli/runner.hpp"

#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <numbers>

#include <openssl/evp.h>

namespace evo::cli {

using nlohmann::json;

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Seed of the additive driver of path p; the driver catalog takes one seed.
std::uint64_t additive_seed(std::uint64_t seed, std::size_t p) {
    return splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(p) + 1));
}

// sin(j pi x0 / L) on Dirichlet layouts, cos on the Neumann (div) layout.
CVector mode_profile(const Model& model, const std::string& block, std::size_t j) {
    const FieldBlock& b = model.block(block);
    const bool cosine = model.op.bc_tag == "div";
    const double length = model.spec.extent;
    CVector v = CVector::Zero(static_cast<Eigen::Index>(model.dof()));
    for (std::size_t i = 0; i < b.size; ++i) {
        const double x = model.op.space.positions()[b.offset + i][0];
        const double arg = static_cast<double>(j) * std::numbers::pi * x / length;
        v[static_cast<Eigen::Index>(b.offset + i)] = cosine ? std::cos(arg) : std::sin(arg);
    }
    return v;
}

struct PathResult {
    std::optional<Trajectory> u;
    SolveReport report;
    double weighted_norm = 0.0;
    /// c ||w|| / ||rhs|| for additive runs without perturbation.
    std::optional<double> bound_ratio;
    std::exception_ptr error;
    bool non_converged = false;
    std::vector<double> failed_history;
    std::string failure;
};

json report_json(const SolveReport& r) {
    json j;
    j["iterations"] = r.iterations;
    j["residual_history"] = r.residual_history;
    j["contraction_est"] = r.contraction_est;
    j["nu_used"] = r.nu_used;
    j["c_used"] = r.c_used;
    j["q_bound"] = r.q_bound;
    j["distributional"] = r.distributional;
    if (r.initial_attainment_error) {
        j["initial_attainment_error"] = *r.initial_attainment_error;
    }
    return j;
}

json check(const std::string& name, double measured, double bound, bool pass) {
    return json{{"name", name}, {"measured", measured}, {"bound", bound}, {"pass", pass}};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw ParameterError("cannot write " + path.string());
    }
    out << text;
    if (!out) {
        throw ParameterError("write failed for " + path.string());
    }
}

std::string fmt17(double x) {
    if (x == 0.0) {
        x = 0.0;
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

struct Writer {
    const ExperimentConfig& config;
    const RunOptions& options;
    RunOutcome& outcome;

    bool wants(Output o) const {
        for (Output x : config.outputs) {
            if (x == o) {
                return true;
            }
        }
        return false;
    }

    void add(Output kind, const std::string& name) {
        const auto path = options.out_dir / name;
        outcome.artifacts.push_back({kind, path, sha256_file(path)});
    }

    void manifest() {
        std::string text;
        for (const auto& a : outcome.artifacts) {
            text += a.checksum + "  " + a.path.filename().string() + "\n";
        }
        write_text(options.out_dir / "manifest.txt", text);
    }
};

bool all_pass(const json& checks) {
    for (const auto& c : checks) {
        if (!c.at("pass").get<bool>()) {
            return false;
        }
    }
    return true;
}

RunOutcome run_crossval(const ExperimentConfig& config, const RunOptions& options, std::uint64_t seed) {
    const CrossvalConfig& cv = *config.crossval;
    CrossValidationSettings s = cv.settings;
    s.seed = seed;
    s.threads = options.threads;
    const CrossValidationReport rep = cv.reference == "mild_wave" ? crossval_wave(s) : crossval_heat(s);

    RunOutcome outcome;
    Writer w{config, options, outcome};
    json checks = json::array();
    checks.push_back(check("finest_rel_error", rep.rel_errors.back(), cv.max_rel_error,
                           rep.rel_errors.back() <= cv.max_rel_error));
    for (std::size_t l = 0; l < rep.ratios.size(); ++l) {
        checks.push_back(check("refinement_ratio_" + std::to_string(l + 1), rep.ratios[l], cv.min_ratio,
                               rep.ratios[l] >= cv.min_ratio));
    }
    if (rep.implicit_gap) {
        checks.push_back(check("implicit_scheme_gap", *rep.implicit_gap, 1e-8, *rep.implicit_gap <= 1e-8));
    }

    if (w.wants(Output::ConvergenceCsv)) {
        std::string text = "level,dt,rel_error,ratio\n";
        for (std::size_t l = 0; l < rep.dts.size(); ++l) {
            text += std::to_string(l) + "," + fmt17(rep.dts[l]) + "," + fmt17(rep.rel_errors[l]) + "," +
                    (l == 0 ? std::string() : fmt17(rep.ratios[l - 1])) + "\n";
        }
        write_text(options.out_dir / "convergence.csv", text);
        w.add(Output::ConvergenceCsv, "convergence.csv");
    }
    if (w.wants(Output::ReportJson)) {
        json doc;
        doc["command"] = "run";
        doc["mode"] = "crossval";
        doc["reference"] = cv.reference;
        doc["model"] = rep.model;
        doc["seed"] = seed;
        doc["settings"] = {{"n_cells", s.n_cells}, {"n_modes", s.n_modes},       {"dt", s.dt},
                           {"refinements", s.refinements}, {"final_time", s.final_time},
                           {"n_paths", s.n_paths},         {"nu", s.nu},             {"c0", s.c0},
                           {"c1", s.c1},                   {"tol", s.tol}};
        doc["dts"] = rep.dts;
        doc["rel_errors"] = rep.rel_errors;
        doc["ratios"] = rep.ratios;
        if (rep.implicit_gap) {
            doc["implicit_gap"] = *rep.implicit_gap;
        }
        doc["checks"] = checks;
        doc["status"] = all_pass(checks) ? "ok" : "check_failed";
        write_json(options.out_dir / "report.json", doc);
        w.add(Output::ReportJson, "report.json");
    }
    w.manifest();
    if (!all_pass(checks)) {
        outcome.exit_code = kVerification;
        outcome.message = "cross-validation thresholds not met";
    }
    return outcome;
}

} // namespace

Model build_model(const ExperimentConfig& config) {
    ModelSpec spec = config.model;
    spec.sigma = SigmaSpec::zero();
    Model model = build(spec);
    const SigmaConfig& s = config.sigma;
    if (s.kind == "zero") {
        return model;
    }
    const SigmaSpec probe =
        s.kind == "affine" ? SigmaSpec::affine(s.c0, s.c1, 0.0) : SigmaSpec::pointwise(s.function, s.gain, 0.0);
    const double bound = probe.lipschitz_bound(model.lambdas, model.embedding);
    const double declared = s.lipschitz.value_or(bound);
    model.spec.sigma = s.kind == "affine" ? SigmaSpec::affine(s.c0, s.c1, declared)
                                          : SigmaSpec::pointwise(s.function, s.gain, declared);
    try {
        model.spec.sigma.check_declared(model.lambdas, model.embedding);
    } catch (const ParameterError& e) {
        throw ConfigError("sigma.lipschitz", e.what());
    }
    return model;
}

Trajectory build_forcing(const ExperimentConfig& config, const Model& model, const TimeGrid& grid) {
    Trajectory f(grid, model.dof());
    const ForcingConfig& fc = config.forcing;
    if (fc.kind == "zero") {
        return f;
    }
    const std::string block = fc.block.empty() ? model.noise_block : fc.block;
    if (!model.op.space.has_block(block)) {
        throw ConfigError("forcing.block", "model " + to_string(model.spec.name) + " has no block '" + block + "'");
    }
    const CVector profile = fc.amplitude * mode_profile(model, block, fc.mode);
    for (std::size_t n = 0; n < grid.n_steps(); ++n) {
        if (fc.until && grid.time(n) >= *fc.until) {
            break;
        }
        f.step(n) = profile.transpose();
    }
    return fc.integrated ? d0_inv(f) : f;
}

std::optional<CVector> build_initial(const ExperimentConfig& config, const Model& model) {
    const InitialConfig& ic = config.initial;
    if (ic.kind == "none") {
        return std::nullopt;
    }
    switch (model.spec.name) {
    case ModelName::Fractional:
        throw ConfigError("initial", "initial states need a pencil law; fractional is not one");
    case ModelName::HeatVarcoef:
        throw ConfigError("initial", "initial states are not supported for heat_varcoef");
    default:
        break;
    }
    const CVector full = ic.amplitude * mode_profile(model, model.noise_block, ic.mode);
    if (model.spec.name == ModelName::Heat) {
        const FieldBlock& u = model.block("u");
        return lift_heat_initial(model, full.segment(static_cast<Eigen::Index>(u.offset),
                                                     static_cast<Eigen::Index>(u.size)));
    }
    return full;
}

RunOutcome run(const ExperimentConfig& config, const RunOptions& options) {
    if (options.threads == 0) {
        throw ConfigError("--threads", "must be at least 1");
    }
    std::filesystem::create_directories(options.out_dir);
    const std::uint64_t seed = options.seed.value_or(config.seed);
    if (config.crossval) {
        return run_crossval(config, options, seed);
    }

    const Model model = build_model(config);
    const TimeGrid grid(config.grid.dt, config.grid.n_steps, config.solver.nu);
    const Trajectory forcing = build_forcing(config, model, grid);
    const std::optional<CVector> u0 = build_initial(config, model);
    const SolveOptions solve{config.solver.nu, config.solver.tol, config.solver.max_iter, std::nullopt};
    const bool stochastic = !model.spec.sigma.is_zero();
    const std::string mode = config.additive ? "additive" : (u0 ? "ivp" : "multiplicative");

    std::vector<PathResult> results(config.n_paths);
    parallel_for(config.n_paths, options.threads, [&](std::size_t p) {
        PathResult& r = results[p];
        try {
            if (config.additive) {
                const AdditiveConfig& add = *config.additive;
                const Trajectory x = sample_additive(add.kind, grid, model.lambdas, model.embedding,
                                                     additive_seed(seed, p), add.params);
                AdditiveSolution sol =
                    solve_additive(model.law, model.op, forcing, x, add.order, solve, model.perturbation);
                if (model.perturbation.is_none()) {
                    Trajectory rhs = forcing;
                    for (unsigned k = 0; k < add.order; ++k) {
                        rhs = d0_inv(rhs);
                    }
                    rhs += x;
                    const double rn = weighted_norm(rhs);
                    r.bound_ratio = rn > 0.0 ? sol.report.c_used * weighted_norm(sol.w) / rn : 0.0;
                }
                r.weighted_norm = weighted_norm(sol.w);
                r.report = sol.report;
                r.u = std::move(sol.u);
                return;
            }
            std::optional<WienerPath> path;
            if (stochastic) {
                path = model.sample_path(grid, seed, p);
            }
            EvoProblem problem = model.problem(forcing, std::move(path));
            problem.u0 = u0;
            Solution sol = u0 ? solve_ivp(problem, solve) : solve_multiplicative(problem, solve);
            r.weighted_norm = weighted_norm(sol.u);
            r.report = sol.report;
            r.u = std::move(sol.u);
        } catch (const NonConvergenceError& e) {
            r.non_converged = true;
            r.failed_history = e.residual_history();
            r.failure = e.what();
        } catch (...) {
            r.error = std::current_exception();
        }
    });
    for (const auto& r : results) {
        if (r.error) {
            std::rethrow_exception(r.error);
        }
    }

    RunOutcome outcome;
    Writer w{config, options, outcome};
    std::optional<std::size_t> failed;
    for (std::size_t p = 0; p < results.size(); ++p) {
        if (results[p].non_converged && !failed) {
            failed = p;
        }
    }

    json checks = json::array();
    if (!failed && (stochastic || !model.perturbation.is_none()) && !config.additive) {
        double worst_residual = 0.0;
        double worst_contraction = 0.0;
        double q = 0.0;
        for (const auto& r : results) {
            worst_residual = std::max(worst_residual, r.report.residual_history.back());
            worst_contraction = std::max(worst_contraction, r.report.contraction_est);
            q = r.report.q_bound;
        }
        checks.push_back(check("picard_final_residual", worst_residual, solve.tol, worst_residual < solve.tol));
        checks.push_back(check("contraction_est", worst_contraction, q + 0.1, worst_contraction <= q + 0.1));
    }
    if (!failed && config.additive && model.perturbation.is_none()) {
        double worst = 0.0;
        for (const auto& r : results) {
            worst = std::max(worst, *r.bound_ratio);
        }
        const double bound = 1.0 + 5.0 * grid.dt();
        checks.push_back(check("integrated_norm_bound", worst, bound, worst <= bound));
    }

    if (!failed && w.wants(Output::TrajectoryCsv)) {
        write_trajectory_csv(options.out_dir / "trajectory.csv", *results.front().u);
        w.add(Output::TrajectoryCsv, "trajectory.csv");
    }
    if (w.wants(Output::ConvergenceCsv)) {
        std::string text = "path,iteration,residual\n";
        for (std::size_t p = 0; p < results.size(); ++p) {
            const auto& hist = results[p].non_converged ? results[p].failed_history
                                                        : results[p].report.residual_history;
            for (std::size_t k = 0; k < hist.size(); ++k) {
                text += std::to_string(p) + "," + std::to_string(k + 1) + "," + fmt17(hist[k]) + "\n";
            }
        }
        write_text(options.out_dir / "convergence.csv", text);
        w.add(Output::ConvergenceCsv, "convergence.csv");
    }
    if (w.wants(Output::ReportJson)) {
        json doc;
        doc["command"] = "run";
        doc["mode"] = mode;
        doc["model"] = to_string(model.spec.name);
        doc["dof"] = model.dof();
        doc["seed"] = seed;
        doc["n_paths"] = config.n_paths;
        doc["grid"] = {{"dt", grid.dt()}, {"n_steps", grid.n_steps()}, {"nu", grid.nu()}};
        doc["noise"] = {{"n_modes", model.spec.n_modes},
                        {"eigenvalues", to_string(model.spec.eigen_sequence)},
                        {"tail_mass", tail_mass(model.spec.eigen_sequence, model.spec.n_modes)},
                        {"sigma_lipschitz", model.spec.sigma.declared_lipschitz()}};
        if (config.additive) {
            doc["noise"]["additive"] = {{"kind", to_string(config.additive->kind)},
                                        {"order", config.additive->order}};
        }
        json paths = json::array();
        for (std::size_t p = 0; p < results.size(); ++p) {
            const auto& r = results[p];
            json entry;
            entry["index"] = p;
            if (r.non_converged) {
                entry["status"] = "non_convergence";
                entry["residual_history"] = r.failed_history;
            } else {
                entry["status"] = "ok";
                entry["weighted_norm"] = r.weighted_norm;
                entry["solver"] = report_json(r.report);
            }
            paths.push_back(entry);
        }
        doc["paths"] = paths;
        doc["checks"] = checks;
        if (failed) {
            doc["status"] = "non_convergence";
            doc["error"] = {{"path", *failed},
                            {"message", results[*failed].failure},
                            {"residual_history", results[*failed].failed_history}};
        } else {
            doc["status"] = all_pass(checks) ? "ok" : "check_failed";
        }
        write_json(options.out_dir / "report.json", doc);
        w.add(Output::ReportJson, "report.json");
    }
    w.manifest();

    if (failed) {
        outcome.exit_code = kNonConvergence;
        outcome.message = "path " + std::to_string(*failed) + ": " + results[*failed].failure;
    } else if (!all_pass(checks)) {
        outcome.exit_code = kVerification;
        outcome.message = "run checks failed";
    }
    return outcome;
}

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParameterError("cannot read " + path.string());
    }
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (ctx == nullptr || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
        EVP_MD_CTX_free(ctx);
        throw Error("sha256: digest initialisation failed");
    }
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof buf);
        if (in.gcount() > 0) {
            EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
        }
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, digest, &len);
    EVP_MD_CTX_free(ctx);
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 15];
    }
    return out;
}

void write_json(const std::filesystem::path& path, const json& doc) { write_text(path, doc.dump(2) + "\n"); }

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& u) {
    std::string text = "t";
    for (std::size_t i = 0; i < u.dof(); ++i) {
        const std::string c = ",component_" + std::to_string(i);
        text += c + "_re" + c + "_im";
    }
    text += "\n";
    for (std::size_t n = 0; n < u.n_steps(); ++n) {
        text += fmt17(u.grid().time(n));
        for (std::size_t i = 0; i < u.dof(); ++i) {
            const Complex z = u.values()(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(i));
            text += "," + fmt17(z.real()) + "," + fmt17(z.imag());
        }
        text += "\n";
    }
    write_text(path, text);
}

} // namespace evo::cli
