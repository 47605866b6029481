#include "evo/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace evo::cli {

using nlohmann::json;

namespace {

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

void check_object(const json& j, const std::string& path) {
    if (!j.is_object()) {
        throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
    }
}

void check_keys(const json& j, const std::string& path, const std::set<std::string>& allowed) {
    check_object(j, path);
    for (const auto& [key, value] : j.items()) {
        if (!allowed.count(key)) {
            throw ConfigError(join(path, key), "unknown key");
        }
    }
}

double number(const json& j, const std::string& path, const std::string& key, double def) {
    if (!j.contains(key)) {
        return def;
    }
    const json& v = j.at(key);
    if (!v.is_number()) {
        throw ConfigError(join(path, key), "expected a number");
    }
    const double x = v.get<double>();
    if (!std::isfinite(x)) {
        throw ConfigError(join(path, key), "must be finite");
    }
    return x;
}

double positive(const json& j, const std::string& path, const std::string& key, double def) {
    const double x = number(j, path, key, def);
    if (!(x > 0.0)) {
        throw ConfigError(join(path, key), "must be positive");
    }
    return x;
}

std::uint64_t count(const json& j, const std::string& path, const std::string& key, std::uint64_t def,
                    std::uint64_t lo = 0) {
    if (!j.contains(key)) {
        return def;
    }
    const json& v = j.at(key);
    if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
        throw ConfigError(join(path, key), "expected a non-negative integer");
    }
    const auto x = v.get<std::uint64_t>();
    if (x < lo) {
        throw ConfigError(join(path, key), "must be at least " + std::to_string(lo));
    }
    return x;
}

std::string text(const json& j, const std::string& path, const std::string& key, const std::string& def) {
    if (!j.contains(key)) {
        return def;
    }
    const json& v = j.at(key);
    if (!v.is_string()) {
        throw ConfigError(join(path, key), "expected a string");
    }
    return v.get<std::string>();
}

bool flag(const json& j, const std::string& path, const std::string& key, bool def) {
    if (!j.contains(key)) {
        return def;
    }
    const json& v = j.at(key);
    if (!v.is_boolean()) {
        throw ConfigError(join(path, key), "expected true or false");
    }
    return v.get<bool>();
}

// Runs a catalog lookup and attributes its error to the field.
template <typename F>
auto lookup(const std::string& field, F&& f) {
    try {
        return f();
    } catch (const Error& e) {
        throw ConfigError(field, e.what());
    }
}

void parse_model(const json& j, ExperimentConfig& cfg) {
    const std::string path = "model";
    check_keys(j, path,
               {"name", "dimension", "n_cells", "extent", "alpha", "epsilon", "mu", "zeta", "coefficient_base",
                "coefficient_amplitude", "regions", "potential"});
    ModelSpec& m = cfg.model;
    if (!j.contains("name")) {
        throw ConfigError("model.name", "is required");
    }
    const std::string name = text(j, path, "name", "");
    m.name = lookup("model.name", [&] { return parse_model_name(name); });
    const int default_dim = m.name == ModelName::Maxwell ? 3 : 1;
    const auto dim = count(j, path, "dimension", static_cast<std::uint64_t>(default_dim), 1);
    if (dim > 3) {
        throw ConfigError("model.dimension", "must be 1, 2 or 3");
    }
    m.dimension = static_cast<int>(dim);
    m.n_cells = count(j, path, "n_cells", m.name == ModelName::Maxwell ? 8 : 16, 2);
    m.extent = positive(j, path, "extent", 1.0);
    m.alpha = number(j, path, "alpha", m.alpha);
    if (!(m.alpha > 0.0 && m.alpha <= 1.0)) {
        throw ConfigError("model.alpha", "must lie in (0, 1]");
    }
    m.epsilon = positive(j, path, "epsilon", m.epsilon);
    m.mu = positive(j, path, "mu", m.mu);
    m.zeta = number(j, path, "zeta", m.zeta);
    m.coefficient_base = number(j, path, "coefficient_base", m.coefficient_base);
    m.coefficient_amplitude = number(j, path, "coefficient_amplitude", m.coefficient_amplitude);
    m.potential = number(j, path, "potential", m.potential);
    if (j.contains("regions")) {
        const json& r = j.at("regions");
        if (!r.is_array()) {
            throw ConfigError("model.regions", "expected an array");
        }
        for (std::size_t i = 0; i < r.size(); ++i) {
            const std::string rp = "model.regions[" + std::to_string(i) + "]";
            check_keys(r[i], rp, {"type", "lo", "hi"});
            Region reg;
            const std::string type = text(r[i], rp, "type", "");
            reg.type = lookup(rp + ".type", [&] { return parse_region_type(type); });
            reg.lo = number(r[i], rp, "lo", 0.0);
            reg.hi = number(r[i], rp, "hi", m.extent);
            if (!(reg.hi > reg.lo)) {
                throw ConfigError(rp, "requires lo < hi");
            }
            m.regions.push_back(reg);
        }
    }
}

void parse_sigma(const json& j, ExperimentConfig& cfg) {
    const std::string path = "sigma";
    check_keys(j, path, {"kind", "c0", "c1", "function", "gain", "lipschitz"});
    SigmaConfig& s = cfg.sigma;
    s.kind = text(j, path, "kind", "zero");
    if (s.kind != "zero" && s.kind != "affine" && s.kind != "pointwise") {
        throw ConfigError("sigma.kind", "expected zero, affine or pointwise");
    }
    s.c0 = number(j, path, "c0", 0.0);
    s.c1 = number(j, path, "c1", 0.0);
    const std::string fn = text(j, path, "function", "identity");
    s.function = lookup("sigma.function", [&] { return SigmaSpec::parse_function(fn); });
    s.gain = number(j, path, "gain", 1.0);
    if (j.contains("lipschitz")) {
        s.lipschitz = number(j, path, "lipschitz", 0.0);
        if (*s.lipschitz < 0.0) {
            throw ConfigError("sigma.lipschitz", "must be non-negative");
        }
    }
}

void parse_noise(const json& j, ExperimentConfig& cfg) {
    const std::string path = "noise";
    check_keys(j, path, {"n_modes", "eigenvalues", "additive"});
    cfg.model.n_modes = count(j, path, "n_modes", cfg.model.n_modes, 1);
    const std::string seq = text(j, path, "eigenvalues", "inverse_square");
    cfg.model.eigen_sequence = lookup("noise.eigenvalues", [&] { return parse_eigen_sequence(seq); });
    if (j.contains("additive")) {
        const json& a = j.at("additive");
        const std::string ap = "noise.additive";
        check_keys(a, ap, {"kind", "order", "jump_rate", "jump_scale", "hurst"});
        AdditiveConfig add;
        const std::string kind = text(a, ap, "kind", "wiener");
        add.kind = lookup(ap + ".kind", [&] { return parse_additive_kind(kind); });
        add.order = static_cast<unsigned>(count(a, ap, "order", 0));
        if (add.order > 2) {
            throw ConfigError(ap + ".order", "must be 0, 1 or 2");
        }
        add.params.jump_rate = positive(a, ap, "jump_rate", add.params.jump_rate);
        add.params.jump_scale = positive(a, ap, "jump_scale", add.params.jump_scale);
        add.params.hurst = number(a, ap, "hurst", add.params.hurst);
        if (!(add.params.hurst > 0.0 && add.params.hurst < 1.0)) {
            throw ConfigError(ap + ".hurst", "must lie in (0, 1)");
        }
        cfg.additive = add;
    }
}

void parse_forcing(const json& j, ExperimentConfig& cfg) {
    const std::string path = "forcing";
    check_keys(j, path, {"kind", "mode", "amplitude", "block", "integrated", "until"});
    ForcingConfig& f = cfg.forcing;
    f.kind = text(j, path, "kind", "zero");
    if (f.kind != "zero" && f.kind != "mode") {
        throw ConfigError("forcing.kind", "expected zero or mode");
    }
    f.mode = count(j, path, "mode", 1, 1);
    f.amplitude = number(j, path, "amplitude", 1.0);
    f.block = text(j, path, "block", "");
    f.integrated = flag(j, path, "integrated", false);
    if (j.contains("until")) {
        f.until = number(j, path, "until", 0.0);
    }
}

void parse_initial(const json& j, ExperimentConfig& cfg) {
    const std::string path = "initial";
    check_keys(j, path, {"kind", "mode", "amplitude"});
    InitialConfig& i = cfg.initial;
    i.kind = text(j, path, "kind", "none");
    if (i.kind != "none" && i.kind != "mode") {
        throw ConfigError("initial.kind", "expected none or mode");
    }
    i.mode = count(j, path, "mode", 1, 1);
    i.amplitude = number(j, path, "amplitude", 1.0);
}

void parse_grid(const json& j, ExperimentConfig& cfg) {
    check_keys(j, "grid", {"dt", "n_steps"});
    cfg.grid.dt = positive(j, "grid", "dt", cfg.grid.dt);
    cfg.grid.n_steps = count(j, "grid", "n_steps", cfg.grid.n_steps, 1);
    if (cfg.grid.n_steps > 1000000) {
        throw ConfigError("grid.n_steps", "must not exceed 1000000");
    }
}

void parse_solver(const json& j, ExperimentConfig& cfg) {
    check_keys(j, "solver", {"nu", "tol", "max_iter"});
    cfg.solver.nu = positive(j, "solver", "nu", cfg.solver.nu);
    cfg.solver.tol = positive(j, "solver", "tol", cfg.solver.tol);
    cfg.solver.max_iter = count(j, "solver", "max_iter", cfg.solver.max_iter, 1);
}

void parse_outputs(const json& j, ExperimentConfig& cfg) {
    if (!j.is_array()) {
        throw ConfigError("outputs", "expected an array");
    }
    cfg.outputs.clear();
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string field = "outputs[" + std::to_string(i) + "]";
        if (!j[i].is_string()) {
            throw ConfigError(field, "expected a string");
        }
        const auto name = j[i].get<std::string>();
        if (name == "trajectory_csv") {
            cfg.outputs.push_back(Output::TrajectoryCsv);
        } else if (name == "report_json") {
            cfg.outputs.push_back(Output::ReportJson);
        } else if (name == "convergence_csv") {
            cfg.outputs.push_back(Output::ConvergenceCsv);
        } else {
            throw ConfigError(field, "unknown output '" + name + "'");
        }
    }
}

void parse_crossval(const json& j, ExperimentConfig& cfg) {
    const std::string path = "crossval";
    check_keys(j, path,
               {"reference", "n_cells", "n_modes", "dt", "refinements", "final_time", "n_paths", "nu", "c0", "c1",
                "tol", "max_rel_error", "min_ratio"});
    CrossvalConfig c;
    c.reference = text(j, path, "reference", "mild_wave");
    if (c.reference != "mild_wave" && c.reference != "variational_heat") {
        throw ConfigError("crossval.reference", "expected mild_wave or variational_heat");
    }
    CrossValidationSettings& s = c.settings;
    s.n_cells = count(j, path, "n_cells", s.n_cells, 2);
    s.n_modes = count(j, path, "n_modes", s.n_modes, 1);
    s.dt = positive(j, path, "dt", s.dt);
    s.refinements = count(j, path, "refinements", s.refinements, 1);
    if (s.refinements > 6) {
        throw ConfigError("crossval.refinements", "must not exceed 6");
    }
    s.final_time = positive(j, path, "final_time", s.final_time);
    s.n_paths = count(j, path, "n_paths", s.n_paths, 1);
    s.nu = positive(j, path, "nu", s.nu);
    s.c0 = number(j, path, "c0", s.c0);
    s.c1 = number(j, path, "c1", s.c1);
    s.tol = positive(j, path, "tol", s.tol);
    c.max_rel_error = positive(j, path, "max_rel_error", c.max_rel_error);
    c.min_ratio = positive(j, path, "min_ratio", c.min_ratio);
    cfg.crossval = c;
}

} // namespace

std::string to_string(Output o) {
    switch (o) {
    case Output::TrajectoryCsv:
        return "trajectory_csv";
    case Output::ReportJson:
        return "report_json";
    case Output::ConvergenceCsv:
        return "convergence_csv";
    }
    return "report_json";
}

ExperimentConfig parse_config(const json& doc) {
    check_keys(doc, "",
               {"model", "sigma", "noise", "forcing", "grid", "solver", "initial", "seed", "n_paths", "outputs",
                "crossval"});
    ExperimentConfig cfg;
    if (doc.contains("crossval")) {
        parse_crossval(doc.at("crossval"), cfg);
        cfg.model.name = cfg.crossval->reference == "mild_wave" ? ModelName::WaveV1 : ModelName::Heat;
    }
    if (doc.contains("model")) {
        parse_model(doc.at("model"), cfg);
    } else if (!cfg.crossval) {
        throw ConfigError("model", "is required");
    }
    if (doc.contains("sigma")) {
        parse_sigma(doc.at("sigma"), cfg);
    }
    if (doc.contains("noise")) {
        parse_noise(doc.at("noise"), cfg);
    }
    if (doc.contains("forcing")) {
        parse_forcing(doc.at("forcing"), cfg);
    }
    if (doc.contains("initial")) {
        parse_initial(doc.at("initial"), cfg);
    }
    if (doc.contains("grid")) {
        parse_grid(doc.at("grid"), cfg);
    }
    if (doc.contains("solver")) {
        parse_solver(doc.at("solver"), cfg);
    }
    cfg.seed = count(doc, "", "seed", 0);
    cfg.n_paths = count(doc, "", "n_paths", 1, 1);
    if (cfg.n_paths > 100000) {
        throw ConfigError("n_paths", "must not exceed 100000");
    }
    if (doc.contains("outputs")) {
        parse_outputs(doc.at("outputs"), cfg);
    } else if (cfg.crossval) {
        cfg.outputs = {Output::ReportJson, Output::ConvergenceCsv};
    }
    if (cfg.crossval) {
        for (Output o : cfg.outputs) {
            if (o == Output::TrajectoryCsv) {
                throw ConfigError("outputs", "trajectory_csv is not produced by a crossval run");
            }
        }
    }
    if (cfg.additive && cfg.sigma.kind != "zero") {
        throw ConfigError("noise.additive", "cannot be combined with a nonzero sigma");
    }
    if (cfg.additive && cfg.initial.kind != "none") {
        throw ConfigError("noise.additive", "cannot be combined with an initial state");
    }
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("<file>", "cannot open " + path.string());
    }
    json doc;
    try {
        doc = json::parse(in, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ConfigError("<file>", std::string("invalid JSON: ") + e.what());
    }
    return parse_config(doc);
}

} // namespace evo::cli
