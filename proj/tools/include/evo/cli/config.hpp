#pragma once

// Experiment configuration: a JSON document with fixed sections. Unknown keys
// are rejected with the full field path.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "evo/models.hpp"

namespace evo::cli {

/// Validation failure; `field` is a dotted path such as "model.n_cells".
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& field, const std::string& message)
        : std::runtime_error(field + ": " + message), field_(field) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

struct SigmaConfig {
    /// "zero", "affine" or "pointwise".
    std::string kind = "zero";
    double c0 = 0.0;
    double c1 = 0.0;
    SigmaSpec::Function function = SigmaSpec::Function::Identity;
    double gain = 1.0;
    /// Declared Lipschitz constant; the computed bound when absent.
    std::optional<double> lipschitz;
};

struct ForcingConfig {
    /// "zero" or "mode": amplitude * sin(j pi x) on the given block
    /// (cosine for Neumann layouts), switched off from time `until` on.
    std::string kind = "zero";
    std::size_t mode = 1;
    double amplitude = 1.0;
    std::string block;
    /// Apply d0_inv, turning a source into the integrated right-hand side.
    bool integrated = false;
    std::optional<double> until;
};

struct InitialConfig {
    /// "none" or "mode".
    std::string kind = "none";
    std::size_t mode = 1;
    double amplitude = 1.0;
};

struct AdditiveConfig {
    AdditiveKind kind = AdditiveKind::Wiener;
    unsigned order = 0;
    AdditiveParams params;
};

struct GridConfig {
    double dt = 1e-2;
    std::size_t n_steps = 101;
};

struct SolverConfig {
    double nu = 2.0;
    double tol = 1e-8;
    std::size_t max_iter = 100;
};

enum class Output { TrajectoryCsv, ReportJson, ConvergenceCsv };

std::string to_string(Output o);

struct CrossvalConfig {
    /// "mild_wave" or "variational_heat".
    std::string reference = "mild_wave";
    CrossValidationSettings settings;
    double max_rel_error = 0.10;
    double min_ratio = 1.3;
};

struct ExperimentConfig {
    /// Model fields; model.sigma is filled in from `sigma` by build_model.
    ModelSpec model;
    SigmaConfig sigma;
    std::optional<AdditiveConfig> additive;
    ForcingConfig forcing;
    InitialConfig initial;
    GridConfig grid;
    SolverConfig solver;
    std::uint64_t seed = 0;
    std::size_t n_paths = 1;
    std::vector<Output> outputs{Output::TrajectoryCsv, Output::ReportJson};
    std::optional<CrossvalConfig> crossval;
};

ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);

} // namespace evo::cli
