#pragma once

// Executes an ExperimentConfig and writes the requested artifacts.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "evo/cli/config.hpp"

namespace evo::cli {

/// Process exit codes shared by `run` and `verify`.
enum ExitCode : int { kOk = 0, kValidation = 1, kVerification = 2, kNonConvergence = 3 };

struct RunOptions {
    /// Overrides the config seed when set.
    std::optional<std::uint64_t> seed;
    unsigned threads = 1;
    std::filesystem::path out_dir = "out";
};

struct RunArtifact {
    Output kind;
    std::filesystem::path path;
    /// Lower-case hex SHA-256 of the file contents.
    std::string checksum;
};

struct RunOutcome {
    std::vector<RunArtifact> artifacts;
    int exit_code = kOk;
    std::string message;
};

/// Model with sigma resolved from the config: the declared Lipschitz constant
/// defaults to the computed bound.
Model build_model(const ExperimentConfig& config);

/// Deterministic forcing and initial state described by the config.
Trajectory build_forcing(const ExperimentConfig& config, const Model& model, const TimeGrid& grid);
std::optional<CVector> build_initial(const ExperimentConfig& config, const Model& model);

/// Throws ConfigError, ParameterError or ShapeError on invalid input; solver
/// non-convergence is reported through the outcome (exit code 3) with the
/// residual history in report.json.
RunOutcome run(const ExperimentConfig& config, const RunOptions& options);

std::string sha256_file(const std::filesystem::path& path);

/// Writes the document with two-space indentation and a trailing newline.
void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

/// "t,component_0_re,component_0_im,..." then one row per step, %.17g.
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& u);

} // namespace evo::cli
