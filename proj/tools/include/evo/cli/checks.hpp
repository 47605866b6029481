#pragma once

// Invariant suites at pinned parameters. Each check carries a measured value,
// the bound it is compared against and the outcome; `verify` and the
// acceptance binary both run these.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace evo::cli {

struct Check {
    std::string name;
    double measured = 0.0;
    double bound = 0.0;
    /// "<=" or ">=".
    std::string relation = "<=";
    bool pass = false;
};

Check check_le(std::string name, double measured, double bound);
Check check_ge(std::string name, double measured, double bound);

struct SuiteResult {
    std::string suite;
    std::vector<Check> checks;
    double seconds = 0.0;

    bool passed() const noexcept;
};

struct VerifyOptions {
    std::uint64_t seed = 2024;
    unsigned threads = 1;
    /// Scratch space for suites that invoke the runner.
    std::filesystem::path work_dir = "verify_work";
};

/// Skew residuals of every catalog operator, d0/d0_inv round trips and
/// curl o grad = 0.
SuiteResult operator_suite(const VerifyOptions& options);
/// Weighted isometry at nu = 2, dt = 1e-2, T = 2, K = 4 over 1e4 paths.
SuiteResult ito_suite(const VerifyOptions& options);
/// Heat law at r = 1 by sampling, mixed law by a brute-force z grid.
SuiteResult coercivity_suite(const VerifyOptions& options);
/// Heat with affine sigma and q_bound = 0.5 over 20 seeds.
SuiteResult contraction_suite(const VerifyOptions& options);
/// Zero-prefix causality and truncation adaptedness on 100 random cases.
SuiteResult causality_suite(const VerifyOptions& options);
SuiteResult crossval_wave_suite(const VerifyOptions& options);
SuiteResult crossval_heat_suite(const VerifyOptions& options);
/// Eigenmode forcing, initial-value decay and the solution-operator bound.
SuiteResult oracle_suite(const VerifyOptions& options);
/// Single-region mixed laws against heat and wave, fractional alpha = 1.
SuiteResult reduction_suite(const VerifyOptions& options);
/// `run` twice per thread count; every artifact checksum must agree.
SuiteResult reproducibility_suite(const VerifyOptions& options);

/// operators, ito, coercivity, contraction, causality, crossval, oracles,
/// reductions, reproducibility, all.
const std::vector<std::string>& suite_names();

/// Throws std::invalid_argument for an unknown name.
std::vector<SuiteResult> run_suites(const std::string& name, const VerifyOptions& options);

nlohmann::json to_json(const std::vector<SuiteResult>& suites);

} // namespace evo::cli
