// evospde: run experiment configs and the invariant suites.

#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "evo/cli/checks.hpp"
#include "evo/cli/runner.hpp"

namespace {

using namespace evo::cli;

struct Flags {
    std::optional<std::uint64_t> seed;
    unsigned threads = 1;
    std::string out_dir = "out";
};

void add_flags(CLI::App* cmd, Flags& flags) {
    cmd->add_option("--seed", flags.seed, "Override the seed");
    cmd->add_option("--threads", flags.threads, "Worker threads for path ensembles")->check(CLI::Range(1u, 256u));
    cmd->add_option("--out-dir", flags.out_dir, "Directory for artifacts");
}

int do_run(const std::string& config_path, const Flags& flags) {
    const ExperimentConfig config = load_config(config_path);
    RunOptions options;
    options.seed = flags.seed;
    options.threads = flags.threads;
    options.out_dir = flags.out_dir;
    const RunOutcome outcome = run(config, options);
    for (const auto& a : outcome.artifacts) {
        std::printf("%-16s %s  %s\n", to_string(a.kind).c_str(), a.checksum.c_str(), a.path.string().c_str());
    }
    if (outcome.exit_code != kOk) {
        std::fprintf(stderr, "run: %s\n", outcome.message.c_str());
    }
    return outcome.exit_code;
}

int do_verify(const std::string& suite, const Flags& flags) {
    VerifyOptions options;
    options.seed = flags.seed.value_or(options.seed);
    options.threads = flags.threads;
    options.work_dir = std::filesystem::path(flags.out_dir) / "verify_work";
    std::filesystem::create_directories(flags.out_dir);
    const auto results = run_suites(suite, options);
    bool ok = true;
    for (const auto& r : results) {
        for (const auto& c : r.checks) {
            std::printf("%s  %-14s %-48s %-12.6g %s %-12.6g\n", c.pass ? "PASS" : "FAIL", r.suite.c_str(),
                        c.name.c_str(), c.measured, c.relation.c_str(), c.bound);
        }
        std::printf("# %s: %s in %.2f s\n", r.suite.c_str(), r.passed() ? "passed" : "FAILED", r.seconds);
        ok = ok && r.passed();
    }
    const auto path = std::filesystem::path(flags.out_dir) / ("verify_" + suite + ".json");
    write_json(path, to_json(results));
    std::printf("report: %s\n", path.string().c_str());
    return ok ? kOk : kVerification;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stochastic evolutionary equations: experiment runner and verification suites"};
    app.require_subcommand(1);

    Flags run_flags;
    std::string config_path;
    CLI::App* run_cmd = app.add_subcommand("run", "Run an experiment config and write its artifacts");
    run_cmd->add_option("config", config_path, "JSON experiment config")->required();
    add_flags(run_cmd, run_flags);

    Flags verify_flags;
    std::string suite;
    CLI::App* verify_cmd = app.add_subcommand("verify", "Run an invariant suite at pinned parameters");
    verify_cmd->add_option("suite", suite, "Suite name")->required()->check(CLI::IsMember(suite_names()));
    add_flags(verify_cmd, verify_flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kValidation;
    }

    try {
        if (*run_cmd) {
            return do_run(config_path, run_flags);
        }
        return do_verify(suite, verify_flags);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kValidation;
    } catch (const evo::ContractionBudgetError& e) {
        std::fprintf(stderr, "contraction budget: %s (q_bound %.6g)\n", e.what(), e.q_bound());
        return kValidation;
    } catch (const evo::NonConvergenceError& e) {
        std::fprintf(stderr, "non-convergence: %s\n", e.what());
        return kNonConvergence;
    } catch (const evo::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kValidation;
    } catch (const std::filesystem::filesystem_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kValidation;
    }
}
