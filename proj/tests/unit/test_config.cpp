#include <gtest/gtest.h>

#include "evo/cli/config.hpp"
#include "evo/cli/runner.hpp"

namespace evo::cli {
namespace {

using nlohmann::json;

std::string field_of(const json& doc) {
    try {
        parse_config(doc);
    } catch (const ConfigError& e) {
        return e.field();
    }
    return "";
}

TEST(Config, Defaults) {
    const ExperimentConfig c = parse_config(json{{"model", {{"name", "heat"}}}});
    EXPECT_EQ(c.model.name, ModelName::Heat);
    EXPECT_EQ(c.model.n_cells, 16u);
    EXPECT_EQ(c.model.dimension, 1);
    EXPECT_EQ(c.grid.n_steps, 101u);
    EXPECT_DOUBLE_EQ(c.solver.nu, 2.0);
    EXPECT_EQ(c.sigma.kind, "zero");
    EXPECT_EQ(c.outputs.size(), 2u);
    EXPECT_FALSE(c.additive.has_value());
}

TEST(Config, MaxwellDefaultsToThreeDimensions) {
    const ExperimentConfig c = parse_config(json{{"model", {{"name", "maxwell"}}}});
    EXPECT_EQ(c.model.dimension, 3);
    EXPECT_EQ(c.model.n_cells, 8u);
}

TEST(Config, UnknownKeysReportTheirPath) {
    EXPECT_EQ(field_of(json{{"model", {{"name", "heat"}}}, {"colour", 1}}), "colour");
    EXPECT_EQ(field_of(json{{"model", {{"name", "heat"}, {"cells", 4}}}}), "model.cells");
    EXPECT_EQ(field_of(json{{"model", {{"name", "mixed"}, {"regions", json::array({{{"type", "parabolic"}, {"lo", 0}, {"hi", 1}, {"x", 0}}})}}}}),
              "model.regions[0].x");
}

TEST(Config, RangesAndTypes) {
    EXPECT_EQ(field_of(json{{"model", {{"name", "heat"}, {"n_cells", 1}}}}), "model.n_cells");
    EXPECT_EQ(field_of(json{{"model", {{"name", "heat"}, {"n_cells", -4}}}}), "model.n_cells");
    EXPECT_EQ(field_of(json{{"model", {{"name", "heat"}, {"n_cells", "8"}}}}), "model.n_cells");
    EXPECT_EQ(field_of(json{{"model", {{"name", "fractional"}, {"alpha", 1.5}}}}), "model.alpha");
    EXPECT_EQ(field_of(json{{"model", {{"name", "heat"}}}, {"grid", {{"dt", 0.0}}}}), "grid.dt");
    EXPECT_EQ(field_of(json{{"model", {{"name", "heat"}}}, {"solver", {{"nu", -1.0}}}}), "solver.nu");
    EXPECT_EQ(field_of(json{{"model", {{"name", "burgers"}}}}), "model.name");
    EXPECT_EQ(field_of(json{{"model", {{"name", "heat"}}}, {"sigma", {{"kind", "cubic"}}}}), "sigma.kind");
    EXPECT_EQ(field_of(json{{"model", {{"name", "heat"}}}, {"noise", {{"additive", {{"hurst", 1.2}}}}}}),
              "noise.additive.hurst");
    EXPECT_EQ(field_of(json{{"model", {{"name", "heat"}}}, {"outputs", {"movie"}}}), "outputs[0]");
    EXPECT_EQ(field_of(json{{"sigma", {{"kind", "zero"}}}}), "model");
}

TEST(Config, AdditiveExcludesMultiplicativeSigma) {
    const json doc{{"model", {{"name", "heat"}}},
                   {"sigma", {{"kind", "affine"}, {"c0", 1.0}}},
                   {"noise", {{"additive", {{"kind", "wiener"}}}}}};
    EXPECT_THROW(parse_config(doc), ConfigError);
}

TEST(Config, CrossvalOutputs) {
    const ExperimentConfig c = parse_config(json{{"crossval", {{"reference", "variational_heat"}, {"refinements", 2}}}});
    ASSERT_TRUE(c.crossval.has_value());
    EXPECT_EQ(c.model.name, ModelName::Heat);
    EXPECT_EQ(c.crossval->settings.refinements, 2u);
    EXPECT_EQ(c.outputs, (std::vector<Output>{Output::ReportJson, Output::ConvergenceCsv}));
    EXPECT_THROW(parse_config(json{{"crossval", {{"reference", "mild_wave"}}}, {"outputs", {"trajectory_csv"}}}),
                 ConfigError);
}

TEST(Config, DeclaredLipschitzBelowComputedBoundIsRejected) {
    const ExperimentConfig c = parse_config(
        json{{"model", {{"name", "heat"}}}, {"sigma", {{"kind", "affine"}, {"c0", 0.0}, {"c1", 3.0}, {"lipschitz", 0.01}}}});
    try {
        build_model(c);
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.field(), "sigma.lipschitz");
    }
}

} // namespace
} // namespace evo::cli
