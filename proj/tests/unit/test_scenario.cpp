#include "wlsc/scenario.hpp"
#include "wlsc/verdict.hpp"

#include <gtest/gtest.h>

#include <string>

using namespace wlsc;

namespace {

const std::string kDir = WLSC_SCENARIO_DIR;

// Small scenario that runs in well under a second.
const char* kFast = R"({
  "schema_version": 1,
  "name": "fast",
  "domain": {"kind": "interval", "a": 0.0, "b": 1.0},
  "integrand": {"tag": "norm", "rows": 1},
  "sampling": {"interior_count": 1, "random_xi": 1, "rank_one_xi": 0},
  "solver": {"restarts": 2, "max_iter": 50, "qc_h": 0.25, "qslb_h": 0.1}
})";

SchemaError schema_error_of(const std::string& text) {
  try {
    (void)parse_scenario_text(text);
  } catch (const SchemaError& e) {
    return e;
  }
  ADD_FAILURE() << "no SchemaError for:\n" << text;
  return SchemaError("", 0, "none");
}

}  // namespace

TEST(Scenario, BundledScenariosParse) {
  for (const char* stem : {"area_square", "example_1_2", "example_1_2_extended", "negnorm_square", "norm_square",
                           "null_lagrangian_square"}) {
    EXPECT_NO_THROW((void)load_scenario(kDir + "/" + stem + ".json")) << stem;
  }
  const Scenario s = load_scenario(kDir + "/example_1_2.json");
  EXPECT_EQ(s.domain.dim, 1);
  EXPECT_EQ(s.integrand.tag, "linear");
  EXPECT_TRUE(s.checks.sequences);
  EXPECT_EQ(s.decomposition.cover.size(), 2u);
  EXPECT_EQ(s.decomposition.prefix, 256);
}

TEST(Scenario, MissingIntegrandReportsPathAndLine) {
  const SchemaError e = schema_error_of(R"({
  "schema_version": 1,
  "domain": {"kind": "interval", "a": 0.0, "b": 1.0}
})");
  EXPECT_EQ(e.path(), "/integrand");
  EXPECT_NE(std::string(e.what()).find("/integrand"), std::string::npos);
}

TEST(Scenario, UnknownKeysAndTagsPointAtTheirLine) {
  const SchemaError unknown = schema_error_of(R"({
  "schema_version": 1,
  "domain": {"kind": "unit_square"},
  "integrand": {"tag": "norm"},
  "checks": {"qc": true,
             "bogus": false}
})");
  EXPECT_EQ(unknown.path(), "/checks/bogus");
  EXPECT_EQ(unknown.line(), 6);
  const SchemaError tag = schema_error_of(R"({
  "schema_version": 1,
  "domain": {"kind": "unit_square"},
  "integrand": {"tag": "no_such_integrand"}
})");
  EXPECT_EQ(tag.path(), "/integrand");
  EXPECT_EQ(tag.line(), 4);
  const SchemaError version = schema_error_of(R"({"schema_version": 2, "domain": {"kind": "unit_square"}})");
  EXPECT_EQ(version.path(), "/schema_version");
}

TEST(Scenario, ValueErrorsAreSchemaErrors) {
  const std::string head = R"({"schema_version": 1, "domain": {"kind": "interval", "a": 0.0, "b": 1.0}, )";
  EXPECT_EQ(schema_error_of(head + R"("integrand": {"tag": "norm", "rows": 3}})").path(), "/integrand/rows");
  EXPECT_EQ(schema_error_of(head + R"("integrand": {"tag": "norm"}, "workers": -1})").path(), "/workers");
  EXPECT_EQ(schema_error_of(head + R"("integrand": {"tag": "norm"}, "checks": {"qc": 1}})").path(), "/checks/qc");
  EXPECT_EQ(schema_error_of(head + R"("integrand": {"tag": "norm"}, "checks": {"sequences": true}})").path(),
            "/sequence");
  EXPECT_EQ(schema_error_of(head + R"("integrand": {"tag": "norm"},
    "sampling": {"interior_points": [[2.0]]}})")
                .path(),
            "/sampling/interior_points/0");
}

TEST(Scenario, MalformedJsonReportsTheLine) {
  const SchemaError e = schema_error_of("{\n  \"schema_version\": 1,\n  \"domain\": {\n  oops\n}");
  EXPECT_EQ(e.line(), 4);
  EXPECT_EQ(e.path(), "");
}

TEST(Scenario, DefaultsRoundTripThroughJson) {
  const Scenario s = parse_scenario_text(kFast);
  const nlohmann::json once = scenario_to_json(s);
  EXPECT_EQ(once.at("solver").at("restarts"), 2);
  EXPECT_TRUE(once.at("checks").contains("recession"));
  const nlohmann::json twice = scenario_to_json(parse_scenario(once));
  EXPECT_EQ(once, twice);
}

TEST(Samples, LieInTheDomainAndOnItsBoundary) {
  const Scenario line = parse_scenario_text(kFast);
  for (const Point& x : interior_samples(line)) {
    EXPECT_GT(x.x(), 0.0);
    EXPECT_LT(x.x(), 1.0);
  }
  const auto ends = boundary_samples(line);
  ASSERT_EQ(ends.size(), 2u);
  const auto xis = xi_samples(line, 1);
  ASSERT_EQ(xis.size(), 2u);
  EXPECT_EQ(xis.front().first, "zero");
  EXPECT_EQ(xis.front().second.norm(), 0.0);
  EXPECT_LE(xis.back().second.norm(), 2.0);

  const Scenario sq = load_scenario(kDir + "/norm_square.json");
  EXPECT_EQ(boundary_samples(sq).size(), 4u);
  for (const Point& x : interior_samples(sq)) EXPECT_TRUE(sq.domain.contains(x));
}

TEST(RunScenario, ReportsAreByteIdenticalAcrossRunsAndWorkerCounts) {
  Scenario s = parse_scenario_text(kFast);
  const std::string first = report_text(run_scenario(s));
  EXPECT_EQ(first, report_text(run_scenario(s)));
  // The worker count is echoed in the scenario block; the verdict must not depend on it.
  s.workers = 3;
  const nlohmann::json r = nlohmann::json::parse(first);
  EXPECT_EQ(r.at("verdict"), nlohmann::json::parse(report_text(run_scenario(s))).at("verdict"));
  EXPECT_EQ(r.at("schema"), kReportSchema);
  EXPECT_EQ(r.at("verdict").at("overall"), "wlsc-plausible");
  EXPECT_EQ(first.find("seconds"), std::string::npos);
}

TEST(RunScenario, ExampleOneTwoIsNotWlscWithWitnesses) {
  Scenario s = load_scenario(kDir + "/example_1_2.json");
  s.checks.decomposition = false;
  s.checks.recession = false;
  const Verdict v = analyze(s);
  EXPECT_EQ(v.overall, Overall::NotWlsc);
  EXPECT_FALSE(v.violations.empty());
  ASSERT_TRUE(v.liminf.has_value());
  EXPECT_TRUE(v.liminf->violated);
  EXPECT_TRUE(v.errors.empty());
  EXPECT_EQ(to_string(v.overall), "not-wlsc");
}
