#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "dsim/scenario/presets.hpp"
#include "dsim/scenario/reweight.hpp"
#include "dsim/scenario/scenario.hpp"
#include "oracles.hpp"

using namespace dsim;

namespace {

constexpr std::string_view kMinimal = R"(name = "m"
horizon = 10
seed = 7
region.0.name = "a"
)";

template <typename F>
SyntaxError syntax_error(F&& f) {
  try {
    f();
  } catch (const SyntaxError& e) {
    return e;
  }
  ADD_FAILURE() << "no SyntaxError";
  return SyntaxError(0, 0, "");
}

template <typename F>
std::string schema_path(F&& f) {
  try {
    f();
  } catch (const SchemaError& e) {
    return e.path();
  }
  ADD_FAILURE() << "no SchemaError";
  return {};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  EXPECT_TRUE(in) << path;
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST(Scenario, MinimalDocumentTakesDefaults) {
  const auto cfg = parse_scenario(kMinimal);
  EXPECT_EQ(cfg.name, "m");
  EXPECT_EQ(cfg.horizon, 10);
  EXPECT_EQ(cfg.seed, 7u);
  EXPECT_EQ(cfg.genesis, GenesisParams{});
  EXPECT_EQ(cfg.finance, FinanceParams{});
  EXPECT_EQ(cfg.selection, SelectionConfig{});
  ASSERT_EQ(cfg.regions.size(), 1u);
  EXPECT_EQ(cfg.regions[0].idea_rate, cfg.genesis.idea_rate);
  EXPECT_EQ(cfg.regions[0].demographics, DemographicParams{});
  EXPECT_TRUE(cfg.edges.empty());
  EXPECT_FALSE(cfg.sweep.active());
}

TEST(Scenario, CommentsAndBlankLines) {
  const auto cfg = parse_scenario("# header\n\nname = \"x\"  # trailing\nhorizon = 3\nseed = 1\n\nregion.0.name = \"a\"\n");
  EXPECT_EQ(cfg.horizon, 3);
}

TEST(Scenario, MissingHorizonNamesPath) {
  EXPECT_EQ(schema_path([] { parse_scenario("name = \"m\"\nseed = 1\nregion.0.name = \"a\"\n"); }), "horizon");
}

TEST(Scenario, UnknownKeyNamesPath) {
  EXPECT_EQ(schema_path([] { parse_scenario(std::string(kMinimal) + "finance.bogus = 3\n"); }), "finance.bogus");
  EXPECT_EQ(schema_path([] { parse_scenario(std::string(kMinimal) + "nonsense.key = 3\n"); }), "nonsense.key");
}

TEST(Scenario, DanglingRegionReference) {
  EXPECT_EQ(schema_path([] {
              parse_scenario(std::string(kMinimal) + "edge.0.from = \"a\"\nedge.0.to = \"b\"\nedge.0.weight = 0.5\n");
            }),
            "edge.0.to");
  EXPECT_EQ(schema_path([] {
              parse_scenario(std::string(kMinimal) +
                             "shock.0.step = 2\nshock.0.region = \"zz\"\nshock.0.kind = \"population\"\n"
                             "shock.0.magnitude = 0.5\n");
            }),
            "shock.0.region");
}

TEST(Scenario, OutOfRangeAndWrongType) {
  EXPECT_EQ(schema_path([] { parse_scenario(std::string(kMinimal) + "genesis.ex_ante_p = 1.5\n"); }),
            "genesis.ex_ante_p");
  EXPECT_EQ(schema_path([] { parse_scenario(std::string(kMinimal) + "finance.entrepreneurs = \"many\"\n"); }),
            "finance.entrepreneurs");
  EXPECT_EQ(schema_path([] { parse_scenario(std::string(kMinimal) + "genesis.rd_delay = 0\n"); }), "genesis.rd_delay");
}

TEST(Scenario, RegionRules) {
  EXPECT_EQ(schema_path([] { parse_scenario("name = \"m\"\nhorizon = 3\nseed = 1\n"); }), "region.0.name");
  EXPECT_EQ(schema_path([] { parse_scenario(std::string(kMinimal) + "region.2.name = \"b\"\n"); }), "region.1");
  EXPECT_EQ(schema_path([] { parse_scenario(std::string(kMinimal) + "region.1.name = \"a\"\n"); }), "region.1.name");
}

TEST(Scenario, RegionOverridesInherit) {
  const auto cfg = parse_scenario(std::string(kMinimal) +
                                  "genesis.idea_rate = 2.5\ndemographics.base_birth = 0.05\n"
                                  "region.1.name = \"b\"\nregion.1.idea_rate = 0.5\n"
                                  "region.1.demographics.land_capacity = 7.0\n");
  EXPECT_EQ(cfg.regions[0].idea_rate, 2.5);
  EXPECT_EQ(cfg.regions[1].idea_rate, 0.5);
  EXPECT_EQ(cfg.regions[0].demographics.base_birth, 0.05);
  EXPECT_EQ(cfg.regions[1].demographics.base_birth, 0.05);
  EXPECT_EQ(cfg.regions[1].demographics.land_capacity, 7.0);
  EXPECT_EQ(cfg.regions[0].demographics.land_capacity, DemographicParams{}.land_capacity);
}

TEST(ScenarioSyntax, ReportsLineAndColumn) {
  auto e = syntax_error([] { parse_scenario("name = \"m\"\nhorizon 10\n"); });
  EXPECT_EQ(e.line(), 2u);
  EXPECT_EQ(e.column(), 9u);

  e = syntax_error([] { parse_scenario("name = \"m\"\n\n  seed = \"open\n"); });
  EXPECT_EQ(e.line(), 3u);
  EXPECT_EQ(e.column(), 15u);

  e = syntax_error([] { parse_scenario("horizon = 1x\n"); });
  EXPECT_EQ(e.line(), 1u);
  EXPECT_EQ(e.column(), 12u);

  e = syntax_error([] { parse_scenario("a.b = 1\n$x = 2\n"); });
  EXPECT_EQ(e.line(), 2u);
  EXPECT_EQ(e.column(), 1u);

  e = syntax_error([] { parse_scenario("k = [1, 2\n"); });
  EXPECT_EQ(e.line(), 1u);
}

TEST(ScenarioSyntax, DuplicateKey) {
  const auto e = syntax_error([] { parse_scenario("horizon = 1\nseed = 2\nhorizon = 3\n"); });
  EXPECT_EQ(e.line(), 3u);
  EXPECT_EQ(e.column(), 1u);
}

TEST(ScenarioSyntax, ErrorsAreModelErrors) {
  EXPECT_THROW(parse_scenario("=\n"), Error);
  EXPECT_THROW(parse_scenario(kMinimal.substr(0, 12)), Error);
}

TEST(ScenarioRoundTrip, EveryPreset) {
  for (const auto& name : preset_names()) {
    const auto cfg = preset(name);
    EXPECT_EQ(parse_scenario(serialize_scenario(cfg)), cfg) << name;
    EXPECT_EQ(serialize_scenario(parse_scenario(preset_text(name))), preset_text(name)) << name;
  }
}

TEST(ScenarioRoundTrip, RandomConfigs) {
  oracle::Inputs in(707);
  for (int trial = 0; trial < 300; ++trial) {
    ScenarioConfig c;
    c.name = "rand \"" + std::to_string(trial) + "\"\\";
    c.horizon = in.integer(1, 1000);
    c.seed = in.gen();
    c.genesis.idea_rate = in.uniform(0, 5);
    c.genesis.rd_delay = in.integer(1, 9);
    c.genesis.ex_ante_p = in.uniform(0, 1);
    c.genesis.productivity_spread = in.uniform(0, 1) / 3.0;
    c.genesis.initial_pool = in.integer(0, 5);
    c.finance.entrepreneurs = in.integer(1, 500);
    c.finance.concentration = in.uniform(0, 4);
    c.finance.consent_threshold = in.integer(0, 600);
    c.finance.max_candidate_age = in.integer(0, 9);
    c.selection.entry_share = in.uniform(0.001, 0.9);
    c.selection.eta = in.uniform(0, 3);
    c.demographics.base_birth = in.uniform(0, 0.1);
    c.demographics.land_capacity = in.uniform(1, 1e4);
    c.demographics.transition_step = in.integer(-1, 50);
    const int regions = in.integer(1, 4);
    for (int r = 0; r < regions; ++r) {
      RegionSpec spec;
      spec.name = "r" + std::to_string(r);
      spec.initial_productivity = in.uniform(0.1, 10);
      spec.idea_rate = in.integer(0, 1) ? c.genesis.idea_rate : in.uniform(0, 3);
      spec.demographics = c.demographics;
      if (in.integer(0, 1)) spec.demographics.famine_mortality = in.uniform(0, 1);
      c.regions.push_back(spec);
    }
    if (regions > 1) c.edges.push_back({"r0", "r1", in.uniform(0, 1)});
    if (in.integer(0, 1)) {
      c.shocks.push_back({in.integer(0, static_cast<int>(c.horizon) - 1), "r0", ShockKind::productivity, in.uniform(0, 2)});
    }
    if (in.integer(0, 1)) c.sweep = SweepSpec{{0, in.integer(1, 10), in.integer(11, 99)}, in.integer(1, 50)};
    const std::string text = serialize_scenario(c);
    ASSERT_EQ(parse_scenario(text), c) << text;
  }
}

TEST(Presets, NamedConstructions) {
  const auto ancien = preset("ancien-regime");
  EXPECT_GT(ancien.finance.consent_threshold, ancien.finance.entrepreneurs);
  EXPECT_EQ(preset("everlasting-growth").finance.consent_threshold, 0);
  EXPECT_TRUE(preset("panglossian-sweep").sweep.active());
  EXPECT_EQ(preset("collapse").regions.size(), 2u);
  EXPECT_EQ(preset("collapse").shocks.size(), 4u);
  EXPECT_THROW(preset("utopia"), UnknownPreset);
  EXPECT_THROW(preset_description("utopia"), UnknownPreset);
  for (const auto& name : preset_names()) EXPECT_FALSE(preset_description(name).empty());
}

TEST(Presets, CommittedFilesMatchCanonicalText) {
  for (const auto& name : preset_names()) {
    EXPECT_EQ(slurp(std::string(DSIM_SOURCE_DIR) + "/scenarios/" + name + ".scn"), preset_text(name)) << name;
  }
}

TEST(Schema, CommittedReferenceMatches) {
  EXPECT_EQ(slurp(std::string(DSIM_SOURCE_DIR) + "/docs/scenario-schema.txt"), scn::schema_text());
}

TEST(Schema, EveryKeyDocumented) {
  const auto text = scn::schema_text();
  for (const auto& row : scn::schema_rows()) {
    EXPECT_NE(text.find(row.key + " |"), std::string::npos) << row.key;
    EXPECT_FALSE(row.doc.empty()) << row.key;
  }
}

TEST(Schema, EverySerializedKeyIsDocumented) {
  std::set<std::string> keys;
  for (const auto& row : scn::schema_rows()) keys.insert(row.key);
  for (const auto& name : preset_names()) {
    for (const auto& e : scn::parse_document(preset_text(name))) {
      std::string k = e.path;
      for (const char* head : {"region.", "edge.", "shock."}) {
        if (k.starts_with(head)) {
          const auto dot = k.find('.', std::string(head).size());
          k = std::string(head) + "<i>" + k.substr(dot);
        }
      }
      EXPECT_TRUE(keys.contains(k)) << k;
    }
  }
}

TEST(Reweight, WorkedExample) {
  const ProbabilityTable t{{{"a", 0.2}, {"b", 0.3}, {"c", 0.5}}};
  const std::vector<double> w = {0.5, 1.0, 1.0};
  const auto out = subjective_reweight(t, w);
  EXPECT_NEAR(out.entries[0].frequency, 0.1 / 0.9, 1e-12);
  EXPECT_NEAR(out.entries[1].frequency, 0.3 / 0.9, 1e-12);
  EXPECT_NEAR(out.entries[2].frequency, 0.5 / 0.9, 1e-12);
  EXPECT_EQ(out.entries[1].label, "b");
}

TEST(Reweight, UnitWeightsAreNormalization) {
  const ProbabilityTable t{{{"a", 2.0}, {"b", 6.0}}};
  const std::vector<double> w = {1.0, 1.0};
  const auto out = subjective_reweight(t, w);
  EXPECT_DOUBLE_EQ(out.entries[0].frequency, 0.25);
  EXPECT_EQ(out, t.normalized());
}

TEST(Reweight, FullExclusionOfOneClass) {
  const auto out = subjective_reweight(ProbabilityTable{{{"a", 0.5}, {"b", 0.5}}}, std::vector<double>{0.0, 1.0});
  EXPECT_EQ(out.entries[0].frequency, 0.0);
  EXPECT_EQ(out.entries[1].frequency, 1.0);
}

TEST(Reweight, Errors) {
  const ProbabilityTable t{{{"a", 0.5}, {"b", 0.5}}};
  EXPECT_THROW(subjective_reweight(t, std::vector<double>{1.0}), LengthMismatch);
  EXPECT_THROW(subjective_reweight(t, std::vector<double>{0.0, 0.0}), AllMassExcluded);
  EXPECT_THROW(subjective_reweight(ProbabilityTable{{{"a", 0.0}}}, std::vector<double>{1.0}), AllMassExcluded);
}

TEST(Reweight, PropertiesOverRandomTables) {
  oracle::Inputs in(808);
  for (int trial = 0; trial < 1000; ++trial) {
    ProbabilityTable t;
    std::vector<double> w;
    const int k = in.integer(1, 10);
    for (int i = 0; i < k; ++i) {
      t.entries.push_back({"c" + std::to_string(i), in.uniform(0.01, 5)});
      w.push_back(in.uniform(0.01, 3));
    }
    const auto once = subjective_reweight(t, w);
    double sum = 0.0;
    for (const auto& e : once.entries) sum += e.frequency;
    ASSERT_NEAR(sum, 1.0, 1e-12);

    // Reweighting by w twice equals reweighting once by w^2.
    std::vector<double> w2;
    for (double x : w) w2.push_back(x * x);
    const auto twice = subjective_reweight(once, w);
    const auto squared = subjective_reweight(t, w2);
    std::vector<double> ones(w.size(), 1.0);
    const auto again = subjective_reweight(once, ones);
    std::vector<double> scaled;
    for (double x : w) scaled.push_back(x * 7.5);
    const auto scaled_out = subjective_reweight(t, scaled);
    ProbabilityTable rescaled = t;
    for (auto& e : rescaled.entries) e.frequency *= 13.0;
    const auto rescaled_out = subjective_reweight(rescaled, w);
    for (int i = 0; i < k; ++i) {
      ASSERT_NEAR(twice.entries[i].frequency, squared.entries[i].frequency, 1e-12);
      ASSERT_NEAR(again.entries[i].frequency, once.entries[i].frequency, 1e-12);
      ASSERT_NEAR(scaled_out.entries[i].frequency, once.entries[i].frequency, 1e-12);
      ASSERT_NEAR(rescaled_out.entries[i].frequency, once.entries[i].frequency, 1e-12);
    }
  }
}
