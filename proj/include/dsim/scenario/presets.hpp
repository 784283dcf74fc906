#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "dsim/core/errors.hpp"
#include "dsim/scenario/scenario.hpp"

namespace dsim {

namespace presets_detail {

// Single-economy baseline used by the competition sweep. Most other presets
// are edits of it.
inline constexpr std::string_view kReference = R"(name = "reference"
horizon = 100
seed = 20240601
genesis.idea_rate = 1.0
genesis.rd_delay = 2
genesis.ex_ante_p = 0.3
genesis.productivity_spread = 0.1
finance.entrepreneurs = 100
finance.concentration = 1.35
finance.consent_threshold = 20
finance.max_candidate_age = 5
selection.entry_share = 0.05
selection.eta = 0.5
selection.extinction_floor = 0.001
selection.ex_post_spread = 0.05
region.0.name = "economy"
)";

// Industrial transition: birth_factor found by tools/calibrate_malthus so
// that 100 one-year steps multiply population by 6000/1656.
inline constexpr std::string_view kIndustrial = R"(name = "industrial-transition"
horizon = 100
seed = 1900
genesis.idea_rate = 0.0
demographics.population = 1656.0
demographics.base_birth = 0.018
demographics.base_death = 0.02
demographics.birth_factor = 2.9596655285859015
demographics.birth_factor_decay = 0.02
demographics.requirement_per_capita = 1.0
demographics.land_capacity = 1000.0
demographics.labor_share = 0.5
demographics.famine_mortality = 0.5
demographics.transition_step = 0
region.0.name = "world"
region.0.initial_productivity = 4.0
)";

inline constexpr std::string_view kMalthusian = R"(name = "malthusian-trap"
horizon = 500
seed = 1798
genesis.idea_rate = 0.0
demographics.population = 50.0
demographics.base_birth = 0.03
demographics.base_death = 0.01
demographics.birth_factor = 1.0
demographics.requirement_per_capita = 1.0
demographics.land_capacity = 100.0
demographics.labor_share = 0.5
demographics.famine_mortality = 0.5
region.0.name = "agrarian"
region.0.initial_productivity = 2.0
)";

inline ScenarioConfig reference_named(std::string_view name) {
  ScenarioConfig cfg = parse_scenario(kReference);
  cfg.name = std::string(name);
  return cfg;
}

inline RegionSpec region_like(const ScenarioConfig& cfg, std::string name, double idea_rate) {
  RegionSpec r = cfg.regions.front();
  r.name = std::move(name);
  r.idea_rate = idea_rate;
  return r;
}

}  // namespace presets_detail

inline const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"reference",        "everlasting-growth",    "ancien-regime",
                                                 "collapse",         "panglossian-sweep",     "industrial-transition",
                                                 "malthusian-trap",  "archipelago"};
  return names;
}

inline std::string preset_description(std::string_view name) {
  if (name == "reference") return "single economy; baseline for the consent-threshold sweep";
  if (name == "everlasting-growth") return "fierce competition: every ready technology is financed (threshold 0)";
  if (name == "ancien-regime") return "threshold above the number of entrepreneurs: no mutation is ever financed";
  if (name == "collapse") return "two linked regions hit mid-run by a population and productivity shock";
  if (name == "panglossian-sweep") return "sweep directive over the consent threshold, not a single run";
  if (name == "industrial-transition") return "calibrated 100-year industrial population surge";
  if (name == "malthusian-trap") return "traditional agriculture pinned at its land-carrying level";
  if (name == "archipelago") return "three regions, one of them an isolated niche";
  throw UnknownPreset("unknown preset '" + std::string(name) + "'");
}

inline ScenarioConfig preset(std::string_view name) {
  using namespace presets_detail;
  if (name == "reference") return parse_scenario(kReference);
  if (name == "industrial-transition") return parse_scenario(kIndustrial);
  if (name == "malthusian-trap") return parse_scenario(kMalthusian);

  ScenarioConfig cfg = reference_named(name);
  if (name == "everlasting-growth") {
    cfg.horizon = 200;
    cfg.finance.consent_threshold = 0;
  } else if (name == "ancien-regime") {
    cfg.finance.consent_threshold = cfg.finance.entrepreneurs + 1;
  } else if (name == "collapse") {
    cfg.horizon = 200;
    cfg.regions = {region_like(cfg, "core", 1.0), region_like(cfg, "periphery", 0.5)};
    cfg.edges = {{"core", "periphery", 0.1}, {"periphery", "core", 0.1}};
    cfg.shocks = {{100, "core", ShockKind::population, 0.2},
                  {100, "core", ShockKind::productivity, 0.3},
                  {100, "periphery", ShockKind::population, 0.2},
                  {100, "periphery", ShockKind::productivity, 0.3}};
  } else if (name == "panglossian-sweep") {
    cfg.sweep = SweepSpec{{0, 10, 20, 30, 40, 50, 60}, 1000};
  } else if (name == "archipelago") {
    cfg.horizon = 200;
    cfg.regions = {region_like(cfg, "mainland", 1.0), region_like(cfg, "island", 0.2),
                   region_like(cfg, "niche", 0.0)};
    cfg.edges = {{"mainland", "island", 0.2}};
  } else {
    throw UnknownPreset("unknown preset '" + std::string(name) + "'");
  }
  return cfg;
}

// Canonical scenario text of a preset, as committed under scenarios/.
inline std::string preset_text(std::string_view name) { return serialize_scenario(preset(name)); }

}  // namespace dsim
