#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dsim/core/clock.hpp"
#include "dsim/demographics.hpp"
#include "dsim/selection.hpp"

namespace dsim {

struct GenesisParams {
  double idea_rate = 1.0;  // Poisson mean, ideas per region per step
  Step rd_delay = 2;
  double ex_ante_p = 0.3;
  double productivity_spread = 0.1;
  int initial_pool = 0;  // uncertain technologies per region ready at step 0
  double rd_cost = 0.0;

  friend bool operator==(const GenesisParams&, const GenesisParams&) = default;
};

struct FinanceParams {
  int entrepreneurs = 100;
  double concentration = 1.0;
  int consent_threshold = 20;
  Step max_candidate_age = 0;  // 0: unfinanced candidates never expire

  friend bool operator==(const FinanceParams&, const FinanceParams&) = default;
};

struct SelectionConfig {
  double entry_share = 0.05;
  double eta = 0.5;
  double extinction_floor = 1e-3;
  double ex_post_spread = 0.05;

  SelectionParams params() const { return {entry_share, eta, extinction_floor, ex_post_spread}; }

  friend bool operator==(const SelectionConfig&, const SelectionConfig&) = default;
};

struct RegionSpec {
  std::string name;
  double initial_productivity = 1.0;
  double initial_profit_rate = 0.1;
  double idea_rate = 1.0;  // inherits genesis.idea_rate when not given
  DemographicParams demographics;  // inherits the top-level demographics block

  friend bool operator==(const RegionSpec&, const RegionSpec&) = default;
};

struct EdgeSpec {
  std::string from;
  std::string to;
  double weight = 0.0;

  friend bool operator==(const EdgeSpec&, const EdgeSpec&) = default;
};

enum class ShockKind : std::uint8_t { population, productivity };

inline const char* to_string(ShockKind k) { return k == ShockKind::population ? "population" : "productivity"; }

// Exogenous multiplicative event applied at the start of `step`.
struct ShockSpec {
  Step step = 0;
  std::string region;
  ShockKind kind = ShockKind::population;
  double magnitude = 1.0;

  friend bool operator==(const ShockSpec&, const ShockSpec&) = default;
};

// Present when `thetas` is non-empty: the scenario is a sweep over the
// consent threshold rather than a single run.
struct SweepSpec {
  std::vector<int> thetas;
  int replications = 100;

  bool active() const noexcept { return !thetas.empty(); }

  friend bool operator==(const SweepSpec&, const SweepSpec&) = default;
};

struct ScenarioConfig {
  std::string name;
  Step horizon = 1;
  std::uint64_t seed = 0;
  GenesisParams genesis;
  FinanceParams finance;
  SelectionConfig selection;
  DemographicParams demographics;  // defaults inherited by every region
  std::vector<RegionSpec> regions;
  std::vector<EdgeSpec> edges;
  std::vector<ShockSpec> shocks;
  SweepSpec sweep;

  std::size_t region_index(const std::string& region_name) const {
    for (std::size_t i = 0; i < regions.size(); ++i) {
      if (regions[i].name == region_name) return i;
    }
    return regions.size();
  }

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

}  // namespace dsim
