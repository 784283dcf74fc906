#pragma once

#include <algorithm>
#include <cmath>

#include "dsim/core/clock.hpp"
#include "dsim/types.hpp"

namespace dsim {

// Traditional agriculture is capped by land; industry is not.
enum class EconomicMode : std::uint8_t { traditional, industrial };

inline const char* to_string(EconomicMode m) { return m == EconomicMode::traditional ? "traditional" : "industrial"; }

struct PopulationState {
  RegionId region;
  double population = 0.0;   // millions of persons
  double birth_factor = 1.0;  // patriarchal multiplier on the baseline birth rate
  EconomicMode mode = EconomicMode::traditional;

  friend bool operator==(const PopulationState&, const PopulationState&) = default;
};

struct FoodAccount {
  double supply = 0.0;                  // food units per step
  double requirement_per_capita = 1.0;  // food units per person per step
};

struct DemographicParams {
  double population = 100.0;  // initial
  double base_birth = 0.03;
  double base_death = 0.02;
  double birth_factor = 1.0;
  double birth_factor_decay = 0.0;
  double requirement_per_capita = 0.4;
  double land_capacity = 100.0;
  double labor_share = 0.5;
  double famine_mortality = 0.5;
  Step transition_step = -1;  // < 0: never industrializes

  friend bool operator==(const DemographicParams&, const DemographicParams&) = default;
};

inline double food_supply(double productivity, double labor, double land_capacity, EconomicMode mode) {
  const double output = productivity * labor;
  return mode == EconomicMode::traditional ? std::min(output, land_capacity) : output;
}

// One step of the two opposing forces: births pushed up by the birth factor,
// deaths from old age plus famine among the unnourished.
inline PopulationState step_population(const PopulationState& state, const FoodAccount& food, double base_birth,
                                       double base_death, double famine_mortality) {
  PopulationState next = state;
  if (state.population <= 0.0) {
    next.population = 0.0;
    return next;
  }
  const double births = state.population * base_birth * state.birth_factor;
  const double nourished = std::min(state.population, food.supply / food.requirement_per_capita);
  const double famine_deaths = (state.population - nourished) * famine_mortality;
  const double natural_deaths = state.population * base_death;
  next.population = std::max(0.0, state.population + births - natural_deaths - famine_deaths);
  return next;
}

// From transition_step on the region is industrial (for good) and the birth
// factor relaxes toward 1 by the fraction `birth_factor_decay` each step.
inline PopulationState industrialize(const PopulationState& state, Step transition_step, Step current_step,
                                     double birth_factor_decay) {
  if (transition_step < 0 || current_step < transition_step) return state;
  PopulationState next = state;
  next.mode = EconomicMode::industrial;
  next.birth_factor = 1.0 + (state.birth_factor - 1.0) * (1.0 - birth_factor_decay);
  return next;
}

}  // namespace dsim
