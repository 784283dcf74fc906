#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "dsim/core/errors.hpp"
#include "dsim/core/rng.hpp"
#include "dsim/types.hpp"

namespace dsim {

// An innovative idea, conceived by a single individual. Atomic: never merged.
struct Idea {
  IdeaId id;
  Step conception_step = 0;
  RegionId region;

  friend bool operator==(const Idea&, const Idea&) = default;
};

// Lognormal law of a technology's productivity: location is the median
// (output per labor unit per step), spread the sigma of its logarithm.
struct ProductivityParams {
  double location = 1.0;
  double spread = 0.0;

  friend bool operator==(const ProductivityParams&, const ProductivityParams&) = default;
};

struct UncertainTechnology {
  TechId id;
  IdeaId source_idea;
  double ex_ante_success_prob = 0.0;
  ProductivityParams productivity_params;
  // Standard-normal latent quality fixed at the end of R&D. Entrepreneurs see
  // it through noise; realized productivity is location * exp(spread * latent).
  double latent_signal = 0.0;
  Step readiness_step = 0;
  RegionId region;
  Lifecycle state = Lifecycle::uncertain;
  double rd_cost = 0.0;  // recorded only

  double productivity() const { return productivity_params.location * std::exp(productivity_params.spread * latent_signal); }

  friend bool operator==(const UncertainTechnology&, const UncertainTechnology&) = default;
};

// Poisson(rate) arrivals for one region and step. Ids are (region, step, k),
// unique within a run because each (region, step) is sampled once.
inline std::vector<Idea> sample_idea_arrivals(double rate, RegionId region, Step step, const RngStream& rng) {
  std::vector<Idea> ideas;
  if (!(rate > 0.0)) return ideas;
  auto engine = rng.engine();
  const auto count = engine.poisson(rate);
  ideas.reserve(count);
  for (std::uint64_t k = 0; k < count; ++k) {
    ideas.push_back(Idea{TechId{region.value, step, static_cast<std::uint32_t>(k)}, step, region});
  }
  return ideas;
}

inline UncertainTechnology develop(const Idea& idea, Step rd_delay, double ex_ante_p, ProductivityParams params,
                                   const RngStream& rng, double rd_cost = 0.0) {
  if (rd_delay < 1) throw DelayInvalid("R&D delay must be >= 1 step, got " + std::to_string(rd_delay));
  auto engine = rng.engine();
  UncertainTechnology tech;
  tech.id = idea.id;
  tech.source_idea = idea.id;
  tech.ex_ante_success_prob = ex_ante_p;
  tech.productivity_params = params;
  tech.latent_signal = engine.normal();
  tech.readiness_step = idea.conception_step + rd_delay;
  tech.region = idea.region;
  tech.rd_cost = rd_cost;
  return tech;
}

// Technologies whose R&D is complete and which are still waiting for finance.
inline std::vector<UncertainTechnology> ready_pool(std::span<const UncertainTechnology> all_uncertain, Step step) {
  std::vector<UncertainTechnology> ready;
  std::copy_if(all_uncertain.begin(), all_uncertain.end(), std::back_inserter(ready), [step](const auto& t) {
    return t.readiness_step <= step && t.state == Lifecycle::uncertain;
  });
  return ready;
}

}  // namespace dsim
