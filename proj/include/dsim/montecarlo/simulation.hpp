#pragma once

#include <algorithm>
#include <optional>
#include <span>
#include <vector>

#include "dsim/core/clock.hpp"
#include "dsim/core/rng.hpp"
#include "dsim/demographics.hpp"
#include "dsim/finance.hpp"
#include "dsim/genesis.hpp"
#include "dsim/montecarlo/report.hpp"
#include "dsim/scenario/config.hpp"
#include "dsim/selection.hpp"

namespace dsim {

inline RegionGraph build_graph(const ScenarioConfig& cfg) {
  std::vector<Edge> edges;
  edges.reserve(cfg.edges.size());
  for (const auto& e : cfg.edges) {
    edges.push_back(Edge{RegionId{static_cast<std::uint32_t>(cfg.region_index(e.from))},
                         RegionId{static_cast<std::uint32_t>(cfg.region_index(e.to))}, e.weight});
  }
  return RegionGraph(cfg.regions.size(), std::move(edges));
}

// One replication, stepped explicitly. Each step runs, per region:
// shocks, idea arrivals and R&D, the financing round, ex-post realization,
// selection, replicator drift; then diffusion across regions (read from a
// snapshot, delivered next step) and the population update. Stepping past
// the horizon raises HorizonExceeded.
template <PreferenceCaster Caster = AnimalSpirits>
class Simulation {
 public:
  Simulation(ScenarioConfig config, RngStream root, Caster caster = Caster{})
      : cfg_(std::move(config)),
        root_(std::move(root)),
        caster_(std::move(caster)),
        clock_(SimulationClock::create(cfg_.horizon)),
        graph_(build_graph(cfg_)) {
    const std::size_t n = cfg_.regions.size();
    pending_.resize(n);
    inbound_.resize(n);
    report_.name = cfg_.name;
    report_.seed = root_.seed();
    report_.horizon = cfg_.horizon;
    for (std::size_t r = 0; r < n; ++r) {
      const auto& spec = cfg_.regions[r];
      const RegionId id{static_cast<std::uint32_t>(r)};
      markets_.push_back(MarketState::with_incumbent(id, spec.initial_productivity, spec.initial_profit_rate));
      populations_.push_back(PopulationState{id, spec.demographics.population, spec.demographics.birth_factor,
                                             EconomicMode::traditional});
      report_.region_names.push_back(spec.name);
      report_.initial_productivity.push_back(markets_.back().weighted_productivity());
      report_.initial_population.push_back(spec.demographics.population);

      // Seeded R&D pool, ready at step 0.
      const auto seed_stream = root_.derive("initial-pool").derive(r);
      for (int k = 0; k < cfg_.genesis.initial_pool; ++k) {
        const Idea idea{TechId{id.value, -cfg_.genesis.rd_delay, static_cast<std::uint32_t>(k)},
                        -cfg_.genesis.rd_delay, id};
        pending_[r].push_back(develop(idea, cfg_.genesis.rd_delay, cfg_.genesis.ex_ante_p, productivity_params(r),
                                      seed_stream.derive(static_cast<std::uint64_t>(k)), cfg_.genesis.rd_cost));
      }
    }
  }

  const ScenarioConfig& config() const noexcept { return cfg_; }
  const SimulationClock& clock() const noexcept { return clock_; }
  bool finished() const noexcept { return clock_.finished(); }
  const std::vector<MarketState>& markets() const noexcept { return markets_; }
  const std::vector<PopulationState>& populations() const noexcept { return populations_; }
  const std::vector<UncertainTechnology>& pending(std::size_t region) const { return pending_.at(region); }
  const RunReport& partial_report() const noexcept { return report_; }

  const StepRecord& step() {
    if (clock_.finished()) {
      throw HorizonExceeded("run '" + cfg_.name + "' already reached its horizon of " + std::to_string(cfg_.horizon) +
                            " steps; start a new run with a longer horizon instead");
    }
    const Step t = clock_.t();
    const std::size_t n = markets_.size();
    const RngStream step_stream = root_.derive(static_cast<std::uint64_t>(t));

    apply_shocks(t);

    StepRecord record;
    record.step = t + 1;
    record.regions.resize(n);
    const SelectionParams sel = cfg_.selection.params();

    for (std::size_t r = 0; r < n; ++r) {
      const RegionId id{static_cast<std::uint32_t>(r)};
      const RngStream rs = step_stream.derive(r);
      RegionStep& m = record.regions[r];

      // Mutation appearance: ideas, then R&D.
      const auto ideas = sample_idea_arrivals(cfg_.regions[r].idea_rate, id, t, rs.derive("ideas"));
      if (!ideas.empty()) {
        const RngStream dev = rs.derive("develop");
        for (std::size_t k = 0; k < ideas.size(); ++k) {
          pending_[r].push_back(develop(ideas[k], cfg_.genesis.rd_delay, cfg_.genesis.ex_ante_p,
                                        productivity_params(r), dev.derive(k), cfg_.genesis.rd_cost));
        }
      }

      // Stale candidates leave the pool.
      if (cfg_.finance.max_candidate_age > 0) {
        for (auto& u : pending_[r]) {
          if (u.state == Lifecycle::uncertain && t - u.readiness_step >= cfg_.finance.max_candidate_age) {
            u.state = Lifecycle::discarded;
          }
        }
      }

      // Financing round over the ready pool.
      std::vector<UncertainTechnology> ready = ready_pool(pending_[r], t);
      m.candidates = static_cast<int>(ready.size());
      PreferenceTally tally;
      const MutationBatch batch =
          finance_round(EntrepreneurPool{cfg_.finance.entrepreneurs, cfg_.finance.concentration}, std::span(ready),
                        BankerPolicy{cfg_.finance.consent_threshold}, t, rs.derive("finance"), &tally, caster_);
      m.mutations = batch.mutation_count;
      m.top_count = tally.top();

      // Ex-post realization of the mutations, plus technologies diffused in.
      std::vector<CertainTechnology> candidates = std::move(inbound_[r]);
      inbound_[r].clear();
      const RngStream expost = rs.derive("ex-post");
      for (const auto& u : ready) {
        if (u.state != Lifecycle::financed) continue;
        candidates.push_back(
            realize_ex_post(u, markets_[r], cfg_.genesis.ex_ante_p, sel.ex_post_spread, t, expost.derive(u.id.str())));
      }
      std::sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) { return a.id < b.id; });

      // Selection of the fittest, then competitive drift.
      const std::size_t before = markets_[r].technologies().size();
      MarketState selected = select_fittest(markets_[r], std::span(candidates), sel.entry_share);
      m.entrants = static_cast<int>(selected.technologies().size() - before);
      markets_[r] = replicator_step(selected, sel.eta, sel.extinction_floor);

      // Financed and expired technologies leave the R&D pool.
      std::erase_if(pending_[r], [&](const UncertainTechnology& u) {
        if (u.state == Lifecycle::discarded) return true;
        return std::any_of(batch.financed.begin(), batch.financed.end(), [&](const TechId& f) { return f == u.id; });
      });
    }

    if (!graph_.edges().empty()) {
      inbound_ = diffuse(std::span<const MarketState>(markets_), graph_, cfg_.genesis.ex_ante_p,
                         sel.ex_post_spread, t, step_stream.derive("diffusion"));
    }

    for (std::size_t r = 0; r < n; ++r) {
      const auto& d = cfg_.regions[r].demographics;
      RegionStep& m = record.regions[r];
      m.productivity = markets_[r].weighted_productivity();
      m.avg_profit_rate = markets_[r].average_profit_rate();
      PopulationState p = industrialize(populations_[r], d.transition_step, t, d.birth_factor_decay);
      const double labor = p.population * d.labor_share;
      const FoodAccount food{food_supply(m.productivity, labor, d.land_capacity, p.mode), d.requirement_per_capita};
      populations_[r] = step_population(p, food, d.base_birth, d.base_death, d.famine_mortality);
      m.population = populations_[r].population;
    }

    clock_ = clock_.advanced();
    report_.steps.push_back(std::move(record));
    return report_.steps.back();
  }

  // Runs to the horizon and returns the verified report.
  RunReport run() {
    while (!finished()) step();
    return report();
  }

  RunReport report() const {
    if (!finished()) throw Error("report requested before the horizon was reached");
    RunReport out = report_;
    out.summary = summarize(out);
    return out;
  }

  void set_replication(std::uint64_t k) { report_.replication = k; }

 private:
  // New technologies are drawn around the region's current frontier.
  ProductivityParams productivity_params(std::size_t r) const {
    return ProductivityParams{markets_[r].best().productivity, cfg_.genesis.productivity_spread};
  }

  void apply_shocks(Step t) {
    for (const auto& s : cfg_.shocks) {
      if (s.step != t) continue;
      const std::size_t r = cfg_.region_index(s.region);
      if (s.kind == ShockKind::population) {
        populations_[r].population *= s.magnitude;
      } else {
        markets_[r].scale_productivity(s.magnitude);
      }
    }
  }

  ScenarioConfig cfg_;
  RngStream root_;
  Caster caster_;
  SimulationClock clock_;
  RegionGraph graph_;
  std::vector<MarketState> markets_;
  std::vector<PopulationState> populations_;
  std::vector<std::vector<UncertainTechnology>> pending_;
  std::vector<std::vector<CertainTechnology>> inbound_;
  RunReport report_;
};

inline RngStream replication_stream(std::uint64_t base_seed, std::uint64_t k) {
  return RngStream::root(base_seed).derive("rep").derive(k);
}

template <PreferenceCaster Caster = AnimalSpirits>
RunReport run_with_stream(const ScenarioConfig& config, const RngStream& root, const Caster& caster = Caster{}) {
  Simulation<Caster> sim(config, root, caster);
  return sim.run();
}

// A single deterministic run from the scenario's seed (or the override).
template <PreferenceCaster Caster = AnimalSpirits>
RunReport run_once(const ScenarioConfig& config, std::optional<std::uint64_t> seed_override = std::nullopt,
                   const Caster& caster = Caster{}) {
  return run_with_stream(config, RngStream::root(seed_override.value_or(config.seed)), caster);
}

}  // namespace dsim
