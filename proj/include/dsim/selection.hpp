#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "dsim/core/errors.hpp"
#include "dsim/core/rng.hpp"
#include "dsim/genesis.hpp"
#include "dsim/types.hpp"

namespace dsim {

struct CertainTechnology {
  TechId id;
  double productivity = 1.0;        // output per labor unit per step; fixed after entry
  double ex_post_profit_rate = 0.0;  // set once, at market entry
  double adoption_share = 0.0;
  RegionId region;
  Step born_step = 0;
  Lifecycle state = Lifecycle::certain_candidate;

  friend bool operator==(const CertainTechnology&, const CertainTechnology&) = default;
};

struct SelectionParams {
  double entry_share = 0.05;
  double eta = 0.5;
  double extinction_floor = 1e-3;
  double ex_post_spread = 0.05;
};

// The technologies in production in one region.
class MarketState {
 public:
  MarketState() = default;

  MarketState(RegionId region, std::vector<CertainTechnology> technologies)
      : region_(region), technologies_(std::move(technologies)) {
    recompute();
  }

  // A region starts with one incumbent holding the whole market.
  static MarketState with_incumbent(RegionId region, double productivity, double profit_rate) {
    CertainTechnology inc;
    inc.id = incumbent_id(region);
    inc.productivity = productivity;
    inc.ex_post_profit_rate = profit_rate;
    inc.adoption_share = 1.0;
    inc.region = region;
    inc.born_step = -1;
    inc.state = Lifecycle::certain;
    return MarketState(region, {inc});
  }

  RegionId region() const noexcept { return region_; }
  const std::vector<CertainTechnology>& technologies() const noexcept { return technologies_; }
  double average_profit_rate() const noexcept { return average_profit_rate_; }

  double share_sum() const noexcept {
    double s = 0.0;
    for (const auto& t : technologies_) s += t.adoption_share;
    return s;
  }

  double weighted_productivity() const noexcept {
    double p = 0.0;
    for (const auto& t : technologies_) p += t.adoption_share * t.productivity;
    return p;
  }

  // Highest productivity in production; ties go to the smaller id.
  const CertainTechnology& best() const {
    return *std::min_element(technologies_.begin(), technologies_.end(), [](const auto& a, const auto& b) {
      if (a.productivity != b.productivity) return a.productivity > b.productivity;
      return a.id < b.id;
    });
  }

  bool holds(const TechId& id) const noexcept {
    return std::any_of(technologies_.begin(), technologies_.end(), [&](const auto& t) { return t.id == id; });
  }

  // Multiplies every productivity in the region (exogenous shock).
  void scale_productivity(double factor) {
    for (auto& t : technologies_) t.productivity *= factor;
  }

  friend bool operator==(const MarketState&, const MarketState&) = default;

 private:
  friend MarketState select_fittest(const MarketState&, std::span<CertainTechnology>, double);
  friend MarketState replicator_step(const MarketState&, double, double);

  void recompute() noexcept {
    double avg = 0.0;
    for (const auto& t : technologies_) avg += t.adoption_share * t.ex_post_profit_rate;
    average_profit_rate_ = avg;
  }

  void renormalize() noexcept {
    const double total = share_sum();
    for (auto& t : technologies_) t.adoption_share /= total;
    recompute();
  }

  RegionId region_;
  std::vector<CertainTechnology> technologies_;
  double average_profit_rate_ = 0.0;
};

struct Edge {
  RegionId from;
  RegionId to;
  double weight = 0.0;  // per-step diffusion probability

  friend bool operator==(const Edge&, const Edge&) = default;
};

// Directed, weighted communication links between regions. A region with no
// inbound link is a niche: it only ever sees its own innovations.
class RegionGraph {
 public:
  RegionGraph() = default;

  RegionGraph(std::size_t region_count, std::vector<Edge> edges) : region_count_(region_count), edges_(std::move(edges)) {
    for (const auto& e : edges_) {
      if (e.from.value >= region_count_ || e.to.value >= region_count_) throw Error("edge references unknown region");
      if (e.from == e.to) throw Error("self-links are not allowed");
      if (!(e.weight >= 0.0 && e.weight <= 1.0)) throw Error("edge weight must lie in [0, 1]");
    }
  }

  std::size_t region_count() const noexcept { return region_count_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  bool has_inbound(RegionId r) const noexcept {
    return std::any_of(edges_.begin(), edges_.end(), [r](const Edge& e) { return e.to == r && e.weight > 0.0; });
  }

 private:
  std::size_t region_count_ = 0;
  std::vector<Edge> edges_;
};

namespace detail {

// average +/- |spread * z|, above with probability p. Strictly away from the
// average even when the offset is lost to rounding.
inline double draw_ex_post_rate(double average, double p, double spread, RngEngine& engine) {
  const bool beats = engine.bernoulli(p);
  const double offset = std::abs(spread * engine.normal());
  double rate = beats ? average + offset : average - offset;
  if (beats && !(rate > average)) rate = std::nextafter(average, std::numeric_limits<double>::infinity());
  if (!beats && !(rate < average)) rate = std::nextafter(average, -std::numeric_limits<double>::infinity());
  return rate;
}

}  // namespace detail

// A financed technology meets the market: its ex-post profit rate beats the
// incumbents' average with probability ex_ante_p. Productivity comes from the
// technology's latent draw.
inline CertainTechnology realize_ex_post(const UncertainTechnology& tech, const MarketState& market, double ex_ante_p,
                                         double ex_post_spread, Step step, const RngStream& rng) {
  if (tech.state != Lifecycle::financed) {
    throw NotFinanced("technology " + tech.id.str() + " is " + to_string(tech.state) + ", not financed");
  }
  auto engine = rng.engine();
  CertainTechnology out;
  out.id = tech.id;
  out.productivity = tech.productivity();
  out.ex_post_profit_rate = detail::draw_ex_post_rate(market.average_profit_rate(), ex_ante_p, ex_post_spread, engine);
  out.adoption_share = 0.0;
  out.region = market.region();
  out.born_step = step;
  out.state = Lifecycle::certain_candidate;
  return out;
}

// Only the fittest survive: candidates whose ex-post rate beats the current
// average enter with `entry_share`, scaling the others down proportionally,
// in candidate order. The rest are discarded. With no survivor the market is
// returned unchanged.
inline MarketState select_fittest(const MarketState& market, std::span<CertainTechnology> candidates,
                                  double entry_share) {
  for (const auto& c : candidates) {
    if (c.region != market.region()) {
      throw RegionMismatch("candidate " + c.id.str() + " belongs to region " + std::to_string(c.region.value) +
                           ", market is region " + std::to_string(market.region().value));
    }
  }
  const double bar = market.average_profit_rate();
  MarketState next = market;
  bool changed = false;
  for (auto& c : candidates) {
    if (c.ex_post_profit_rate > bar && !next.holds(c.id)) {
      for (auto& t : next.technologies_) t.adoption_share *= (1.0 - entry_share);
      c.state = Lifecycle::certain;
      c.adoption_share = entry_share;
      next.technologies_.push_back(c);
      changed = true;
    } else {
      c.state = Lifecycle::discarded;
    }
  }
  if (!changed) return market;
  next.renormalize();
  return next;
}

// Competitive drive: shares move toward above-average profit rates,
//   share_i' ~ share_i * (1 + eta * (rate_i - average)),
// then shares under the extinction floor die out. The leader never dies.
inline MarketState replicator_step(const MarketState& market, double eta, double extinction_floor) {
  MarketState next = market;
  auto& techs = next.technologies_;
  const double avg = market.average_profit_rate();
  bool moved = false;
  for (auto& t : techs) {
    const double factor = std::max(0.0, 1.0 + eta * (t.ex_post_profit_rate - avg));
    if (factor != 1.0) moved = true;
    t.adoption_share *= factor;
  }
  if (!moved && std::none_of(techs.begin(), techs.end(),
                             [&](const auto& t) { return t.adoption_share < extinction_floor; })) {
    return market;
  }
  double total = 0.0;
  for (const auto& t : techs) total += t.adoption_share;
  for (auto& t : techs) t.adoption_share /= total;

  const auto leader = std::max_element(techs.begin(), techs.end(), [](const auto& a, const auto& b) {
    return a.adoption_share < b.adoption_share;
  });
  const TechId leader_id = leader->id;
  std::erase_if(techs, [&](const auto& t) { return t.adoption_share < extinction_floor && t.id != leader_id; });
  next.renormalize();
  return next;
}

// For each edge a->b that fires (probability = weight), a's most productive
// technology becomes a candidate in b, with its ex-post rate redrawn against
// b's average. Reads only the given snapshot; a destination that already
// runs the technology gets nothing. Result is indexed by destination region.
inline std::vector<std::vector<CertainTechnology>> diffuse(std::span<const MarketState> markets,
                                                           const RegionGraph& graph, double ex_ante_p,
                                                           double ex_post_spread, Step step, const RngStream& rng) {
  std::vector<std::vector<CertainTechnology>> incoming(markets.size());
  const auto& edges = graph.edges();
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const Edge& e = edges[i];
    if (!(e.weight > 0.0)) continue;
    auto engine = rng.derive(i).engine();
    if (!(e.weight >= 1.0) && !engine.bernoulli(e.weight)) continue;
    const MarketState& source = markets[e.from.value];
    const MarketState& dest = markets[e.to.value];
    const CertainTechnology& best = source.best();
    if (dest.holds(best.id)) continue;
    auto& bucket = incoming[e.to.value];
    if (std::any_of(bucket.begin(), bucket.end(), [&](const auto& c) { return c.id == best.id; })) continue;

    CertainTechnology copy = best;
    copy.region = e.to;
    copy.adoption_share = 0.0;
    copy.born_step = step;
    copy.state = Lifecycle::certain_candidate;
    copy.ex_post_profit_rate = detail::draw_ex_post_rate(dest.average_profit_rate(), ex_ante_p, ex_post_spread, engine);
    bucket.push_back(copy);
  }
  return incoming;
}

// Mean log-growth per step of share-weighted productivity:
//   (ln P_last - ln P_first) / (length - 1).
inline double pace_of_evolution(std::span<const double> trace) {
  if (trace.size() < 2) throw TraceTooShort("productivity trace needs at least 2 points");
  for (double p : trace) {
    if (!(p > 0.0)) throw NonPositiveProductivity("productivity trace contains a non-positive value");
  }
  return (std::log(trace.back()) - std::log(trace.front())) / static_cast<double>(trace.size() - 1);
}

}  // namespace dsim
