#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <optional>
#include <span>
#include <thread>
#include <vector>

#include "dsim/core/errors.hpp"
#include "dsim/montecarlo/simulation.hpp"

namespace dsim {

// Pairwise (cascade) summation in index order. The tree shape depends only on
// the length, so the result does not depend on who computed the terms.
inline double pairwise_sum(std::span<const double> xs) {
  if (xs.size() <= 8) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

// Count, mean and sum of squared deviations; mergeable (Chan et al.).
struct Moments {
  std::size_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  static Moments of(std::span<const double> xs) {
    Moments m;
    m.count = xs.size();
    if (xs.empty()) return m;
    m.mean = pairwise_sum(xs) / static_cast<double>(xs.size());
    std::vector<double> sq(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) sq[i] = (xs[i] - m.mean) * (xs[i] - m.mean);
    m.m2 = pairwise_sum(sq);
    return m;
  }

  Moments merged(const Moments& o) const {
    if (count == 0) return o;
    if (o.count == 0) return *this;
    Moments m;
    m.count = count + o.count;
    const double n = static_cast<double>(m.count);
    const double delta = o.mean - mean;
    m.mean = mean + delta * static_cast<double>(o.count) / n;
    m.m2 = m2 + o.m2 + delta * delta * static_cast<double>(count) * static_cast<double>(o.count) / n;
    return m;
  }

  // Sample standard deviation; 0 for a single observation.
  double sd() const { return count > 1 ? std::sqrt(m2 / static_cast<double>(count - 1)) : 0.0; }
  double standard_error() const { return count > 0 ? sd() / std::sqrt(static_cast<double>(count)) : 0.0; }
};

struct RegionAggregate {
  Moments pace;
  Moments total_mutations;
  Moments final_population;
};

struct RunAggregate {
  std::size_t replications = 0;
  std::vector<RegionAggregate> regions;
  Moments system_pace;
  Moments total_mutations;

  RunAggregate merged(const RunAggregate& o) const {
    if (replications == 0) return o;
    if (o.replications == 0) return *this;
    RunAggregate m;
    m.replications = replications + o.replications;
    m.regions.resize(regions.size());
    for (std::size_t r = 0; r < regions.size(); ++r) {
      m.regions[r].pace = regions[r].pace.merged(o.regions[r].pace);
      m.regions[r].total_mutations = regions[r].total_mutations.merged(o.regions[r].total_mutations);
      m.regions[r].final_population = regions[r].final_population.merged(o.regions[r].final_population);
    }
    m.system_pace = system_pace.merged(o.system_pace);
    m.total_mutations = total_mutations.merged(o.total_mutations);
    return m;
  }
};

// Aggregates summaries in the order given (replication index order).
inline RunAggregate aggregate(std::span<const RunSummary> summaries) {
  RunAggregate agg;
  agg.replications = summaries.size();
  if (summaries.empty()) return agg;
  const std::size_t regions = summaries.front().regions.size();
  std::vector<double> xs(summaries.size());
  auto column = [&](auto&& get) {
    for (std::size_t i = 0; i < summaries.size(); ++i) xs[i] = get(summaries[i]);
    return Moments::of(xs);
  };
  agg.regions.resize(regions);
  for (std::size_t r = 0; r < regions; ++r) {
    agg.regions[r].pace = column([r](const RunSummary& s) { return s.regions[r].pace; });
    agg.regions[r].total_mutations =
        column([r](const RunSummary& s) { return static_cast<double>(s.regions[r].total_mutations); });
    agg.regions[r].final_population = column([r](const RunSummary& s) { return s.regions[r].final_population; });
  }
  agg.system_pace = column([](const RunSummary& s) { return s.system_pace; });
  agg.total_mutations = column([](const RunSummary& s) { return static_cast<double>(s.total_mutations); });
  return agg;
}

struct RunManyOptions {
  unsigned workers = 1;                    // 0: hardware concurrency
  std::vector<std::size_t> order;          // execution order (testing); empty = 0..n-1
  bool keep_steps = true;                  // false drops per-step records from returned reports
};

struct ManyResult {
  std::vector<RunReport> reports;  // indexed by replication
  RunAggregate aggregate;
};

inline unsigned resolve_workers(unsigned requested) {
  if (requested == 0) requested = std::max(1u, std::thread::hardware_concurrency());
  return requested;
}

// Replication k runs on the stream (base_seed, "rep", k). Results are stored
// by k and reduced in k order, so any worker count or execution order gives
// the same bytes.
template <PreferenceCaster Caster = AnimalSpirits>
ManyResult run_many(const ScenarioConfig& config, std::size_t replications, std::uint64_t base_seed,
                    const RunManyOptions& options = {}, const Caster& caster = Caster{}) {
  if (replications < 1) throw Error("replications must be >= 1");
  std::vector<std::size_t> order = options.order;
  if (order.empty()) {
    order.resize(replications);
    std::iota(order.begin(), order.end(), std::size_t{0});
  }
  if (order.size() != replications) throw Error("execution order must list every replication once");

  ManyResult result;
  result.reports.resize(replications);
  std::vector<char> done(replications, 0);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};

  auto work = [&] {
    while (!failed.load()) {
      const std::size_t slot = next.fetch_add(1);
      if (slot >= order.size()) return;
      const std::size_t k = order[slot];
      try {
        Simulation<Caster> sim(config, replication_stream(base_seed, k), caster);
        sim.set_replication(k);
        while (!sim.finished()) sim.step();
        RunReport rep = sim.report();
        rep.seed = base_seed;
        if (!options.keep_steps) rep.steps.clear();
        result.reports[k] = std::move(rep);
        done[k] = 1;
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
        return;
      }
    }
  };

  const unsigned workers = std::min<std::size_t>(resolve_workers(options.workers), replications);
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);
  if (std::find(done.begin(), done.end(), 0) != done.end()) throw Error("execution order skipped a replication");

  std::vector<RunSummary> summaries;
  summaries.reserve(replications);
  for (const auto& r : result.reports) summaries.push_back(r.summary);
  result.aggregate = aggregate(summaries);
  return result;
}

struct SweepRow {
  int theta = 0;
  std::size_t replications = 0;
  double mean_pace = 0.0;
  double sd_pace = 0.0;
  double mean_mutations = 0.0;  // mean total mutations per replication
  double mean_mutations_per_step = 0.0;

  friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

struct SweepReport {
  std::string name;
  std::uint64_t base_seed = 0;
  Step horizon = 0;
  std::vector<SweepRow> rows;
  std::optional<double> correlation;  // Spearman(theta, mean pace); absent for < 2 rows

  friend bool operator==(const SweepReport&, const SweepReport&) = default;
};

// Average ranks (1-based), ties sharing the mean of their positions.
inline std::vector<double> ranks(std::span<const double> xs) {
  std::vector<std::size_t> idx(xs.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  std::vector<double> out(xs.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && xs[idx[j + 1]] == xs[idx[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) out[idx[k]] = avg;
    i = j + 1;
  }
  return out;
}

// Spearman rank correlation: Pearson correlation of the average ranks.
// Absent when fewer than two points or either side is constant.
inline std::optional<double> spearman(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw LengthMismatch("spearman: series lengths differ");
  if (xs.size() < 2) return std::nullopt;
  const auto rx = ranks(xs);
  const auto ry = ranks(ys);
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return sxy / std::sqrt(sxx * syy);
}

inline void validate_thetas(std::span<const int> thetas) {
  if (thetas.empty()) throw ThetaListInvalid("theta list is empty");
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    if (thetas[i] < 0) throw ThetaListInvalid("thresholds must be non-negative");
    if (i > 0 && thetas[i] <= thetas[i - 1]) throw ThetaListInvalid("thresholds must be ascending and distinct");
  }
}

// The competition experiment: every threshold is run with the same base
// seed and all other parameters fixed.
template <PreferenceCaster Caster = AnimalSpirits>
SweepReport sweep_threshold(const ScenarioConfig& config, std::span<const int> thetas, std::size_t replications,
                            std::optional<std::uint64_t> base_seed = std::nullopt, RunManyOptions options = {},
                            const Caster& caster = Caster{}) {
  validate_thetas(thetas);
  SweepReport report;
  report.name = config.name;
  report.base_seed = base_seed.value_or(config.seed);
  report.horizon = config.horizon;
  options.keep_steps = false;
  std::vector<double> xs, ys;
  for (int theta : thetas) {
    ScenarioConfig cfg = config;
    cfg.finance.consent_threshold = theta;
    const ManyResult many = run_many(cfg, replications, report.base_seed, options, caster);
    SweepRow row;
    row.theta = theta;
    row.replications = replications;
    row.mean_pace = many.aggregate.system_pace.mean;
    row.sd_pace = many.aggregate.system_pace.sd();
    row.mean_mutations = many.aggregate.total_mutations.mean;
    row.mean_mutations_per_step = row.mean_mutations / static_cast<double>(config.horizon);
    report.rows.push_back(row);
    xs.push_back(theta);
    ys.push_back(row.mean_pace);
  }
  report.correlation = spearman(xs, ys);
  return report;
}

inline std::string to_csv(const SweepReport& report) {
  using scn::format_real;
  std::string out = "theta,reps,mean_mutations,mean_pace,sd_pace\n";
  for (const auto& r : report.rows) {
    out += std::to_string(r.theta) + "," + std::to_string(r.replications) + "," + format_real(r.mean_mutations) + "," +
           format_real(r.mean_pace) + "," + format_real(r.sd_pace) + "\n";
  }
  return out;
}

inline std::string sweep_summary(const SweepReport& report) {
  using scn::format_real;
  std::string out = "# sweep summary\n";
  out += "sweep.name = " + scn::quote(report.name) + "\n";
  out += "sweep.seed = " + std::to_string(report.base_seed) + "\n";
  out += "sweep.horizon = " + std::to_string(report.horizon) + "\n";
  out += "sweep.rows = " + std::to_string(report.rows.size()) + "\n";
  out += "sweep.spearman_theta_pace = " + (report.correlation ? format_real(*report.correlation) : scn::quote("absent")) + "\n";
  return out;
}

}  // namespace dsim
