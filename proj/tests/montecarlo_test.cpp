#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "dsim/montecarlo/replication.hpp"
#include "dsim/montecarlo/simulation.hpp"
#include "dsim/scenario/presets.hpp"
#include "oracles.hpp"

using namespace dsim;

namespace {

ScenarioConfig short_reference(Step horizon = 30) {
  auto cfg = preset("reference");
  cfg.horizon = horizon;
  return cfg;
}

// Assigns the counts [50, 25, 13, 7, 4, 1] to the candidates in the order
// given, whatever they are.
struct WorkedExampleCaster {
  PreferenceTally operator()(const EntrepreneurPool&, std::span<const UncertainTechnology> candidates,
                             const RngStream&) const {
    const int counts[] = {50, 25, 13, 7, 4, 1};
    std::vector<TallyEntry> entries;
    for (std::size_t i = 0; i < candidates.size() && i < 6; ++i) entries.push_back({candidates[i].id, counts[i]});
    return PreferenceTally(entries);
  }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  EXPECT_TRUE(in) << path;
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST(Simulation, SameSeedSameReport) {
  const auto cfg = short_reference();
  const auto a = run_once(cfg, 11);
  const auto b = run_once(cfg, 11);
  EXPECT_EQ(a, b);
  EXPECT_EQ(to_csv(a), to_csv(b));
  EXPECT_NE(to_csv(a), to_csv(run_once(cfg, 12)));
}

TEST(Simulation, NoIdeasNoMovement) {
  auto cfg = short_reference();
  cfg.genesis.idea_rate = 0.0;
  for (auto& r : cfg.regions) r.idea_rate = 0.0;
  const auto rep = run_once(cfg);
  EXPECT_EQ(rep.summary.system_pace, 0.0);
  EXPECT_EQ(rep.summary.total_mutations, 0);
}

TEST(Simulation, StepPastHorizonThrows) {
  Simulation sim(short_reference(3), RngStream::root(1));
  for (int i = 0; i < 3; ++i) sim.step();
  EXPECT_TRUE(sim.finished());
  EXPECT_THROW(sim.step(), HorizonExceeded);
}

TEST(Simulation, RecordsEveryStep) {
  const auto rep = run_once(short_reference(25));
  ASSERT_EQ(rep.steps.size(), 25u);
  EXPECT_EQ(rep.steps.front().step, 1);
  EXPECT_EQ(rep.steps.back().step, 25);
  EXPECT_EQ(rep.productivity_trace(0).size(), 26u);
  EXPECT_NO_THROW(verify_report(rep));
}

TEST(Simulation, SummaryMatchesRecomputation) {
  const auto rep = run_once(short_reference(60), 3);
  long long total = 0;
  for (const auto& s : rep.steps) total += s.regions[0].mutations;
  EXPECT_EQ(rep.summary.total_mutations, total);
  EXPECT_NEAR(rep.summary.regions[0].pace, oracle::pace_direct(rep.productivity_trace(0)), 1e-15);
  EXPECT_EQ(rep.summary, summarize(rep));
}

TEST(Simulation, ProductivityNeverFallsWithoutShocks) {
  const auto rep = run_once(short_reference(100), 5);
  const auto trace = rep.productivity_trace(0);
  for (std::size_t i = 1; i < trace.size(); ++i) EXPECT_GT(trace[i], 0.0);
}

TEST(Simulation, ShocksApplyAtTheirStep) {
  auto cfg = preset("malthusian-trap");
  cfg.horizon = 20;
  cfg.shocks = {{10, "agrarian", ShockKind::population, 0.5}};
  const auto with = run_once(cfg);
  cfg.shocks.clear();
  const auto without = run_once(cfg);
  EXPECT_EQ(with.steps[8].regions[0].population, without.steps[8].regions[0].population);
  EXPECT_LT(with.steps[10].regions[0].population, without.steps[10].regions[0].population);
}

TEST(Simulation, IsolatedRegionNeverReceives) {
  const auto rep = run_once(preset("archipelago"), 9);
  for (const auto& s : rep.steps) EXPECT_EQ(s.regions[2].entrants, 0);
  EXPECT_EQ(rep.summary.regions[2].pace, 0.0);
}

TEST(Simulation, WorkedExampleThresholds) {
  auto cfg = short_reference(1);
  cfg.genesis.idea_rate = 0.0;
  cfg.regions[0].idea_rate = 0.0;
  cfg.genesis.initial_pool = 6;
  const std::vector<int> thetas = {0, 20, 60};
  const auto sweep = sweep_threshold(cfg, thetas, 5, std::nullopt, {}, WorkedExampleCaster{});
  ASSERT_EQ(sweep.rows.size(), 3u);
  EXPECT_EQ(sweep.rows[0].mean_mutations, 6.0);
  EXPECT_EQ(sweep.rows[1].mean_mutations, 2.0);
  EXPECT_EQ(sweep.rows[2].mean_mutations, 0.0);
}

TEST(RunMany, SingleReplication) {
  const auto many = run_many(short_reference(), 1, 77);
  ASSERT_EQ(many.reports.size(), 1u);
  EXPECT_EQ(many.aggregate.replications, 1u);
  EXPECT_EQ(many.aggregate.system_pace.sd(), 0.0);
  EXPECT_EQ(many.aggregate.system_pace.mean, many.reports[0].summary.system_pace);
}

TEST(RunMany, OrderAndWorkersDoNotMatter) {
  const auto cfg = short_reference();
  const auto base = run_many(cfg, 40, 5);
  std::vector<std::size_t> order(40);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), std::mt19937_64(1));
  for (unsigned workers : {1u, 3u, 8u}) {
    RunManyOptions opt;
    opt.workers = workers;
    opt.order = order;
    const auto other = run_many(cfg, 40, 5, opt);
    EXPECT_EQ(other.reports, base.reports);
    EXPECT_EQ(other.aggregate.system_pace.mean, base.aggregate.system_pace.mean);
    EXPECT_EQ(other.aggregate.system_pace.m2, base.aggregate.system_pace.m2);
    EXPECT_EQ(other.aggregate.total_mutations.mean, base.aggregate.total_mutations.mean);
  }
}

TEST(RunMany, ReplicationsAreDistinct) {
  const auto many = run_many(short_reference(), 10, 5);
  for (std::size_t k = 1; k < 10; ++k) EXPECT_NE(many.reports[k].steps, many.reports[0].steps);
  EXPECT_EQ(many.reports[3].replication, std::optional<std::uint64_t>(3));
}

TEST(Aggregate, MergeIsAssociative) {
  oracle::Inputs in(909);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> xs(static_cast<std::size_t>(in.integer(3, 200)));
    for (auto& x : xs) x = in.uniform(-5, 5);
    const std::size_t i = static_cast<std::size_t>(in.integer(1, static_cast<int>(xs.size()) - 2));
    const std::size_t j = static_cast<std::size_t>(in.integer(static_cast<int>(i) + 1, static_cast<int>(xs.size()) - 1));
    const std::span<const double> s(xs);
    const auto a = Moments::of(s.first(i)), b = Moments::of(s.subspan(i, j - i)), c = Moments::of(s.subspan(j));
    const auto left = a.merged(b).merged(c);
    const auto right = a.merged(b.merged(c));
    const auto whole = Moments::of(s);
    EXPECT_EQ(left.count, whole.count);
    EXPECT_NEAR(left.mean, right.mean, 1e-9);
    EXPECT_NEAR(left.m2, right.m2, 1e-9);
    EXPECT_NEAR(left.mean, whole.mean, 1e-9);
    EXPECT_NEAR(left.m2, whole.m2, 1e-9);
  }
}

TEST(Aggregate, MomentsAgainstTwoPass) {
  const std::vector<double> xs = {1, 2, 3, 4, 10};
  const auto m = Moments::of(xs);
  EXPECT_DOUBLE_EQ(m.mean, 4.0);
  EXPECT_DOUBLE_EQ(m.sd(), std::sqrt(50.0 / 4.0));
  EXPECT_DOUBLE_EQ(m.standard_error(), std::sqrt(50.0 / 4.0) / std::sqrt(5.0));
}

TEST(Aggregate, SmallSampleWithinThreeStandardErrors) {
  const auto cfg = short_reference(40);
  RunManyOptions opt;
  opt.workers = 0;
  opt.keep_steps = false;
  const auto reference = run_many(cfg, 10'000, 2024, opt).aggregate;
  const auto small = run_many(cfg, 100, 99, opt).aggregate;
  EXPECT_LE(std::abs(small.system_pace.mean - reference.system_pace.mean), 3 * small.system_pace.standard_error());
  EXPECT_LE(std::abs(small.total_mutations.mean - reference.total_mutations.mean),
            3 * small.total_mutations.standard_error());
}

TEST(Spearman, KnownValues) {
  const std::vector<double> x = {1, 2, 3, 4};
  EXPECT_DOUBLE_EQ(*spearman(x, std::vector<double>{10, 20, 30, 40}), 1.0);
  EXPECT_DOUBLE_EQ(*spearman(x, std::vector<double>{4, 3, 2, 1}), -1.0);
  EXPECT_FALSE(spearman(x, std::vector<double>{1, 1, 1, 1}).has_value());
  EXPECT_FALSE(spearman(std::vector<double>{1}, std::vector<double>{2}).has_value());
  EXPECT_EQ(ranks(std::vector<double>{5, 1, 5, 3}), (std::vector<double>{3.5, 1, 3.5, 2}));
}

TEST(Sweep, SingleThetaHasNoCorrelation) {
  const std::vector<int> thetas = {20};
  const auto rep = sweep_threshold(short_reference(10), thetas, 3);
  EXPECT_EQ(rep.rows.size(), 1u);
  EXPECT_FALSE(rep.correlation.has_value());
  EXPECT_NE(sweep_summary(rep).find("absent"), std::string::npos);
}

TEST(Sweep, InvalidThetaLists) {
  const auto cfg = short_reference(5);
  EXPECT_THROW(sweep_threshold(cfg, std::vector<int>{}, 2), ThetaListInvalid);
  EXPECT_THROW(sweep_threshold(cfg, std::vector<int>{5, 3}, 2), ThetaListInvalid);
  EXPECT_THROW(sweep_threshold(cfg, std::vector<int>{3, 3}, 2), ThetaListInvalid);
  EXPECT_THROW(sweep_threshold(cfg, std::vector<int>{-1, 3}, 2), ThetaListInvalid);
}

TEST(Sweep, SameSeedAcrossThetas) {
  const std::vector<int> thetas = {0, 30, 101};
  const auto rep = sweep_threshold(short_reference(20), thetas, 20, 8);
  EXPECT_EQ(rep.base_seed, 8u);
  EXPECT_GT(rep.rows[0].mean_mutations, rep.rows[1].mean_mutations);
  EXPECT_EQ(rep.rows[2].mean_mutations, 0.0);
  EXPECT_EQ(to_csv(rep).substr(0, to_csv(rep).find('\n')), "theta,reps,mean_mutations,mean_pace,sd_pace");
}

TEST(Report, DocumentRoundTrip) {
  for (const char* name : {"reference", "collapse", "industrial-transition"}) {
    auto cfg = preset(name);
    cfg.horizon = std::min<Step>(cfg.horizon, 120);
    const auto rep = run_once(cfg, 4);
    const auto text = to_report_document(rep);
    EXPECT_EQ(parse_report_document(text), rep) << name;
    EXPECT_EQ(to_report_document(parse_report_document(text)), text) << name;
  }
}

TEST(Report, TamperedSummaryRejected) {
  auto rep = run_once(short_reference(10), 4);
  rep.summary.total_mutations += 1;
  EXPECT_THROW(verify_report(rep), Error);
  EXPECT_THROW(to_report_document(rep), Error);
}

TEST(Report, CsvShape) {
  const auto rep = run_once(preset("collapse"), 2);
  const auto csv = to_csv(rep);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "step,region,mutations,productivity,avg_profit_rate,population");
  EXPECT_EQ(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')), 1 + 200 * 2);
}

TEST(Report, GoldenEverlastingGrowth) {
  const auto rep = run_once(preset("everlasting-growth"), 42);
  EXPECT_EQ(to_report_document(rep), slurp(std::string(DSIM_SOURCE_DIR) + "/tests/golden/everlasting-growth-seed42.txt"));
}
