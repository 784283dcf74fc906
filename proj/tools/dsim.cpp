// dsim: command-line driver for the technological-evolution simulator.
//
//   dsim run --preset everlasting-growth --seed 42 --out out/
//   dsim sweep --preset reference --thetas 0,20,60 --reps 100 --out out/
//   dsim scenario-schema
//   dsim presets [--show NAME]
//
// Exit codes: 0 success, 1 model/runtime error, 2 usage or scenario error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dsim/dsim.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kRuntime = 1;
constexpr int kUsage = 2;

// Errors that are the caller's fault: bad flags, unreadable or invalid input.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Source {
  std::string scenario;
  std::string preset;
};

void add_source(CLI::App* cmd, Source& src) {
  auto* s = cmd->add_option("--scenario", src.scenario, "scenario file (.scn)");
  auto* p = cmd->add_option("--preset", src.preset, "built-in preset name");
  s->excludes(p);
}

dsim::ScenarioConfig load(const Source& src) {
  if (src.scenario.empty() == src.preset.empty()) throw UsageError("give exactly one of --scenario or --preset");
  try {
    if (!src.preset.empty()) return dsim::preset(src.preset);
    std::ifstream in(src.scenario, std::ios::binary);
    if (!in) throw UsageError("cannot read scenario file '" + src.scenario + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return dsim::parse_scenario(ss.str());
  } catch (const dsim::SyntaxError& e) {
    throw UsageError(src.scenario + ":" + std::to_string(e.line()) + ":" + std::to_string(e.column()) + ": " + e.what());
  } catch (const dsim::SchemaError& e) {
    throw UsageError(src.scenario + ": " + e.what());
  } catch (const dsim::UnknownPreset& e) {
    throw UsageError(std::string(e.what()) + " (see `dsim presets`)");
  }
}

// --seed, else DEFINETTI_SIM_SEED, else the scenario's own seed.
std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag, std::uint64_t scenario_seed) {
  if (flag) return *flag;
  if (const char* env = std::getenv("DEFINETTI_SIM_SEED"); env && *env) {
    std::uint64_t v = 0;
    if (!dsim::scn::parse_integer(std::string_view(env), v)) throw UsageError("DEFINETTI_SIM_SEED is not a u64");
    return v;
  }
  return scenario_seed;
}

std::vector<int> parse_thetas(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    int v = 0;
    if (b == std::string::npos || !dsim::scn::parse_integer(std::string_view(item).substr(b, e - b + 1), v)) {
      throw UsageError("malformed --thetas entry '" + item + "'");
    }
    out.push_back(v);
  }
  try {
    dsim::validate_thetas(out);
  } catch (const dsim::ThetaListInvalid& e) {
    throw UsageError(std::string("--thetas: ") + e.what());
  }
  return out;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw dsim::Error("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw dsim::Error("write failed for '" + path.string() + "'");
}

struct RunArgs {
  Source src;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string format = "all";
  std::optional<dsim::Step> horizon;
  bool reseed = false;
  unsigned workers = 0;
};

int cmd_run(const RunArgs& a) {
  dsim::ScenarioConfig cfg = load(a.src);
  if (cfg.sweep.active()) throw UsageError("preset/scenario '" + cfg.name + "' is a sweep directive; use `dsim sweep`");
  std::uint64_t seed = resolve_seed(a.seed, cfg.seed);
  if (a.horizon) {
    if (*a.horizon < 1) throw UsageError("--horizon must be >= 1");
    cfg.horizon = *a.horizon;
    if (a.reseed) seed = dsim::RngStream::root(seed).derive("extended").derive(*a.horizon).key();
  } else if (a.reseed) {
    throw UsageError("--reseed only applies to an extended rerun (--horizon)");
  }

  const dsim::RunReport report = dsim::run_once(cfg, seed);
  fs::create_directories(a.out);
  if (a.format == "csv" || a.format == "all") write_file(fs::path(a.out) / "run.csv", dsim::to_csv(report));
  if (a.format == "report" || a.format == "all") write_file(fs::path(a.out) / "report.txt", dsim::to_report_document(report));

  double final_pop = 0.0;
  for (const auto& r : report.summary.regions) final_pop += r.final_population;
  std::cout << "run " << report.name << " seed=" << report.seed << " horizon=" << report.horizon
            << " total_mutations=" << report.summary.total_mutations
            << " system_pace=" << dsim::scn::format_real(report.summary.system_pace)
            << " final_population=" << dsim::scn::format_real(final_pop) << "\n";
  return kOk;
}

struct SweepArgs {
  Source src;
  std::optional<std::uint64_t> seed;
  std::string thetas;
  std::optional<std::size_t> reps;
  std::string out;
  unsigned workers = 0;
};

int cmd_sweep(const SweepArgs& a) {
  const dsim::ScenarioConfig cfg = load(a.src);
  std::vector<int> thetas;
  if (!a.thetas.empty()) thetas = parse_thetas(a.thetas);
  else if (cfg.sweep.active()) thetas = cfg.sweep.thetas;
  else throw UsageError("--thetas is required (scenario has no sweep.thetas)");
  std::size_t reps = a.reps.value_or(static_cast<std::size_t>(cfg.sweep.replications));
  if (reps < 1) throw UsageError("--reps must be >= 1");

  dsim::RunManyOptions opts;
  opts.workers = a.workers;
  const dsim::SweepReport report = dsim::sweep_threshold(cfg, thetas, reps, resolve_seed(a.seed, cfg.seed), opts);
  fs::create_directories(a.out);
  write_file(fs::path(a.out) / "sweep.csv", dsim::to_csv(report));
  write_file(fs::path(a.out) / "sweep_summary.txt", dsim::sweep_summary(report));
  std::cout << "sweep " << report.name << " seed=" << report.base_seed << " rows=" << report.rows.size()
            << " reps=" << reps << " spearman_theta_pace="
            << (report.correlation ? dsim::scn::format_real(*report.correlation) : std::string("absent")) << "\n";
  return kOk;
}

int cmd_presets(const std::string& show) {
  if (!show.empty()) {
    try {
      std::cout << dsim::preset_text(show);
    } catch (const dsim::UnknownPreset& e) {
      throw UsageError(e.what());
    }
    return kOk;
  }
  for (const auto& name : dsim::preset_names()) std::cout << name << "  " << dsim::preset_description(name) << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Darwinian technological-evolution simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "dsim 1.0.0");

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "run one scenario to its horizon");
  add_source(run_cmd, run.src);
  run_cmd->add_option("--seed", run.seed, "root seed (default: $DEFINETTI_SIM_SEED, then the scenario's)");
  run_cmd->add_option("--out", run.out, "output directory")->required();
  run_cmd->add_option("--format", run.format, "csv, report, or all")->check(CLI::IsMember({"csv", "report", "all"}));
  run_cmd->add_option("--horizon", run.horizon, "extended rerun: replace the scenario horizon");
  run_cmd->add_flag("--reseed", run.reseed, "with --horizon: derive a fresh seed instead of reusing it");
  run_cmd->add_option("--workers", run.workers, "accepted for symmetry; a single run is sequential");

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "sweep the consent threshold with replications");
  add_source(sweep_cmd, sweep.src);
  sweep_cmd->add_option("--thetas", sweep.thetas, "ascending distinct thresholds, e.g. 0,20,60");
  sweep_cmd->add_option("--reps", sweep.reps, "replications per threshold");
  sweep_cmd->add_option("--seed", sweep.seed, "base seed");
  sweep_cmd->add_option("--out", sweep.out, "output directory")->required();
  sweep_cmd->add_option("--workers", sweep.workers, "worker threads (0 = all cores); results do not depend on it");

  auto* schema_cmd = app.add_subcommand("scenario-schema", "print every scenario key with default and range");

  std::string show;
  auto* presets_cmd = app.add_subcommand("presets", "list presets, or print one as scenario text");
  presets_cmd->add_option("--show", show, "preset to print");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*run_cmd) return cmd_run(run);
    if (*sweep_cmd) return cmd_sweep(sweep);
    if (*schema_cmd) {
      std::cout << dsim::scn::schema_text();
      return kOk;
    }
    if (*presets_cmd) return cmd_presets(show);
  } catch (const UsageError& e) {
    std::cerr << "dsim: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "dsim: error: " << e.what() << "\n";
    return kRuntime;
  }
  return kUsage;
}
