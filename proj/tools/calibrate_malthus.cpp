// Bisection search for the demographic parameter that makes a scenario's
// population grow by a target multiple over its horizon. Used to produce the
// committed birth factor of the industrial-transition preset:
//
//   calibrate_malthus --preset industrial-transition --param birth_factor
//
// The world-population anchor is 1656 million (1900) to 6000 million (2000).

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "dsim/dsim.hpp"

namespace {

double growth_multiple(dsim::ScenarioConfig cfg, const std::string& param, double value) {
  for (auto& r : cfg.regions) {
    if (param == "birth_factor") r.demographics.birth_factor = value;
    else r.demographics.base_birth = value;
  }
  const auto report = dsim::run_once(cfg);
  double initial = 0.0, final_pop = 0.0;
  for (std::size_t r = 0; r < cfg.regions.size(); ++r) {
    initial += report.initial_population[r];
    final_pop += report.summary.regions[r].final_population;
  }
  return final_pop / initial;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Calibrate a demographic parameter to a population growth multiple"};
  std::string preset_name = "industrial-transition";
  std::string scenario_path;
  std::string param = "birth_factor";
  double target = 6000.0 / 1656.0;
  double lo = 1.0, hi = 10.0, tol = 1e-9;
  app.add_option("--preset", preset_name, "preset to calibrate");
  app.add_option("--scenario", scenario_path, "scenario file to calibrate (overrides --preset)");
  app.add_option("--param", param, "parameter to search")->check(CLI::IsMember({"birth_factor", "base_birth"}));
  app.add_option("--target", target, "target final/initial population multiple");
  app.add_option("--lo", lo, "lower bracket");
  app.add_option("--hi", hi, "upper bracket");
  app.add_option("--tol", tol, "bracket width at which to stop");
  CLI11_PARSE(app, argc, argv);

  try {
    dsim::ScenarioConfig cfg;
    if (!scenario_path.empty()) {
      std::ifstream in(scenario_path);
      if (!in) throw dsim::Error("cannot open " + scenario_path);
      std::stringstream ss;
      ss << in.rdbuf();
      cfg = dsim::parse_scenario(ss.str());
    } else {
      cfg = dsim::preset(preset_name);
    }
    double f_lo = growth_multiple(cfg, param, lo) - target;
    const double f_hi = growth_multiple(cfg, param, hi) - target;
    if (f_lo * f_hi > 0.0) {
      std::cerr << "target not bracketed by [" << lo << ", " << hi << "]\n";
      return 1;
    }
    while (hi - lo > tol) {
      const double mid = 0.5 * (lo + hi);
      const double f_mid = growth_multiple(cfg, param, mid) - target;
      if ((f_mid < 0.0) == (f_lo < 0.0)) {
        lo = mid;
        f_lo = f_mid;
      } else {
        hi = mid;
      }
    }
    const double value = 0.5 * (lo + hi);
    std::printf("%s = %.17g\nmultiple = %.9f (target %.9f)\n", param.c_str(), value,
                growth_multiple(cfg, param, value), target);
  } catch (const dsim::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
