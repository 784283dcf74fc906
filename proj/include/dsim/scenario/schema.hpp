#pragma once

// The scenario schema: one table per section, each row binding a key to a
// struct member with its type, valid range and documentation. The parser, the
// serializer and `scenario-schema` all read these tables, and member default
// initializers are the defaults.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dsim/scenario/config.hpp"
#include "dsim/scenario/format.hpp"

namespace dsim::scn {

template <typename Target>
struct Field {
  std::string key;
  std::string type;
  std::string range;
  std::string doc;
  bool required = false;
  std::function<void(Target&, const Value&, const std::string& path)> set;
  std::function<std::string(const Target&)> get;
};

template <typename Target>
using Table = std::vector<Field<Target>>;

namespace detail {

inline std::string format_bound(double x) {
  if (x == std::numeric_limits<double>::infinity()) return "inf";
  std::ostringstream os;
  os << x;
  return os.str();
}

inline double to_real(const Value& v, const std::string& path) {
  double x = 0.0;
  if ((v.kind != ValueKind::integer && v.kind != ValueKind::decimal) || !parse_real(v.text, x)) {
    throw SchemaError(path, std::string("expected a number, got ") + to_string(v.kind));
  }
  if (!std::isfinite(x)) throw SchemaError(path, "value must be finite");
  return x;
}

template <typename Int>
Int to_int(const Value& v, const std::string& path) {
  Int x{};
  if (v.kind != ValueKind::integer) throw SchemaError(path, std::string("expected an integer, got ") + to_string(v.kind));
  if (!parse_integer(v.text, x)) throw SchemaError(path, "integer out of range: " + v.text);
  return x;
}

inline const std::string& to_str(const Value& v, const std::string& path) {
  if (v.kind != ValueKind::string) throw SchemaError(path, std::string("expected a quoted string, got ") + to_string(v.kind));
  return v.text;
}

}  // namespace detail

// Real in [lo, hi], or (lo, hi] when lo_open.
template <typename Target>
Field<Target> real_field(std::string key, double Target::*member, double lo, double hi, bool lo_open, std::string doc) {
  std::string range = std::string(lo_open ? "(" : "[") + detail::format_bound(lo) + ", " + detail::format_bound(hi) +
                      (hi == std::numeric_limits<double>::infinity() ? ")" : "]");
  return Field<Target>{
      std::move(key), "real", range, std::move(doc), false,
      [=](Target& t, const Value& v, const std::string& path) {
        const double x = detail::to_real(v, path);
        if (x > hi || x < lo || (lo_open && x == lo)) throw SchemaError(path, "value " + v.text + " outside " + range);
        t.*member = x;
      },
      [=](const Target& t) { return format_real(t.*member); }};
}

template <typename Target, typename Int>
Field<Target> int_field(std::string key, Int Target::*member, Int lo, Int hi, std::string doc, bool required = false) {
  std::string range = "[" + std::to_string(lo) + ", " + (hi == std::numeric_limits<Int>::max() ? "max" : std::to_string(hi)) + "]";
  return Field<Target>{
      std::move(key), std::is_signed_v<Int> ? "integer" : "unsigned 64-bit integer", range, std::move(doc), required,
      [=](Target& t, const Value& v, const std::string& path) {
        const Int x = detail::to_int<Int>(v, path);
        if (x < lo || x > hi) throw SchemaError(path, "value " + v.text + " outside " + range);
        t.*member = x;
      },
      [=](const Target& t) { return std::to_string(t.*member); }};
}

template <typename Target>
Field<Target> string_field(std::string key, std::string Target::*member, std::string doc, bool required) {
  return Field<Target>{std::move(key), "string", "non-empty", std::move(doc), required,
                       [=](Target& t, const Value& v, const std::string& path) {
                         const auto& s = detail::to_str(v, path);
                         if (s.empty()) throw SchemaError(path, "must be non-empty");
                         t.*member = s;
                       },
                       [=](const Target& t) { return quote(t.*member); }};
}

inline const Table<ScenarioConfig>& run_table() {
  static const Table<ScenarioConfig> table = {
      string_field<ScenarioConfig>("name", &ScenarioConfig::name, "scenario name, echoed into reports", true),
      int_field<ScenarioConfig, Step>("horizon", &ScenarioConfig::horizon, 1, std::numeric_limits<Step>::max(),
                                      "number of steps (market periods); always finite", true),
      int_field<ScenarioConfig, std::uint64_t>("seed", &ScenarioConfig::seed, 0,
                                               std::numeric_limits<std::uint64_t>::max(),
                                               "root random seed", true),
  };
  return table;
}

inline const Table<GenesisParams>& genesis_table() {
  static const Table<GenesisParams> table = {
      real_field<GenesisParams>("idea_rate", &GenesisParams::idea_rate, 0.0, 1e6, false,
                                "mean idea arrivals per region per step (Poisson)"),
      int_field<GenesisParams, Step>("rd_delay", &GenesisParams::rd_delay, 1, 1'000'000,
                                     "steps from idea to a ready uncertain technology"),
      real_field<GenesisParams>("ex_ante_p", &GenesisParams::ex_ante_p, 0.0, 1.0, false,
                                "probability that a new technology beats the average profit rate"),
      real_field<GenesisParams>("productivity_spread", &GenesisParams::productivity_spread, 0.0,
                                std::numeric_limits<double>::infinity(), false,
                                "sigma of log productivity around the region's frontier"),
      int_field<GenesisParams, int>("initial_pool", &GenesisParams::initial_pool, 0, 1'000'000,
                                    "uncertain technologies per region ready at step 0"),
      real_field<GenesisParams>("rd_cost", &GenesisParams::rd_cost, 0.0, std::numeric_limits<double>::infinity(),
                                false, "R&D cost per technology (recorded, not binding)"),
  };
  return table;
}

inline const Table<FinanceParams>& finance_table() {
  static const Table<FinanceParams> table = {
      int_field<FinanceParams, int>("entrepreneurs", &FinanceParams::entrepreneurs, 1, 1'000'000,
                                    "number of entrepreneurs casting preferences"),
      real_field<FinanceParams>("concentration", &FinanceParams::concentration, 0.0,
                                std::numeric_limits<double>::infinity(), false,
                                "weight of latent quality against private noise in each choice"),
      int_field<FinanceParams, int>("consent_threshold", &FinanceParams::consent_threshold, 0, 1'000'000,
                                    "banker's minimum preference index (0 = maximal competition)"),
      int_field<FinanceParams, Step>("max_candidate_age", &FinanceParams::max_candidate_age, 0, 1'000'000,
                                     "steps an unfinanced technology stays eligible (0 = forever)"),
  };
  return table;
}

inline const Table<SelectionConfig>& selection_table() {
  static const Table<SelectionConfig> table = {
      real_field<SelectionConfig>("entry_share", &SelectionConfig::entry_share, 0.0, 1.0, true,
                                  "initial adoption share of a surviving entrant"),
      real_field<SelectionConfig>("eta", &SelectionConfig::eta, 0.0, std::numeric_limits<double>::infinity(), false,
                                  "replicator selection intensity"),
      real_field<SelectionConfig>("extinction_floor", &SelectionConfig::extinction_floor, 0.0, 1.0, false,
                                  "shares below this are removed"),
      real_field<SelectionConfig>("ex_post_spread", &SelectionConfig::ex_post_spread, 0.0,
                                  std::numeric_limits<double>::infinity(), true,
                                  "scale of realized profit-rate deviations from the average"),
  };
  return table;
}

inline const Table<DemographicParams>& demographics_table() {
  static const Table<DemographicParams> table = {
      real_field<DemographicParams>("population", &DemographicParams::population, 0.0,
                                    std::numeric_limits<double>::infinity(), false,
                                    "initial population (millions)"),
      real_field<DemographicParams>("base_birth", &DemographicParams::base_birth, 0.0, 1.0, false,
                                    "baseline birth rate per step"),
      real_field<DemographicParams>("base_death", &DemographicParams::base_death, 0.0, 1.0, false,
                                    "natural death rate per step"),
      real_field<DemographicParams>("birth_factor", &DemographicParams::birth_factor, 0.0,
                                    std::numeric_limits<double>::infinity(), false,
                                    "patriarchal multiplier on the birth rate"),
      real_field<DemographicParams>("birth_factor_decay", &DemographicParams::birth_factor_decay, 0.0, 1.0, false,
                                    "per-step relaxation of the birth factor toward 1 once industrial"),
      real_field<DemographicParams>("requirement_per_capita", &DemographicParams::requirement_per_capita, 0.0,
                                    std::numeric_limits<double>::infinity(), true,
                                    "food units per person per step"),
      real_field<DemographicParams>("land_capacity", &DemographicParams::land_capacity, 0.0,
                                    std::numeric_limits<double>::infinity(), false,
                                    "food ceiling in traditional mode"),
      real_field<DemographicParams>("labor_share", &DemographicParams::labor_share, 0.0, 1.0, false,
                                    "fraction of population working in food production"),
      real_field<DemographicParams>("famine_mortality", &DemographicParams::famine_mortality, 0.0, 1.0, false,
                                    "death rate among the unnourished"),
      int_field<DemographicParams, Step>("transition_step", &DemographicParams::transition_step, -1,
                                         std::numeric_limits<Step>::max(),
                                         "step of the industrial transition (-1 = never)"),
  };
  return table;
}

inline const Table<RegionSpec>& region_table() {
  static const Table<RegionSpec> table = {
      string_field<RegionSpec>("name", &RegionSpec::name, "unique region name", true),
      real_field<RegionSpec>("initial_productivity", &RegionSpec::initial_productivity, 0.0,
                             std::numeric_limits<double>::infinity(), true, "incumbent productivity"),
      real_field<RegionSpec>("initial_profit_rate", &RegionSpec::initial_profit_rate, -1e6, 1e6, false,
                             "incumbent profit rate"),
      real_field<RegionSpec>("idea_rate", &RegionSpec::idea_rate, 0.0, 1e6, false,
                             "regional idea rate (default: genesis.idea_rate)"),
  };
  return table;
}

inline const Table<EdgeSpec>& edge_table() {
  static const Table<EdgeSpec> table = {
      string_field<EdgeSpec>("from", &EdgeSpec::from, "source region name", true),
      string_field<EdgeSpec>("to", &EdgeSpec::to, "destination region name", true),
      [] {
        auto f = real_field<EdgeSpec>("weight", &EdgeSpec::weight, 0.0, 1.0, false, "per-step diffusion probability");
        f.required = true;
        return f;
      }(),
  };
  return table;
}

inline const Table<ShockSpec>& shock_table() {
  static const Table<ShockSpec> table = {
      int_field<ShockSpec, Step>("step", &ShockSpec::step, 0, std::numeric_limits<Step>::max(),
                                 "step at whose start the shock applies", true),
      string_field<ShockSpec>("region", &ShockSpec::region, "affected region name", true),
      Field<ShockSpec>{"kind", "string", "\"population\" | \"productivity\"", "what the shock multiplies", true,
                       [](ShockSpec& s, const Value& v, const std::string& path) {
                         const auto& k = detail::to_str(v, path);
                         if (k == "population") s.kind = ShockKind::population;
                         else if (k == "productivity") s.kind = ShockKind::productivity;
                         else throw SchemaError(path, "unknown shock kind '" + k + "'");
                       },
                       [](const ShockSpec& s) { return quote(to_string(s.kind)); }},
      [] {
        auto f = real_field<ShockSpec>("magnitude", &ShockSpec::magnitude, 0.0, std::numeric_limits<double>::infinity(),
                                       false, "multiplicative factor");
        f.required = true;
        return f;
      }(),
  };
  return table;
}

inline const Table<SweepSpec>& sweep_table() {
  static const Table<SweepSpec> table = {
      Field<SweepSpec>{"thetas", "integer list", "ascending, distinct, >= 0",
                       "consent thresholds to sweep (empty: single run)", false,
                       [](SweepSpec& s, const Value& v, const std::string& path) {
                         if (v.kind != ValueKind::list) throw SchemaError(path, "expected a list of integers");
                         std::vector<int> out;
                         for (std::size_t i = 0; i < v.items.size(); ++i) {
                           const int x = detail::to_int<int>(v.items[i], path);
                           if (x < 0) throw SchemaError(path, "thresholds must be >= 0");
                           if (!out.empty() && x <= out.back()) throw SchemaError(path, "thresholds must be ascending and distinct");
                           out.push_back(x);
                         }
                         s.thetas = std::move(out);
                       },
                       [](const SweepSpec& s) {
                         std::string out = "[";
                         for (std::size_t i = 0; i < s.thetas.size(); ++i) {
                           if (i) out += ", ";
                           out += std::to_string(s.thetas[i]);
                         }
                         return out + "]";
                       }},
      int_field<SweepSpec, int>("replications", &SweepSpec::replications, 1, 100'000'000,
                                "replications per threshold"),
  };
  return table;
}

// One documented key pattern, e.g. "region.<i>.demographics.base_birth".
struct SchemaRow {
  std::string key;
  std::string type;
  std::string default_value;  // "(required)" or "(inherits ...)" where applicable
  std::string range;
  std::string doc;
};

namespace detail {

template <typename Target>
void append_rows(std::vector<SchemaRow>& rows, const std::string& prefix, const Table<Target>& table,
                 const Target& defaults, const std::string& inherit_note = {}) {
  for (const auto& f : table) {
    std::string def = f.required ? "(required)" : (inherit_note.empty() ? f.get(defaults) : inherit_note);
    rows.push_back({prefix + f.key, f.type, def, f.range, f.doc});
  }
}

}  // namespace detail

inline std::vector<SchemaRow> schema_rows() {
  std::vector<SchemaRow> rows;
  detail::append_rows(rows, "", run_table(), ScenarioConfig{});
  detail::append_rows(rows, "genesis.", genesis_table(), GenesisParams{});
  detail::append_rows(rows, "finance.", finance_table(), FinanceParams{});
  detail::append_rows(rows, "selection.", selection_table(), SelectionConfig{});
  detail::append_rows(rows, "demographics.", demographics_table(), DemographicParams{});
  {
    std::vector<SchemaRow> region;
    detail::append_rows(region, "region.<i>.", region_table(), RegionSpec{});
    for (auto& r : region) {
      if (r.key == "region.<i>.idea_rate") r.default_value = "(inherits genesis.idea_rate)";
    }
    rows.insert(rows.end(), region.begin(), region.end());
  }
  detail::append_rows(rows, "region.<i>.demographics.", demographics_table(), DemographicParams{},
                      "(inherits demographics.*)");
  detail::append_rows(rows, "edge.<i>.", edge_table(), EdgeSpec{});
  detail::append_rows(rows, "shock.<i>.", shock_table(), ShockSpec{});
  detail::append_rows(rows, "sweep.", sweep_table(), SweepSpec{});
  return rows;
}

// Human-readable schema reference, printed by `dsim scenario-schema`.
inline std::string schema_text() {
  std::ostringstream os;
  os << "# Scenario file schema (.scn)\n"
        "# Syntax: one `dotted.key = value` per line; `#` starts a comment.\n"
        "# Values: integers, decimals, true/false, \"quoted strings\", [lists].\n"
        "# Indexed sections (region.<i>, edge.<i>, shock.<i>) use indices 0..n-1.\n"
        "# At least one region is required.\n"
        "#\n"
        "# key | type | default | range | description\n";
  for (const auto& r : schema_rows()) {
    os << r.key << " | " << r.type << " | " << r.default_value << " | " << r.range << " | " << r.doc << "\n";
  }
  return os.str();
}

}  // namespace dsim::scn
