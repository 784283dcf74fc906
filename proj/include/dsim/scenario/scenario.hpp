#pragma once

#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>

#include "dsim/scenario/config.hpp"
#include "dsim/scenario/format.hpp"
#include "dsim/scenario/schema.hpp"

namespace dsim {

namespace scn::detail {

using Fields = std::map<std::string, const Entry*>;  // relative key -> entry

struct Buckets {
  Fields run, genesis, finance, selection, demographics, sweep;
  std::map<std::size_t, Fields> regions, region_demographics, edges, shocks;
};

inline bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

inline std::size_t parse_index(std::string_view seg, const std::string& path) {
  if (!all_digits(seg)) throw SchemaError(path, "expected a numeric index after '" + path.substr(0, path.find('.')) + "'");
  std::size_t idx = 0;
  if (!parse_integer(seg, idx) || idx > 100000) throw SchemaError(path, "index out of range");
  return idx;
}

inline Buckets bucket(const Document& doc) {
  Buckets b;
  for (const auto& e : doc) {
    const std::string& p = e.path;
    const auto dot = p.find('.');
    const std::string head = p.substr(0, dot);
    const std::string rest = dot == std::string::npos ? std::string{} : p.substr(dot + 1);
    auto indexed = [&](std::map<std::size_t, Fields>& target, std::map<std::size_t, Fields>* nested) {
      const auto dot2 = rest.find('.');
      if (rest.empty() || dot2 == std::string::npos) throw SchemaError(p, "unknown key");
      const std::size_t idx = parse_index(rest.substr(0, dot2), p);
      std::string field = rest.substr(dot2 + 1);
      if (nested && field.starts_with("demographics.")) {
        (*nested)[idx][field.substr(13)] = &e;
        target[idx];  // region exists even if only overrides are given
      } else {
        target[idx][field] = &e;
      }
    };
    if (dot == std::string::npos) {
      b.run[p] = &e;
    } else if (head == "genesis") {
      b.genesis[rest] = &e;
    } else if (head == "finance") {
      b.finance[rest] = &e;
    } else if (head == "selection") {
      b.selection[rest] = &e;
    } else if (head == "demographics") {
      b.demographics[rest] = &e;
    } else if (head == "sweep") {
      b.sweep[rest] = &e;
    } else if (head == "region") {
      indexed(b.regions, &b.region_demographics);
    } else if (head == "edge") {
      indexed(b.edges, nullptr);
    } else if (head == "shock") {
      indexed(b.shocks, nullptr);
    } else {
      throw SchemaError(p, "unknown key");
    }
  }
  return b;
}

template <typename Target>
void apply(Target& target, const Table<Target>& table, const Fields& fields, const std::string& prefix) {
  for (const auto& [key, entry] : fields) {
    const auto it = std::find_if(table.begin(), table.end(), [&](const auto& f) { return f.key == key; });
    if (it == table.end()) throw SchemaError(entry->path, "unknown key");
  }
  for (const auto& f : table) {
    const auto it = fields.find(f.key);
    if (it == fields.end()) {
      if (f.required) throw SchemaError(prefix + f.key, "missing required field");
      continue;
    }
    f.set(target, it->second->value, it->second->path);
  }
}

template <typename T>
std::vector<T> apply_indexed(const std::map<std::size_t, Fields>& sections, const Table<T>& table,
                             const std::string& head, const T& initial) {
  std::vector<T> out;
  std::size_t expected = 0;
  for (const auto& [idx, fields] : sections) {
    if (idx != expected) {
      throw SchemaError(head + "." + std::to_string(expected), "indices must be contiguous from 0");
    }
    T item = initial;
    apply(item, table, fields, head + "." + std::to_string(idx) + ".");
    out.push_back(std::move(item));
    ++expected;
  }
  return out;
}

template <typename Target>
void emit(std::ostringstream& os, const std::string& prefix, const Table<Target>& table, const Target& value) {
  for (const auto& f : table) os << prefix << f.key << " = " << f.get(value) << "\n";
}

template <typename Target>
void emit_overrides(std::ostringstream& os, const std::string& prefix, const Table<Target>& table,
                    const Target& value, const Target& base) {
  for (const auto& f : table) {
    const std::string v = f.get(value);
    if (v != f.get(base)) os << prefix << f.key << " = " << v << "\n";
  }
}

}  // namespace scn::detail

// Parses and validates a scenario document. Unknown keys, missing required
// keys, out-of-range values and dangling region references raise
// SchemaError naming the path; malformed text raises SyntaxError.
inline ScenarioConfig parse_scenario(std::string_view text) {
  using namespace scn;
  using namespace scn::detail;
  const Document doc = parse_document(text);
  const Buckets b = bucket(doc);

  ScenarioConfig cfg;
  apply(cfg, run_table(), b.run, "");
  apply(cfg.genesis, genesis_table(), b.genesis, "genesis.");
  apply(cfg.finance, finance_table(), b.finance, "finance.");
  apply(cfg.selection, selection_table(), b.selection, "selection.");
  apply(cfg.demographics, demographics_table(), b.demographics, "demographics.");
  apply(cfg.sweep, sweep_table(), b.sweep, "sweep.");

  if (b.regions.empty()) throw SchemaError("region.0.name", "at least one region is required");
  RegionSpec region_defaults;
  region_defaults.idea_rate = cfg.genesis.idea_rate;
  region_defaults.demographics = cfg.demographics;
  cfg.regions = apply_indexed(b.regions, region_table(), "region", region_defaults);
  for (const auto& [idx, fields] : b.region_demographics) {
    apply(cfg.regions[idx].demographics, demographics_table(), fields,
          "region." + std::to_string(idx) + ".demographics.");
  }
  std::set<std::string> names;
  for (std::size_t i = 0; i < cfg.regions.size(); ++i) {
    if (!names.insert(cfg.regions[i].name).second) {
      throw SchemaError("region." + std::to_string(i) + ".name", "duplicate region name '" + cfg.regions[i].name + "'");
    }
  }

  cfg.edges = apply_indexed(b.edges, edge_table(), "edge", EdgeSpec{});
  for (std::size_t i = 0; i < cfg.edges.size(); ++i) {
    const auto& e = cfg.edges[i];
    const std::string base = "edge." + std::to_string(i) + ".";
    if (!names.contains(e.from)) throw SchemaError(base + "from", "unknown region '" + e.from + "'");
    if (!names.contains(e.to)) throw SchemaError(base + "to", "unknown region '" + e.to + "'");
    if (e.from == e.to) throw SchemaError(base + "to", "self-links are not allowed");
  }

  cfg.shocks = apply_indexed(b.shocks, shock_table(), "shock", ShockSpec{});
  for (std::size_t i = 0; i < cfg.shocks.size(); ++i) {
    const auto& s = cfg.shocks[i];
    const std::string base = "shock." + std::to_string(i) + ".";
    if (!names.contains(s.region)) throw SchemaError(base + "region", "unknown region '" + s.region + "'");
    if (s.step >= cfg.horizon) throw SchemaError(base + "step", "shock step must be below the horizon");
  }
  return cfg;
}

// Canonical text form. parse_scenario(serialize_scenario(c)) == c. Region
// fields equal to the inherited defaults are omitted.
inline std::string serialize_scenario(const ScenarioConfig& cfg) {
  using namespace scn;
  using namespace scn::detail;
  std::ostringstream os;
  os << "# scenario: " << cfg.name << "\n";
  emit(os, "", run_table(), cfg);
  os << "\n";
  emit(os, "genesis.", genesis_table(), cfg.genesis);
  os << "\n";
  emit(os, "finance.", finance_table(), cfg.finance);
  os << "\n";
  emit(os, "selection.", selection_table(), cfg.selection);
  os << "\n";
  emit(os, "demographics.", demographics_table(), cfg.demographics);
  RegionSpec base;
  base.idea_rate = cfg.genesis.idea_rate;
  base.demographics = cfg.demographics;
  for (std::size_t i = 0; i < cfg.regions.size(); ++i) {
    const auto& r = cfg.regions[i];
    const std::string prefix = "region." + std::to_string(i) + ".";
    os << "\n";
    os << prefix << "name = " << quote(r.name) << "\n";
    emit_overrides(os, prefix, region_table(), r, [&] {
      RegionSpec b = base;
      b.name = r.name;
      return b;
    }());
    emit_overrides(os, prefix + "demographics.", demographics_table(), r.demographics, cfg.demographics);
  }
  for (std::size_t i = 0; i < cfg.edges.size(); ++i) {
    os << "\n";
    emit(os, "edge." + std::to_string(i) + ".", edge_table(), cfg.edges[i]);
  }
  for (std::size_t i = 0; i < cfg.shocks.size(); ++i) {
    os << "\n";
    emit(os, "shock." + std::to_string(i) + ".", shock_table(), cfg.shocks[i]);
  }
  if (cfg.sweep.active() || cfg.sweep != SweepSpec{}) {
    os << "\n";
    emit(os, "sweep.", sweep_table(), cfg.sweep);
  }
  return os.str();
}

}  // namespace dsim
