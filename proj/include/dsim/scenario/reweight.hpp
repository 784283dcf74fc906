#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dsim/core/errors.hpp"

namespace dsim {

struct ProbabilityEntry {
  std::string label;
  double frequency = 0.0;

  friend bool operator==(const ProbabilityEntry&, const ProbabilityEntry&) = default;
};

// Observed class frequencies; probabilities once normalized.
struct ProbabilityTable {
  std::vector<ProbabilityEntry> entries;

  double total() const noexcept {
    double s = 0.0;
    for (const auto& e : entries) s += e.frequency;
    return s;
  }

  ProbabilityTable normalized() const {
    const double t = total();
    if (!(t > 0.0)) throw AllMassExcluded("table has no positive mass");
    ProbabilityTable out = *this;
    for (auto& e : out.entries) e.frequency /= t;
    return out;
  }

  friend bool operator==(const ProbabilityTable&, const ProbabilityTable&) = default;
};

// Subjective compensation of raw frequencies: each class is reweighted by the
// analyst's judgment of how representative the data are, then renormalized.
//   p_i = f_i * w_i / sum_j f_j * w_j
inline ProbabilityTable subjective_reweight(const ProbabilityTable& table, std::span<const double> compensation) {
  if (compensation.size() != table.entries.size()) {
    throw LengthMismatch("compensation has " + std::to_string(compensation.size()) + " weights for " +
                         std::to_string(table.entries.size()) + " entries");
  }
  ProbabilityTable out = table;
  double total = 0.0;
  for (std::size_t i = 0; i < compensation.size(); ++i) {
    if (!(compensation[i] >= 0.0)) throw Error("compensation weights must be non-negative");
    if (!(table.entries[i].frequency >= 0.0)) throw Error("frequencies must be non-negative");
    out.entries[i].frequency = table.entries[i].frequency * compensation[i];
    total += out.entries[i].frequency;
  }
  if (!(total > 0.0)) throw AllMassExcluded("every frequency * weight product is zero");
  for (auto& e : out.entries) e.frequency /= total;
  return out;
}

}  // namespace dsim
