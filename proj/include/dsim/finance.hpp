#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "dsim/core/errors.hpp"
#include "dsim/core/rng.hpp"
#include "dsim/genesis.hpp"
#include "dsim/types.hpp"

namespace dsim {

struct EntrepreneurPool {
  int n = 100;
  // Weight of the latent quality against the per-entrepreneur noise. 0 makes
  // every choice uniform; large values send everyone to the best candidate.
  double concentration = 1.0;
};

struct TallyEntry {
  TechId id;
  int count = 0;

  friend bool operator==(const TallyEntry&, const TallyEntry&) = default;
};

// Preference index of each candidate: how many entrepreneurs picked it.
// Always sorted by count descending, then id ascending.
class PreferenceTally {
 public:
  PreferenceTally() = default;

  explicit PreferenceTally(std::vector<TallyEntry> counts) : counts_(std::move(counts)) {
    std::sort(counts_.begin(), counts_.end(), [](const TallyEntry& a, const TallyEntry& b) {
      if (a.count != b.count) return a.count > b.count;
      return a.id < b.id;
    });
  }

  const std::vector<TallyEntry>& counts() const noexcept { return counts_; }
  std::size_t size() const noexcept { return counts_.size(); }
  bool empty() const noexcept { return counts_.empty(); }

  int total() const noexcept {
    int s = 0;
    for (const auto& e : counts_) s += e.count;
    return s;
  }

  int top() const noexcept { return counts_.empty() ? 0 : counts_.front().count; }

  friend bool operator==(const PreferenceTally&, const PreferenceTally&) = default;

 private:
  std::vector<TallyEntry> counts_;
};

// The banker: the level of competition, expressed as the minimum preference
// index a technology needs before it can be financed.
struct BankerPolicy {
  int consent_threshold = 0;
};

struct MutationBatch {
  std::vector<TechId> financed;
  Step step = 0;
  int mutation_count = 0;

  friend bool operator==(const MutationBatch&, const MutationBatch&) = default;
};

// Each entrepreneur scores every candidate as concentration * latent_signal
// plus private Gumbel noise and backs the argmax. The choice law is therefore
// softmax(concentration * latent_signal) over the candidates.
inline PreferenceTally cast_preferences(const EntrepreneurPool& pool, std::span<const UncertainTechnology> candidates,
                                        const RngStream& rng) {
  if (candidates.empty()) throw NoCandidates("no ready technologies to choose from");
  std::vector<TallyEntry> counts;
  counts.reserve(candidates.size());
  for (const auto& c : candidates) counts.push_back({c.id, 0});

  if (candidates.size() == 1) {
    counts.front().count = pool.n;
    return PreferenceTally(std::move(counts));
  }

  std::vector<double> base(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) base[i] = pool.concentration * candidates[i].latent_signal;

  auto engine = rng.engine();
  for (int e = 0; e < pool.n; ++e) {
    std::size_t best = 0;
    double best_value = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      const double gumbel = -std::log(-std::log(engine.uniform01()));
      const double value = base[i] + gumbel;
      if (value > best_value) {
        best_value = value;
        best = i;
      }
    }
    ++counts[best].count;
  }
  return PreferenceTally(std::move(counts));
}

// Finance every technology whose preference index is >= the threshold. The
// tally is sorted, so the financed set is a prefix of it.
inline MutationBatch apply_threshold(const PreferenceTally& tally, const BankerPolicy& policy, Step step) {
  MutationBatch batch;
  batch.step = step;
  for (const auto& entry : tally.counts()) {
    if (entry.count < policy.consent_threshold) break;
    batch.financed.push_back(entry.id);
  }
  batch.mutation_count = static_cast<int>(batch.financed.size());
  return batch;
}

// Signature of a preference model; tests substitute fixed tallies through it.
template <typename F>
concept PreferenceCaster = std::is_invocable_r_v<PreferenceTally, F, const EntrepreneurPool&,
                                                 std::span<const UncertainTechnology>, const RngStream&>;

struct AnimalSpirits {
  PreferenceTally operator()(const EntrepreneurPool& pool, std::span<const UncertainTechnology> candidates,
                             const RngStream& rng) const {
    return cast_preferences(pool, candidates, rng);
  }
};

// One financing round over the ready candidates. Financed candidates move
// from `uncertain` to `financed` in place. The returned tally is empty when
// there was no round.
template <PreferenceCaster Caster = AnimalSpirits>
MutationBatch finance_round(const EntrepreneurPool& pool, std::span<UncertainTechnology> candidates,
                            const BankerPolicy& policy, Step step, const RngStream& rng,
                            PreferenceTally* tally_out = nullptr, const Caster& caster = Caster{}) {
  if (candidates.empty()) {
    if (tally_out) *tally_out = PreferenceTally{};
    return MutationBatch{{}, step, 0};
  }
  PreferenceTally tally = caster(pool, std::span<const UncertainTechnology>(candidates), rng);
  MutationBatch batch = apply_threshold(tally, policy, step);
  for (auto& c : candidates) {
    if (std::find(batch.financed.begin(), batch.financed.end(), c.id) != batch.financed.end()) {
      c.state = Lifecycle::financed;
    }
  }
  if (tally_out) *tally_out = std::move(tally);
  return batch;
}

}  // namespace dsim
