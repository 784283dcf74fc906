#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <ostream>
#include <string>

#include "dsim/core/clock.hpp"

namespace dsim {

// Index of a region in the scenario's region list.
struct RegionId {
  std::uint32_t value = 0;

  friend auto operator<=>(const RegionId&, const RegionId&) = default;
};

// Identity of an idea and of the technology developed from it. A technology
// keeps its id when it diffuses to another region. Ideas seeded before the run
// have negative steps; initial incumbents use kIncumbentStep.
inline constexpr Step kIncumbentStep = std::numeric_limits<Step>::min();

struct TechId {
  std::uint32_t origin = 0;  // region where the idea was conceived
  Step step = 0;             // conception step
  std::uint32_t seq = 0;     // arrival index within (origin, step)

  friend auto operator<=>(const TechId&, const TechId&) = default;

  std::string str() const {
    if (step == kIncumbentStep) return "r" + std::to_string(origin) + "-incumbent";
    return "r" + std::to_string(origin) + "-s" + std::to_string(step) + "-n" + std::to_string(seq);
  }
};

inline std::ostream& operator<<(std::ostream& os, const TechId& id) { return os << id.str(); }

using IdeaId = TechId;

inline TechId incumbent_id(RegionId region) { return TechId{region.value, kIncumbentStep, 0}; }

// Lifecycle of a technology: R&D output -> financed mutation -> realized
// candidate -> in production, or discarded by selection.
enum class Lifecycle : std::uint8_t { uncertain, financed, certain_candidate, certain, discarded };

inline const char* to_string(Lifecycle s) {
  switch (s) {
    case Lifecycle::uncertain: return "uncertain";
    case Lifecycle::financed: return "financed";
    case Lifecycle::certain_candidate: return "certain-candidate";
    case Lifecycle::certain: return "certain";
    case Lifecycle::discarded: return "discarded";
  }
  return "?";
}

}  // namespace dsim
