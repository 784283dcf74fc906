#pragma once

#include <cstdint>

#include "dsim/core/errors.hpp"

namespace dsim {

using Step = std::int64_t;

// Discrete simulation time. One step is one market period; the horizon is
// fixed when the clock is made and there is no open-ended mode.
class SimulationClock {
 public:
  static SimulationClock create(Step horizon) {
    if (horizon < 1) {
      throw HorizonInvalid("horizon must be >= 1, got " + std::to_string(horizon));
    }
    return SimulationClock(0, horizon);
  }

  Step t() const noexcept { return t_; }
  Step horizon() const noexcept { return horizon_; }
  bool finished() const noexcept { return t_ == horizon_; }
  Step remaining() const noexcept { return horizon_ - t_; }

  // A longer run is a new clock, never an extension of this one.
  SimulationClock advanced() const {
    if (t_ >= horizon_) {
      throw HorizonExceeded("clock already at horizon " + std::to_string(horizon_));
    }
    return SimulationClock(t_ + 1, horizon_);
  }

  friend bool operator==(const SimulationClock&, const SimulationClock&) = default;

 private:
  SimulationClock(Step t, Step horizon) : t_(t), horizon_(horizon) {}

  Step t_;
  Step horizon_;
};

inline SimulationClock new_clock(Step horizon) { return SimulationClock::create(horizon); }

inline SimulationClock advance(const SimulationClock& clock) { return clock.advanced(); }

}  // namespace dsim
