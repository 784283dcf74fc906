#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "dsim/core/errors.hpp"

namespace dsim {

namespace detail {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t fnv1a(std::string_view s) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

}  // namespace detail

// Stateful draw source obtained from an RngStream. Counter-based: draw i is
// mix64(key + (i + 1) * golden), i.e. the splitmix64 sequence keyed by the
// stream. Satisfies UniformRandomBitGenerator.
class RngEngine {
 public:
  using result_type = std::uint64_t;

  explicit RngEngine(std::uint64_t key) noexcept : state_(key) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    state_ += detail::kGolden;
    return detail::mix64(state_);
  }

  // Uniform on the open interval (0, 1).
  double uniform01() noexcept {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform01(); }

  // Uniform integer in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n) noexcept {
    // Lemire's multiply-shift; bias is below 2^-64 * n and irrelevant here.
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>((*this)()) * n) >> 64);
  }

  bool bernoulli(double p) noexcept { return uniform01() < p; }

  // Box-Muller without caching, so every call consumes exactly two draws.
  double normal() noexcept {
    const double u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  double normal(double mean, double sd) noexcept { return mean + sd * normal(); }

  // Exact Poisson sampler. Knuth's product method on chunks of mean <= 30,
  // using additivity of independent Poisson variables for larger means.
  std::uint64_t poisson(double mean) noexcept {
    if (!(mean > 0.0)) return 0;
    std::uint64_t total = 0;
    double remaining = mean;
    while (remaining > 0.0) {
      const double chunk = remaining > 30.0 ? 30.0 : remaining;
      remaining -= chunk;
      const double limit = std::exp(-chunk);
      double product = uniform01();
      while (product > limit) {
        ++total;
        product *= uniform01();
      }
    }
    return total;
  }

 private:
  std::uint64_t state_;
};

// Immutable identity of a random stream: a root seed plus the label path used
// to reach it. The key is a pure function of (seed, path), so children can be
// derived in any order, on any thread, with the same result.
class RngStream {
 public:
  static RngStream root(std::uint64_t seed) { return RngStream(seed, {}, detail::mix64(seed ^ detail::kGolden)); }

  RngStream derive(std::string_view label) const {
    if (label.empty()) throw LabelEmpty("stream label must be non-empty");
    std::vector<std::string> path = path_;
    path.emplace_back(label);
    const std::uint64_t key = detail::mix64(key_ ^ detail::mix64(detail::fnv1a(label) + detail::kGolden));
    return RngStream(seed_, std::move(path), key);
  }

  RngStream derive(std::uint64_t index) const { return derive(std::to_string(index)); }

  std::uint64_t seed() const noexcept { return seed_; }
  const std::vector<std::string>& path() const noexcept { return path_; }
  std::uint64_t key() const noexcept { return key_; }

  RngEngine engine() const noexcept { return RngEngine(key_); }

  std::string describe() const {
    std::string s = std::to_string(seed_);
    for (const auto& p : path_) s += "/" + p;
    return s;
  }

  friend bool operator==(const RngStream&, const RngStream&) = default;

 private:
  RngStream(std::uint64_t seed, std::vector<std::string> path, std::uint64_t key)
      : seed_(seed), path_(std::move(path)), key_(key) {}

  std::uint64_t seed_;
  std::vector<std::string> path_;
  std::uint64_t key_;
};

inline RngStream derive_stream(const RngStream& parent, std::string_view label) { return parent.derive(label); }

}  // namespace dsim
