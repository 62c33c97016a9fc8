#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>

#include "medsec/bytes.hpp"

namespace medsec {

/// Seeded generator shared by every stochastic component of a scenario.
///
/// Only the raw 64-bit engine output is taken from the standard library; the
/// distributions are implemented here so that sequences are identical across
/// standard-library vendors.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Independent stream derived from (seed, stream id) via splitmix64.
  static Rng stream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [lo, hi], unbiased.
  std::uint64_t uniform(std::uint64_t lo, std::uint64_t hi);
  int uniform_int(int lo, int hi);

  /// Uniform double in [0, 1) with 53 bits of precision.
  double uniform01();
  bool bernoulli(double p) { return uniform01() < p; }
  double normal(double mean, double sd);

  void fill(std::span<Byte> out);

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_normal_;
};

/// Stream identifiers used when deriving per-purpose generators.
enum class RngStream : std::uint64_t {
  Sensor = 1,
  Iv = 2,
  Loss = 3,
  Attacker = 4,
  Latency = 5,
  Gap = 6,
};

inline Rng make_stream(std::uint64_t seed, RngStream stream) {
  return Rng::stream(seed, static_cast<std::uint64_t>(stream));
}

}  // namespace medsec
