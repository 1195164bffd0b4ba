#pragma once

#include <cstdint>
#include <random>

namespace epictl {

/// Named random streams. Each simulation run owns an environment seed; the
/// streams below are derived from it so that every strategy evaluated on the
/// same run index sees the same graph, initial infection and CTMC draws.
enum class Stream : std::uint64_t {
  graph = 1,
  initial_infection = 2,
  dynamics = 3,
  strategy = 4,
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Child seed for (parent, stream, index). Stable across platforms.
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t stream, std::uint64_t index = 0);

inline std::uint64_t derive_seed(std::uint64_t parent, Stream stream, std::uint64_t index = 0) {
  return derive_seed(parent, static_cast<std::uint64_t>(stream), index);
}

/// Stateless unit-rate exponential: the `count`-th draw of `channel` under
/// `key`. Used by the next-reaction engine, where each channel consumes its
/// own sequence regardless of what other channels do.
double counter_exponential(std::uint64_t key, std::uint64_t channel, std::uint64_t count);

/// mt19937_64 with portable variate generation (the std distributions are
/// implementation-defined, which would break cross-platform reproduction).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform in (0, 1].
  double uniform_open0() { return 1.0 - uniform(); }

  /// Exp(rate); rate must be > 0.
  double exponential(double rate);

  /// Uniform integer in [0, n); n must be > 0.
  std::uint64_t index(std::uint64_t n);

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace epictl
