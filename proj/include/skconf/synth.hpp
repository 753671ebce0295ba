#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "skconf/core.hpp"

namespace skconf {

// Seeded generator with a fixed, portable algorithm: a 64-bit Mersenne Twister
// (std::mt19937_64, whose output sequence is fixed by the C++ standard) seeded
// through SplitMix64. Variates are derived here rather than through <random>
// distributions, whose algorithms are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  // Independent stream for item `index` of a run seeded with `seed`.
  static Rng stream(std::uint64_t seed, std::uint64_t index);

  std::uint64_t next() { return engine_(); }
  // Uniform in [0, 1) with 53 random bits.
  double uniform();
  // Uniform integer in [0, bound); bound > 0.
  std::uint64_t below(std::uint64_t bound);
  // Index drawn with probability weights[i] / sum(weights).
  std::size_t categorical(std::span<const double> weights);

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

struct NoiseModel {
  double epsilon = 0.0;
  // Row-stochastic n x n confusion grid, row-major; row a is the smear applied
  // to true activity a. Empty means uniform smear (epsilon / n everywhere).
  std::vector<double> confusion;
  std::uint64_t seed = 0;

  // Throws Error(InvalidArgument) for epsilon outside [0,1] or a malformed grid.
  void validate(std::size_t alphabet_size) const;
};

// Confusion grid that splits each activity's smear evenly between its
// alphabet neighbours (a single neighbour at the ends; itself when n = 1).
std::vector<double> adjacent_confusion(std::size_t alphabet_size);

// Column j = (1 - eps) one_hot(truth_j) + eps * smear_row(truth_j).
StochasticTrace synthesize_sk_trace(const DeterministicTrace& truth, const NoiseModel& noise);

struct SyntheticObservation {
  StochasticTrace observation;
  DeterministicTrace truth;
  std::size_t truth_index;  // entry index in the source model
};

// Draws `count` traces proportionally to frequency, sample i from
// Rng::stream(noise.seed, i), and corrupts each with synthesize_sk_trace.
std::vector<SyntheticObservation> synthesize_log(const TraceSetModel& model, std::size_t count,
                                                 const NoiseModel& noise);

}  // namespace skconf
