#include "skconf/synth.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "skconf/error.hpp"

namespace skconf {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

Rng Rng::stream(std::uint64_t seed, std::uint64_t index) {
  return Rng(splitmix64(seed) ^ splitmix64(~index));
}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::uint64_t Rng::below(std::uint64_t bound) {
  // Rejection keeps the result exactly uniform.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % bound;
}

std::size_t Rng::categorical(std::span<const double> weights) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  const double target = uniform() * total;
  double running = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    running += weights[i];
    last_positive = i;
    if (target < running) return i;
  }
  return last_positive;
}

void NoiseModel::validate(std::size_t alphabet_size) const {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "noise epsilon must lie in [0, 1]");
  }
  if (confusion.empty()) return;
  if (confusion.size() != alphabet_size * alphabet_size) {
    throw Error(ErrorKind::DimensionMismatch, "confusion grid must be n x n");
  }
  for (std::size_t a = 0; a < alphabet_size; ++a) {
    double total = 0.0;
    for (std::size_t b = 0; b < alphabet_size; ++b) {
      const double v = confusion[a * alphabet_size + b];
      if (!std::isfinite(v) || v < 0.0) {
        throw Error(ErrorKind::InvalidArgument, "confusion entries must be finite and nonnegative");
      }
      total += v;
    }
    if (std::abs(total - 1.0) > 1e-9) {
      throw Error(ErrorKind::InvalidArgument, "confusion row " + std::to_string(a + 1) + " does not sum to 1");
    }
  }
}

std::vector<double> adjacent_confusion(std::size_t n) {
  std::vector<double> grid(n * n, 0.0);
  for (std::size_t a = 0; a < n; ++a) {
    if (n == 1) {
      grid[0] = 1.0;
    } else if (a == 0) {
      grid[a * n + 1] = 1.0;
    } else if (a == n - 1) {
      grid[a * n + a - 1] = 1.0;
    } else {
      grid[a * n + a - 1] = 0.5;
      grid[a * n + a + 1] = 0.5;
    }
  }
  return grid;
}

StochasticTrace synthesize_sk_trace(const DeterministicTrace& truth, const NoiseModel& noise) {
  const std::size_t n = truth.alphabet()->size();
  noise.validate(n);
  if (truth.empty()) throw Error(ErrorKind::EmptyTrace, "cannot synthesize an empty trace");

  const double eps = noise.epsilon;
  std::vector<double> values(n * truth.size());
  for (std::size_t j = 0; j < truth.size(); ++j) {
    const ActivityIndex actual = truth[j];
    double* col = values.data() + j * n;
    for (std::size_t i = 0; i < n; ++i) {
      const double smear = noise.confusion.empty() ? 1.0 / static_cast<double>(n)
                                                   : noise.confusion[actual * n + i];
      col[i] = eps * smear + (i == actual ? 1.0 - eps : 0.0);
    }
  }
  return StochasticTrace::from_stochastic_columns(truth.alphabet(), truth.size(), std::move(values));
}

std::vector<SyntheticObservation> synthesize_log(const TraceSetModel& model, std::size_t count,
                                                 const NoiseModel& noise) {
  if (model.empty()) throw Error(ErrorKind::EmptyModel, "model contains no traces");
  noise.validate(model.alphabet()->size());

  std::vector<double> frequencies;
  frequencies.reserve(model.size());
  for (const auto& entry : model.entries()) frequencies.push_back(static_cast<double>(entry.frequency));

  std::vector<SyntheticObservation> out;
  out.reserve(count);
  for (std::size_t s = 0; s < count; ++s) {
    Rng rng = Rng::stream(noise.seed, s);
    const std::size_t pick = rng.categorical(frequencies);
    const auto& truth = model.entries()[pick].trace;
    out.push_back({synthesize_sk_trace(truth, noise), truth, pick});
  }
  return out;
}

}  // namespace skconf
