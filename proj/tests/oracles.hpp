#pragma once

// Test-only reference computations. Nothing here calls into the dynamic
// programming or enumeration code it is used to check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "skconf/core.hpp"
#include "skconf/synth.hpp"

namespace skconf::testing {

inline AlphabetPtr abcd() { return make_alphabet({"a", "b", "c", "d"}); }

// Observation matrix of the worked example, rows a..d, columns e1..e4.
inline const std::vector<std::vector<double>>& prior_rows() {
  static const std::vector<std::vector<double>> rows{
      {0.50, 0.30, 0.10, 0.20},
      {0.30, 0.60, 0.10, 0.20},
      {0.20, 0.05, 0.20, 0.31},
      {0.00, 0.05, 0.60, 0.29},
  };
  return rows;
}

// Posterior matrix as printed (two decimals), alpha = beta = 0.5.
inline const std::vector<std::vector<double>>& printed_posterior_rows() {
  static const std::vector<std::vector<double>> rows{
      {0.61, 0.29, 0.05, 0.10},
      {0.29, 0.66, 0.05, 0.10},
      {0.10, 0.02, 0.60, 0.15},
      {0.00, 0.03, 0.30, 0.65},
  };
  return rows;
}

inline StochasticTrace prior_matrix(const AlphabetPtr& alphabet) {
  return validate_stochastic_trace(prior_rows(), alphabet);
}

inline DeterministicTrace trace_of(const AlphabetPtr& alphabet, const std::string& text) {
  return DeterministicTrace::parse(alphabet, text);
}

inline EventLog worked_example_log(const AlphabetPtr& alphabet) {
  EventLog log(alphabet);
  log.add(trace_of(alphabet, "a b c d"), 20);
  log.add(trace_of(alphabet, "b a c d"), 10);
  return log;
}

// Minimum over every move sequence from (0,0) to (log_len, model_len).
// sync(i, j) < 0 marks an unavailable synchronous move.
inline double exhaustive_alignment_cost(std::size_t log_len, std::size_t model_len,
                                        const std::function<double(std::size_t, std::size_t)>& sync,
                                        double log_cost, double model_cost) {
  double best = std::numeric_limits<double>::infinity();
  std::function<void(std::size_t, std::size_t, double)> walk = [&](std::size_t i, std::size_t j, double acc) {
    if (i == log_len && j == model_len) {
      best = std::min(best, acc);
      return;
    }
    if (i < log_len && j < model_len) {
      const double c = sync(i, j);
      if (c >= 0.0) walk(i + 1, j + 1, acc + c);
    }
    if (i < log_len) walk(i + 1, j, acc + log_cost);
    if (j < model_len) walk(i, j + 1, acc + model_cost);
  };
  walk(0, 0, 0.0);
  return best;
}

inline double exhaustive_classic_cost(const DeterministicTrace& log, const DeterministicTrace& model) {
  return exhaustive_alignment_cost(
      log.size(), model.size(),
      [&](std::size_t i, std::size_t j) { return log[i] == model[j] ? 0.0 : -1.0; }, 1.0, 1.0);
}

struct BruteRealization {
  std::vector<ActivityIndex> activities;
  double probability;
};

// All n^m activity sequences (zero-probability ones included) via an odometer.
inline std::vector<BruteRealization> all_sequences(const StochasticTrace& sk) {
  const std::size_t n = sk.activities();
  const std::size_t m = sk.events();
  std::vector<BruteRealization> out;
  std::vector<ActivityIndex> digits(m, 0);
  while (true) {
    double p = 1.0;
    for (std::size_t j = 0; j < m; ++j) p *= sk.at(digits[j], j);
    out.push_back({digits, p});
    std::size_t pos = m;
    while (pos > 0) {
      --pos;
      if (++digits[pos] < n) break;
      digits[pos] = 0;
      if (pos == 0) return out;
    }
    if (m == 0) return out;
  }
}

// Column j drawn from a Dirichlet-like recipe: uniform weights with a chance
// of exact zeros, normalized. Columns always keep at least one positive entry.
inline StochasticTrace random_stochastic(Rng& rng, const AlphabetPtr& alphabet, std::size_t events,
                                         double zero_chance = 0.2) {
  const std::size_t n = alphabet->size();
  std::vector<double> values(n * events);
  for (std::size_t j = 0; j < events; ++j) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double w = rng.uniform() < zero_chance ? 0.0 : rng.uniform() + 1e-3;
      values[j * n + i] = w;
      total += w;
    }
    if (total == 0.0) {
      values[j * n + rng.below(n)] = 1.0;
      total = 1.0;
    }
    for (std::size_t i = 0; i < n; ++i) values[j * n + i] /= total;
  }
  return validate_stochastic_trace(values, events, alphabet);
}

inline DeterministicTrace random_trace(Rng& rng, const AlphabetPtr& alphabet, std::size_t length) {
  std::vector<ActivityIndex> activities(length);
  for (auto& a : activities) a = static_cast<ActivityIndex>(rng.below(alphabet->size()));
  return DeterministicTrace(alphabet, std::move(activities));
}

inline AlphabetPtr letters(std::size_t n) {
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < n; ++i) labels.push_back(std::string(1, static_cast<char>('a' + i)));
  return make_alphabet(std::move(labels));
}

inline bool column_stochastic(const StochasticTrace& sk, double tol = 1e-9) {
  for (std::size_t j = 0; j < sk.events(); ++j) {
    double total = 0.0;
    for (double p : sk.column(j)) {
      if (!(p >= 0.0 && p <= 1.0)) return false;
      total += p;
    }
    if (std::abs(total - 1.0) > tol) return false;
  }
  return true;
}

}  // namespace skconf::testing
