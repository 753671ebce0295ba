#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace skconf {

using ActivityIndex = std::uint32_t;

// Ordered set of distinct activity labels. Position in the alphabet is the row
// index of every matrix built against it.
class Alphabet {
 public:
  explicit Alphabet(std::vector<std::string> labels);

  std::size_t size() const noexcept { return labels_.size(); }
  const std::string& label(ActivityIndex index) const { return labels_.at(index); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

  std::optional<ActivityIndex> find(std::string_view label) const noexcept;
  // Throws Error(UnknownLabel).
  ActivityIndex index_of(std::string_view label) const;

  friend bool operator==(const Alphabet&, const Alphabet&) = default;

 private:
  std::vector<std::string> labels_;
};

using AlphabetPtr = std::shared_ptr<const Alphabet>;

AlphabetPtr make_alphabet(std::vector<std::string> labels);

// Same object or equal label lists.
bool same_alphabet(const AlphabetPtr& a, const AlphabetPtr& b) noexcept;

class DeterministicTrace {
 public:
  DeterministicTrace(AlphabetPtr alphabet, std::vector<ActivityIndex> activities);

  // Resolves labels against the alphabet; throws Error(UnknownLabel).
  static DeterministicTrace from_labels(AlphabetPtr alphabet,
                                        std::span<const std::string> labels);
  // Whitespace-separated labels, e.g. "a b c d".
  static DeterministicTrace parse(AlphabetPtr alphabet, std::string_view text);

  const AlphabetPtr& alphabet() const noexcept { return alphabet_; }
  const std::vector<ActivityIndex>& activities() const noexcept { return activities_; }
  std::size_t size() const noexcept { return activities_.size(); }
  bool empty() const noexcept { return activities_.empty(); }
  ActivityIndex operator[](std::size_t event) const { return activities_[event]; }

  std::vector<std::string> labels() const;
  // Labels joined by single spaces.
  std::string to_string() const;

  // Activity sequences compare equal; alphabets must match for a meaningful
  // result but are not compared here.
  friend bool operator==(const DeterministicTrace& a, const DeterministicTrace& b) {
    return a.activities_ == b.activities_;
  }

 private:
  AlphabetPtr alphabet_;
  std::vector<ActivityIndex> activities_;
};

// n x m column-stochastic matrix: rows are activities, columns are events.
// Stored column-major so each event's distribution is contiguous.
class StochasticTrace {
 public:
  std::size_t activities() const noexcept { return activities_; }
  std::size_t events() const noexcept { return events_; }
  const AlphabetPtr& alphabet() const noexcept { return alphabet_; }

  double at(ActivityIndex activity, std::size_t event) const {
    return values_[event * activities_ + activity];
  }
  std::span<const double> column(std::size_t event) const {
    return {values_.data() + event * activities_, activities_};
  }
  std::span<const double> values() const noexcept { return values_; }

  // Builds a trace from values that are already known to be column-stochastic
  // (entries in [0,1], columns summing to 1 within 1e-9). Used by operations
  // whose outputs are stochastic by construction.
  static StochasticTrace from_stochastic_columns(AlphabetPtr alphabet,
                                                 std::size_t events,
                                                 std::vector<double> column_major);

 private:
  StochasticTrace(AlphabetPtr alphabet, std::size_t events, std::vector<double> values);

  AlphabetPtr alphabet_;
  std::size_t activities_ = 0;
  std::size_t events_ = 0;
  std::vector<double> values_;
};

// (trace, frequency) pairs over one alphabet. A trace-set process model is the
// same structure interpreted as a trace language.
class EventLog {
 public:
  struct Entry {
    DeterministicTrace trace;
    std::uint64_t frequency;
  };

  explicit EventLog(AlphabetPtr alphabet);

  // Merges into an existing equal trace by summing frequencies.
  // Throws Error(ZeroFrequency) for frequency 0 and AlphabetMismatch for a
  // trace over a different alphabet.
  void add(DeterministicTrace trace, std::uint64_t frequency = 1);

  const AlphabetPtr& alphabet() const noexcept { return alphabet_; }
  const std::vector<Entry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

 private:
  AlphabetPtr alphabet_;
  std::vector<Entry> entries_;
  std::unordered_map<std::string, std::size_t> index_;  // activity bytes -> entry
};

using TraceSetModel = EventLog;

// Column sums within this distance of 1 are renormalized on validation.
inline constexpr double kColumnSumTolerance = 1e-6;
// Entries above this (negative) value are clamped to zero.
inline constexpr double kNegativeTolerance = -1e-12;

// raw[i][j] is the probability of activity i at event j.
StochasticTrace validate_stochastic_trace(const std::vector<std::vector<double>>& raw,
                                          AlphabetPtr alphabet);

// Same, from a column-major buffer of n * events values.
StochasticTrace validate_stochastic_trace(std::span<const double> column_major,
                                          std::size_t events, AlphabetPtr alphabet);

StochasticTrace one_hot(const DeterministicTrace& trace);

// Per-event most likely activity; ties go to the earliest alphabet position.
DeterministicTrace argmax_decode(const StochasticTrace& trace);

// Product of the chosen entries, events treated as independent.
double realization_probability(const StochasticTrace& sk, const DeterministicTrace& t);

struct Realization {
  DeterministicTrace trace;
  double probability;
};

struct EnumerationOptions {
  double min_prob = 0.0;
  std::optional<std::size_t> top_k;
  std::uint64_t max_realizations = 10'000'000;
};

// Realizations with probability strictly above min_prob, sorted by
// probability descending, then lexicographically by alphabet position.
std::vector<Realization> enumerate_realizations(const StochasticTrace& sk,
                                                const EnumerationOptions& options = {});

// Upper bound on the number of realizations enumerate_realizations can return
// for these options (saturates at UINT64_MAX).
std::uint64_t projected_realization_count(const StochasticTrace& sk,
                                          const EnumerationOptions& options);

// Replaces every maximal run of consecutive events with the same argmax by the
// element-wise mean of the run.
StochasticTrace collapse_frames(const StochasticTrace& sk);

}  // namespace skconf
