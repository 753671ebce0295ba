#include "skconf/core.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>
#include <unordered_set>

#include "skconf/error.hpp"
#include "skconf/kernels.hpp"

namespace skconf {

// ---------------------------------------------------------------------------
// Alphabet

Alphabet::Alphabet(std::vector<std::string> labels) : labels_(std::move(labels)) {
  if (labels_.empty()) throw Error(ErrorKind::InvalidArgument, "alphabet must not be empty");
  std::unordered_set<std::string_view> seen;
  for (const auto& label : labels_) {
    if (label.empty()) throw Error(ErrorKind::InvalidArgument, "empty activity label");
    // Labels have to survive both text formats unquoted.
    const bool bad = label.front() == '#' ||
                     std::any_of(label.begin(), label.end(), [](unsigned char c) {
                       return c == ',' || std::isspace(c) != 0;
                     });
    if (bad) throw Error(ErrorKind::InvalidArgument, "activity label '" + label + "' is not a bare token");
    if (!seen.insert(label).second) {
      throw Error(ErrorKind::InvalidArgument, "duplicate activity label '" + label + "'");
    }
  }
}

std::optional<ActivityIndex> Alphabet::find(std::string_view label) const noexcept {
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] == label) return static_cast<ActivityIndex>(i);
  }
  return std::nullopt;
}

ActivityIndex Alphabet::index_of(std::string_view label) const {
  if (auto index = find(label)) return *index;
  throw Error(ErrorKind::UnknownLabel, "unknown activity label '" + std::string(label) + "'");
}

AlphabetPtr make_alphabet(std::vector<std::string> labels) {
  return std::make_shared<const Alphabet>(std::move(labels));
}

bool same_alphabet(const AlphabetPtr& a, const AlphabetPtr& b) noexcept {
  if (a == b) return true;
  if (!a || !b) return false;
  return *a == *b;
}

// ---------------------------------------------------------------------------
// DeterministicTrace

DeterministicTrace::DeterministicTrace(AlphabetPtr alphabet, std::vector<ActivityIndex> activities)
    : alphabet_(std::move(alphabet)), activities_(std::move(activities)) {
  if (!alphabet_) throw Error(ErrorKind::InvalidArgument, "trace needs an alphabet");
  for (ActivityIndex a : activities_) {
    if (a >= alphabet_->size()) {
      throw Error(ErrorKind::UnknownLabel, "activity index " + std::to_string(a) + " outside alphabet");
    }
  }
}

DeterministicTrace DeterministicTrace::from_labels(AlphabetPtr alphabet,
                                                   std::span<const std::string> labels) {
  if (!alphabet) throw Error(ErrorKind::InvalidArgument, "trace needs an alphabet");
  std::vector<ActivityIndex> activities;
  activities.reserve(labels.size());
  for (const auto& label : labels) activities.push_back(alphabet->index_of(label));
  return DeterministicTrace(std::move(alphabet), std::move(activities));
}

DeterministicTrace DeterministicTrace::parse(AlphabetPtr alphabet, std::string_view text) {
  std::istringstream in{std::string(text)};
  std::vector<std::string> labels;
  for (std::string token; in >> token;) labels.push_back(token);
  return from_labels(std::move(alphabet), labels);
}

std::vector<std::string> DeterministicTrace::labels() const {
  std::vector<std::string> out;
  out.reserve(activities_.size());
  for (ActivityIndex a : activities_) out.push_back(alphabet_->label(a));
  return out;
}

std::string DeterministicTrace::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < activities_.size(); ++i) {
    if (i != 0) out += ' ';
    out += alphabet_->label(activities_[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// StochasticTrace

StochasticTrace::StochasticTrace(AlphabetPtr alphabet, std::size_t events, std::vector<double> values)
    : alphabet_(std::move(alphabet)),
      activities_(alphabet_->size()),
      events_(events),
      values_(std::move(values)) {}

StochasticTrace StochasticTrace::from_stochastic_columns(AlphabetPtr alphabet, std::size_t events,
                                                         std::vector<double> column_major) {
  if (!alphabet) throw Error(ErrorKind::InvalidArgument, "trace needs an alphabet");
  if (events == 0 || column_major.size() != alphabet->size() * events) {
    throw Error(ErrorKind::DimensionMismatch, "matrix shape does not match alphabet and event count");
  }
  return StochasticTrace(std::move(alphabet), events, std::move(column_major));
}

StochasticTrace validate_stochastic_trace(std::span<const double> column_major, std::size_t events,
                                          AlphabetPtr alphabet) {
  if (!alphabet) throw Error(ErrorKind::InvalidArgument, "trace needs an alphabet");
  const std::size_t n = alphabet->size();
  if (events == 0) throw Error(ErrorKind::DimensionMismatch, "a stochastic trace needs at least one event");
  if (column_major.size() != n * events) {
    throw Error(ErrorKind::DimensionMismatch,
                "expected " + std::to_string(n * events) + " entries, got " +
                    std::to_string(column_major.size()));
  }

  std::vector<double> values(column_major.begin(), column_major.end());
  for (std::size_t j = 0; j < events; ++j) {
    std::span<double> col(values.data() + j * n, n);
    for (std::size_t i = 0; i < n; ++i) {
      double& p = col[i];
      if (!std::isfinite(p)) {
        throw Error(ErrorKind::NonFiniteEntry, "non-finite probability for activity '" +
                                                   alphabet->label(static_cast<ActivityIndex>(i)) +
                                                   "' at event " + std::to_string(j + 1));
      }
      if (p < kNegativeTolerance) {
        throw Error(ErrorKind::NegativeEntry, "negative probability for activity '" +
                                                  alphabet->label(static_cast<ActivityIndex>(i)) +
                                                  "' at event " + std::to_string(j + 1));
      }
      if (p < 0.0) p = 0.0;
    }
    const double total = kernels::sum(col);
    if (std::abs(total - 1.0) > kColumnSumTolerance) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "column " << (j + 1) << " sums to " << total;
      throw Error(ErrorKind::ColumnSumViolation, msg.str());
    }
    if (total != 1.0) {
      for (double& p : col) p /= total;
    }
  }
  return StochasticTrace::from_stochastic_columns(std::move(alphabet), events, std::move(values));
}

StochasticTrace validate_stochastic_trace(const std::vector<std::vector<double>>& raw,
                                          AlphabetPtr alphabet) {
  if (!alphabet) throw Error(ErrorKind::InvalidArgument, "trace needs an alphabet");
  const std::size_t n = alphabet->size();
  if (raw.size() != n) {
    throw Error(ErrorKind::DimensionMismatch, "matrix has " + std::to_string(raw.size()) +
                                                  " rows, alphabet has " + std::to_string(n));
  }
  const std::size_t m = raw.front().size();
  std::vector<double> column_major(n * m);
  for (std::size_t i = 0; i < n; ++i) {
    if (raw[i].size() != m) throw Error(ErrorKind::DimensionMismatch, "ragged matrix rows");
    for (std::size_t j = 0; j < m; ++j) column_major[j * n + i] = raw[i][j];
  }
  return validate_stochastic_trace(column_major, m, std::move(alphabet));
}

StochasticTrace one_hot(const DeterministicTrace& trace) {
  if (trace.empty()) throw Error(ErrorKind::EmptyTrace, "cannot embed an empty trace");
  const std::size_t n = trace.alphabet()->size();
  std::vector<double> values(n * trace.size(), 0.0);
  for (std::size_t j = 0; j < trace.size(); ++j) values[j * n + trace[j]] = 1.0;
  return StochasticTrace::from_stochastic_columns(trace.alphabet(), trace.size(), std::move(values));
}

namespace {

ActivityIndex column_argmax(std::span<const double> col) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < col.size(); ++i) {
    if (col[i] > col[best]) best = i;
  }
  return static_cast<ActivityIndex>(best);
}

}  // namespace

DeterministicTrace argmax_decode(const StochasticTrace& trace) {
  std::vector<ActivityIndex> out(trace.events());
  for (std::size_t j = 0; j < trace.events(); ++j) out[j] = column_argmax(trace.column(j));
  return DeterministicTrace(trace.alphabet(), std::move(out));
}

double realization_probability(const StochasticTrace& sk, const DeterministicTrace& t) {
  if (!same_alphabet(sk.alphabet(), t.alphabet())) {
    throw Error(ErrorKind::AlphabetMismatch, "trace and matrix use different alphabets");
  }
  if (t.size() != sk.events()) {
    throw Error(ErrorKind::LengthMismatch, "trace has " + std::to_string(t.size()) +
                                               " events, matrix has " + std::to_string(sk.events()));
  }
  double p = 1.0;
  for (std::size_t j = 0; j < t.size(); ++j) p *= sk.at(t[j], j);
  return p;
}

// ---------------------------------------------------------------------------
// Realization enumeration

namespace {

constexpr std::uint64_t kSaturated = std::numeric_limits<std::uint64_t>::max();

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > kSaturated / a) return kSaturated;
  return a * b;
}

// Probability descending, then lexicographic by activity index.
bool ranks_before(double pa, const std::vector<ActivityIndex>& a, double pb,
                  const std::vector<ActivityIndex>& b) {
  if (pa != pb) return pa > pb;
  return a < b;
}

struct Candidate {
  double probability;
  std::vector<ActivityIndex> activities;
};

struct WorstOnTop {
  bool operator()(const Candidate& x, const Candidate& y) const {
    return ranks_before(x.probability, x.activities, y.probability, y.activities);
  }
};

class Enumerator {
 public:
  Enumerator(const StochasticTrace& sk, const EnumerationOptions& options)
      : sk_(sk), options_(options), choices_(sk.events()), suffix_bound_(sk.events() + 1, 1.0) {
    for (std::size_t j = 0; j < sk.events(); ++j) {
      auto col = sk.column(j);
      for (std::size_t i = 0; i < col.size(); ++i) {
        if (col[i] > 0.0) choices_[j].push_back(static_cast<ActivityIndex>(i));
      }
      // Most likely first so top-k bounds tighten early; equal probabilities
      // keep alphabet order.
      std::stable_sort(choices_[j].begin(), choices_[j].end(),
                       [&](ActivityIndex a, ActivityIndex b) { return col[a] > col[b]; });
    }
    for (std::size_t j = sk.events(); j-- > 0;) {
      const double best = choices_[j].empty() ? 0.0 : sk.at(choices_[j].front(), j);
      suffix_bound_[j] = best * suffix_bound_[j + 1];
    }
    prefix_.reserve(sk.events());
  }

  std::vector<Candidate> run() {
    descend(0, 1.0);
    std::vector<Candidate> out;
    if (options_.top_k) {
      out.reserve(heap_.size());
      while (!heap_.empty()) {
        out.push_back(heap_.top());
        heap_.pop();
      }
    } else {
      out = std::move(all_);
    }
    std::sort(out.begin(), out.end(), [](const Candidate& x, const Candidate& y) {
      return ranks_before(x.probability, x.activities, y.probability, y.activities);
    });
    return out;
  }

 private:
  // Bounds are products evaluated in a different order than the final
  // probability, so they get a little slack before pruning.
  static constexpr double kSlack = 1.0 + 1e-9;

  bool pruned(std::size_t event, double partial) const {
    const double bound = partial * suffix_bound_[event] * kSlack;
    if (bound <= options_.min_prob) return true;
    if (options_.top_k && heap_.size() == *options_.top_k && bound < heap_.top().probability) {
      return true;
    }
    return false;
  }

  void descend(std::size_t event, double partial) {
    if (event == sk_.events()) {
      if (partial > options_.min_prob) emit(partial);
      return;
    }
    if (pruned(event, partial)) return;
    for (ActivityIndex a : choices_[event]) {
      prefix_.push_back(a);
      descend(event + 1, partial * sk_.at(a, event));
      prefix_.pop_back();
    }
  }

  void emit(double probability) {
    if (!options_.top_k) {
      all_.push_back({probability, prefix_});
      return;
    }
    if (heap_.size() < *options_.top_k) {
      heap_.push({probability, prefix_});
    } else if (ranks_before(probability, prefix_, heap_.top().probability, heap_.top().activities)) {
      heap_.pop();
      heap_.push({probability, prefix_});
    }
  }

  const StochasticTrace& sk_;
  const EnumerationOptions& options_;
  std::vector<std::vector<ActivityIndex>> choices_;
  std::vector<double> suffix_bound_;
  std::vector<ActivityIndex> prefix_;
  std::vector<Candidate> all_;
  std::priority_queue<Candidate, std::vector<Candidate>, WorstOnTop> heap_;
};

}  // namespace

std::uint64_t projected_realization_count(const StochasticTrace& sk,
                                          const EnumerationOptions& options) {
  std::uint64_t count = 1;
  for (std::size_t j = 0; j < sk.events(); ++j) {
    auto col = sk.column(j);
    const auto support = static_cast<std::uint64_t>(
        std::count_if(col.begin(), col.end(), [](double p) { return p > 0.0; }));
    count = saturating_mul(count, support);
  }
  // At most 1/min_prob realizations can each exceed min_prob.
  if (options.min_prob > 0.0) {
    const double cap = std::floor(1.0 / options.min_prob);
    if (cap < static_cast<double>(count)) count = static_cast<std::uint64_t>(cap);
  }
  if (options.top_k) count = std::min<std::uint64_t>(count, *options.top_k);
  return count;
}

std::vector<Realization> enumerate_realizations(const StochasticTrace& sk,
                                                const EnumerationOptions& options) {
  if (!(options.min_prob >= 0.0 && options.min_prob <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "min_prob must lie in [0, 1]");
  }
  if (options.top_k && *options.top_k == 0) {
    throw Error(ErrorKind::InvalidArgument, "top_k must be positive");
  }
  if (!options.top_k) {
    const std::uint64_t projected = projected_realization_count(sk, options);
    if (projected > options.max_realizations) {
      throw Error(ErrorKind::ExplosionGuard,
                  "projected " + std::to_string(projected) + " realizations exceeds the cap of " +
                      std::to_string(options.max_realizations));
    }
  }

  auto candidates = Enumerator(sk, options).run();
  std::vector<Realization> out;
  out.reserve(candidates.size());
  for (auto& c : candidates) {
    out.push_back({DeterministicTrace(sk.alphabet(), std::move(c.activities)), c.probability});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Frame grouping

StochasticTrace collapse_frames(const StochasticTrace& sk) {
  const std::size_t n = sk.activities();
  std::vector<double> out;
  out.reserve(sk.values().size());
  std::size_t groups = 0;

  std::size_t start = 0;
  while (start < sk.events()) {
    const ActivityIndex label = column_argmax(sk.column(start));
    std::size_t end = start + 1;
    while (end < sk.events() && column_argmax(sk.column(end)) == label) ++end;

    const std::size_t offset = out.size();
    auto first = sk.column(start);
    out.insert(out.end(), first.begin(), first.end());
    if (end - start > 1) {
      std::span<double> acc(out.data() + offset, n);
      for (std::size_t j = start + 1; j < end; ++j) kernels::axpy(1.0, sk.column(j), acc);
      kernels::scale(1.0 / static_cast<double>(end - start), acc);
    }
    ++groups;
    start = end;
  }
  return StochasticTrace::from_stochastic_columns(sk.alphabet(), groups, std::move(out));
}

// ---------------------------------------------------------------------------
// EventLog

EventLog::EventLog(AlphabetPtr alphabet) : alphabet_(std::move(alphabet)) {
  if (!alphabet_) throw Error(ErrorKind::InvalidArgument, "log needs an alphabet");
}

void EventLog::add(DeterministicTrace trace, std::uint64_t frequency) {
  if (frequency == 0) throw Error(ErrorKind::ZeroFrequency, "trace frequency must be positive");
  if (!same_alphabet(alphabet_, trace.alphabet())) {
    throw Error(ErrorKind::AlphabetMismatch, "trace alphabet differs from the log alphabet");
  }
  const auto& acts = trace.activities();
  std::string key(reinterpret_cast<const char*>(acts.data()), acts.size() * sizeof(ActivityIndex));
  auto [it, inserted] = index_.try_emplace(std::move(key), entries_.size());
  if (!inserted) {
    entries_[it->second].frequency += frequency;
    return;
  }
  entries_.push_back({DeterministicTrace(alphabet_, trace.activities()), frequency});
}

}  // namespace skconf
