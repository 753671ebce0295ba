#include "skconf/conformance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "skconf/error.hpp"

namespace skconf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Shortest path through the (log_len + 1) x (model_len + 1) alignment grid.
// sync_cost(i, j) returns the cost of a synchronous move pairing log event i
// with model position j, or +inf when no such move exists.
class AlignmentGrid {
 public:
  template <typename SyncCostFn>
  AlignmentGrid(std::size_t log_len, std::size_t model_len, SyncCostFn&& sync_cost,
                double log_cost, double model_cost)
      : rows_(log_len + 1),
        cols_(model_len + 1),
        log_cost_(log_cost),
        model_cost_(model_cost),
        cost_(rows_ * cols_, kInf),
        sync_(log_len * model_len, kInf) {
    for (std::size_t i = 0; i < log_len; ++i) {
      for (std::size_t j = 0; j < model_len; ++j) sync_[i * model_len + j] = sync_cost(i, j);
    }
    at(0, 0) = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) {
      for (std::size_t j = 0; j < cols_; ++j) {
        if (i == 0 && j == 0) continue;
        double best = kInf;
        if (i > 0 && j > 0) best = std::min(best, at(i - 1, j - 1) + sync(i - 1, j - 1));
        if (i > 0) best = std::min(best, at(i - 1, j) + log_cost_);
        if (j > 0) best = std::min(best, at(i, j - 1) + model_cost_);
        at(i, j) = best;
      }
    }
  }

  double total() const { return cost_.back(); }

  // Walks back from the final cell. Each step takes the first predecessor,
  // in sync / log / model order, whose path reproduces the cell's cost.
  Alignment trace_back() const {
    Alignment out;
    out.total_cost = total();
    std::size_t i = rows_ - 1;
    std::size_t j = cols_ - 1;
    while (i > 0 || j > 0) {
      const double here = at(i, j);
      if (i > 0 && j > 0) {
        const double c = sync(i - 1, j - 1);
        if (c != kInf && at(i - 1, j - 1) + c == here) {
          out.moves.push_back({MoveKind::Synchronous, i - 1, static_cast<ActivityIndex>(j - 1), c});
          --i;
          --j;
          continue;
        }
      }
      if (i > 0 && at(i - 1, j) + log_cost_ == here) {
        out.moves.push_back({MoveKind::Log, i - 1, std::nullopt, log_cost_});
        --i;
        continue;
      }
      out.moves.push_back({MoveKind::Model, std::nullopt, static_cast<ActivityIndex>(j - 1), model_cost_});
      --j;
    }
    std::reverse(out.moves.begin(), out.moves.end());
    return out;
  }

 private:
  double& at(std::size_t i, std::size_t j) { return cost_[i * cols_ + j]; }
  double at(std::size_t i, std::size_t j) const { return cost_[i * cols_ + j]; }
  double sync(std::size_t i, std::size_t j) const { return sync_[i * (cols_ - 1) + j]; }

  std::size_t rows_;
  std::size_t cols_;
  double log_cost_;
  double model_cost_;
  std::vector<double> cost_;
  std::vector<double> sync_;
};

// trace_back() stores the model position in model_activity; swap in labels.
Alignment label_model_moves(Alignment alignment, const DeterministicTrace& model_trace) {
  for (auto& move : alignment.moves) {
    if (move.model_activity) move.model_activity = model_trace[*move.model_activity];
  }
  return alignment;
}

void require_alphabet(const AlphabetPtr& a, const AlphabetPtr& b) {
  if (!same_alphabet(a, b)) {
    throw Error(ErrorKind::AlphabetMismatch, "log and model use different alphabets");
  }
}

void require_model(const TraceSetModel& model) {
  if (model.empty()) throw Error(ErrorKind::EmptyModel, "model contains no traces");
}

void validate_scheme(const CostScheme& scheme) {
  const auto ok = [](double c) { return std::isfinite(c) && c >= 0.0; };
  if (!ok(scheme.log_move_cost) || !ok(scheme.model_move_cost)) {
    throw Error(ErrorKind::InvalidArgument, "log and model move costs must be finite and nonnegative");
  }
  if (!(scheme.log_floor > 0.0 && scheme.log_floor <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "log floor must lie in (0, 1]");
  }
}

AlignmentGrid classic_grid(const DeterministicTrace& log_trace, const DeterministicTrace& model_trace) {
  return AlignmentGrid(
      log_trace.size(), model_trace.size(),
      [&](std::size_t i, std::size_t j) { return log_trace[i] == model_trace[j] ? 0.0 : kInf; },
      1.0, 1.0);
}

AlignmentGrid stochastic_grid(const StochasticTrace& sk, const DeterministicTrace& model_trace,
                              const CostScheme& scheme) {
  return AlignmentGrid(
      sk.events(), model_trace.size(),
      [&](std::size_t i, std::size_t j) {
        const double p = sk.at(model_trace[j], i);
        if (!(p > 0.0)) return kInf;
        return scheme.sync == SyncCost::OneMinusP ? 1.0 - p : -std::log(std::max(p, scheme.log_floor));
      },
      scheme.log_move_cost, scheme.model_move_cost);
}

}  // namespace

Alignment align(const DeterministicTrace& log_trace, const DeterministicTrace& model_trace) {
  require_alphabet(log_trace.alphabet(), model_trace.alphabet());
  return label_model_moves(classic_grid(log_trace, model_trace).trace_back(), model_trace);
}

TraceConformance model_conformance_det(const DeterministicTrace& trace, const TraceSetModel& model) {
  require_model(model);
  require_alphabet(trace.alphabet(), model.alphabet());
  std::size_t best = 0;
  double best_cost = kInf;
  const auto& entries = model.entries();
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const double cost = classic_grid(trace, entries[k].trace).total();
    if (cost < best_cost) {
      best_cost = cost;
      best = k;
    }
  }
  return {entries[best].trace, best, best_cost};
}

Alignment stochastic_alignment(const StochasticTrace& sk, const DeterministicTrace& model_trace,
                               const CostScheme& scheme) {
  require_alphabet(sk.alphabet(), model_trace.alphabet());
  validate_scheme(scheme);
  return label_model_moves(stochastic_grid(sk, model_trace, scheme).trace_back(), model_trace);
}

StochasticConformance model_conformance_stochastic(const StochasticTrace& sk,
                                                   const TraceSetModel& model,
                                                   const CostScheme& scheme) {
  require_model(model);
  require_alphabet(sk.alphabet(), model.alphabet());
  validate_scheme(scheme);
  std::size_t best = 0;
  double best_cost = kInf;
  const auto& entries = model.entries();
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const double cost = stochastic_grid(sk, entries[k].trace, scheme).total();
    if (cost < best_cost) {
      best_cost = cost;
      best = k;
    }
  }
  const auto& trace = entries[best].trace;
  return {trace, best,
          label_model_moves(stochastic_grid(sk, trace, scheme).trace_back(), trace)};
}

TraceConformance matrix_conformance(const StochasticTrace& sk, const TraceSetModel& model,
                                    MatrixMeasure measure) {
  require_model(model);
  require_alphabet(sk.alphabet(), model.alphabet());
  std::optional<std::size_t> best;
  double best_score = kInf;
  const auto& entries = model.entries();
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const auto& trace = entries[k].trace;
    if (trace.size() != sk.events()) continue;
    const double score = measure == MatrixMeasure::Frobenius ? frobenius_distance(sk, one_hot(trace))
                                                             : cross_entropy(trace, sk);
    if (!best || score < best_score) {
      best = k;
      best_score = score;
    }
  }
  if (!best) {
    throw Error(ErrorKind::NoLengthCompatibleTrace,
                "no model trace has " + std::to_string(sk.events()) + " events");
  }
  return {entries[*best].trace, *best, best_score};
}

ExpectedConformance expected_conformance(const StochasticTrace& sk, const TraceSetModel& model,
                                         double min_prob, std::uint64_t max_realizations) {
  require_model(model);
  require_alphabet(sk.alphabet(), model.alphabet());
  EnumerationOptions options;
  options.min_prob = min_prob;
  options.max_realizations = max_realizations;

  ExpectedConformance out;
  for (const auto& r : enumerate_realizations(sk, options)) {
    out.expected_cost += r.probability * model_conformance_det(r.trace, model).cost;
    out.covered_mass += r.probability;
    ++out.realizations;
  }
  out.zero_coverage = out.realizations == 0;
  return out;
}

}  // namespace skconf
