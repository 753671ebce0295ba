#include "skconf/classify.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "skconf/error.hpp"
#include "skconf/kernels.hpp"
#include "skconf/measures.hpp"

namespace skconf {

BlendWeights::BlendWeights(double alpha) : alpha_(alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "alpha must lie in [0, 1]");
  }
}

LikelihoodMatrix likelihood_matrix(const StochasticTrace& sk, const EventLog& log) {
  if (log.empty()) throw Error(ErrorKind::EmptyLog, "log contains no traces");
  if (!same_alphabet(sk.alphabet(), log.alphabet())) {
    throw Error(ErrorKind::AlphabetMismatch, "observation and log use different alphabets");
  }

  const auto& entries = log.entries();
  std::vector<std::size_t> eligible;
  std::vector<double> distances;
  for (std::size_t k = 0; k < entries.size(); ++k) {
    if (entries[k].trace.size() != sk.events()) continue;
    eligible.push_back(k);
    distances.push_back(frobenius_distance(sk, one_hot(entries[k].trace)));
  }
  if (eligible.empty()) {
    throw Error(ErrorKind::NoLengthCompatibleTrace,
                "no log trace has " + std::to_string(sk.events()) + " events");
  }

  const auto proximity = softmin_normalize(distances);
  const std::size_t n = sk.activities();
  std::vector<double> values(sk.values().size(), 0.0);
  double norm = 0.0;
  for (std::size_t e = 0; e < eligible.size(); ++e) {
    const auto& entry = entries[eligible[e]];
    const double mass = static_cast<double>(entry.frequency) * proximity[e];
    for (std::size_t j = 0; j < entry.trace.size(); ++j) values[j * n + entry.trace[j]] += mass;
    norm += mass;
  }
  kernels::scale(1.0 / norm, values);

  LikelihoodMatrix out(StochasticTrace::from_stochastic_columns(sk.alphabet(), sk.events(), std::move(values)));
  out.proximity_.assign(entries.size(), 0.0);
  for (std::size_t e = 0; e < eligible.size(); ++e) out.proximity_[eligible[e]] = proximity[e];
  return out;
}

StochasticTrace posterior_update(const StochasticTrace& prior, const LikelihoodMatrix& tl,
                                 BlendWeights weights) {
  const auto& likelihood = tl.matrix();
  if (!same_alphabet(prior.alphabet(), likelihood.alphabet())) {
    throw Error(ErrorKind::AlphabetMismatch, "prior and likelihood use different alphabets");
  }
  if (prior.events() != likelihood.events()) {
    throw Error(ErrorKind::DimensionMismatch, "prior has " + std::to_string(prior.events()) +
                                                  " events, likelihood has " +
                                                  std::to_string(likelihood.events()));
  }
  std::vector<double> values(prior.values().size());
  kernels::axpby(weights.alpha(), prior.values(), weights.beta(), likelihood.values(), values);
  return StochasticTrace::from_stochastic_columns(prior.alphabet(), prior.events(), std::move(values));
}

WeightEstimate estimate_weights(const std::vector<LabelledObservation>& pairs, const EventLog& log,
                                double grid_step) {
  if (pairs.empty()) throw Error(ErrorKind::EmptyPairs, "weight estimation needs labelled observations");
  if (!(grid_step > 0.0 && grid_step <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "grid step must lie in (0, 1]");
  }

  std::vector<LikelihoodMatrix> likelihoods;
  likelihoods.reserve(pairs.size());
  for (const auto& pair : pairs) {
    if (pair.truth.size() != pair.observation.events()) {
      throw Error(ErrorKind::LengthMismatch, "ground truth and observation lengths differ");
    }
    likelihoods.push_back(likelihood_matrix(pair.observation, log));
  }

  std::vector<double> alphas;
  for (std::size_t k = 0;; ++k) {
    const double alpha = static_cast<double>(k) * grid_step;
    if (alpha >= 1.0 - 1e-9) break;
    alphas.push_back(alpha);
  }
  alphas.push_back(1.0);

  WeightEstimate best{BlendWeights(1.0), 0, {}};
  bool first = true;
  for (double alpha : alphas) {
    std::size_t correct = 0;
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      const auto posterior = posterior_update(pairs[p].observation, likelihoods[p], BlendWeights(alpha));
      if (argmax_decode(posterior) == pairs[p].truth) ++correct;
    }
    best.grid.emplace_back(alpha, correct);
    // Ascending grid, so >= hands ties to the larger alpha.
    if (first || correct >= best.correct) {
      best.weights = BlendWeights(alpha);
      best.correct = correct;
      first = false;
    }
  }
  return best;
}

ClassificationResult classify(const StochasticTrace& sk, const std::vector<NamedModel>& models,
                              const ClassifyOptions& options) {
  if (models.empty()) throw Error(ErrorKind::EmptyModelList, "no candidate models");

  ClassificationResult result;
  result.ranking.reserve(models.size());
  for (const auto& [id, model] : models) {
    ClassificationResult::Score score{id, 0.0, false};
    switch (options.method) {
      case ClassifyMethod::MatrixFrobenius: {
        const bool any_eligible = std::any_of(
            model.entries().begin(), model.entries().end(),
            [&](const EventLog::Entry& e) { return e.trace.size() == sk.events(); });
        if (any_eligible || model.empty()) {
          score.score = matrix_conformance(sk, model, MatrixMeasure::Frobenius).cost;
        } else {
          score.score = model_conformance_stochastic(sk, model, options.scheme).alignment.total_cost;
          score.fell_back = true;
        }
        break;
      }
      case ClassifyMethod::StochasticAlignment:
        score.score = model_conformance_stochastic(sk, model, options.scheme).alignment.total_cost;
        break;
      case ClassifyMethod::ExpectedCost:
        score.score = expected_conformance(sk, model, 0.0, options.max_realizations).expected_cost;
        break;
    }
    result.ranking.push_back(std::move(score));
  }
  std::stable_sort(result.ranking.begin(), result.ranking.end(),
                   [](const auto& a, const auto& b) { return a.score < b.score; });
  result.winner = result.ranking.front().id;
  return result;
}

}  // namespace skconf
