#pragma once

#include <string>
#include <utility>
#include <vector>

#include "skconf/conformance.hpp"
#include "skconf/core.hpp"

namespace skconf {

// Convex combination of one-hot model-trace matrices; column-stochastic.
class LikelihoodMatrix {
 public:
  explicit LikelihoodMatrix(StochasticTrace matrix) : matrix_(std::move(matrix)) {}
  const StochasticTrace& matrix() const noexcept { return matrix_; }
  // Softmin proximity weight of every log entry, 0 for length-incompatible ones.
  const std::vector<double>& proximity() const noexcept { return proximity_; }

 private:
  friend LikelihoodMatrix likelihood_matrix(const StochasticTrace&, const EventLog&);
  StochasticTrace matrix_;
  std::vector<double> proximity_;
};

// Observation weight alpha and prior-knowledge weight beta = 1 - alpha.
class BlendWeights {
 public:
  // Throws Error(InvalidArgument) unless alpha is in [0, 1].
  explicit BlendWeights(double alpha);
  double alpha() const noexcept { return alpha_; }
  double beta() const noexcept { return 1.0 - alpha_; }

 private:
  double alpha_;
};

// w = softmin of Frobenius distances from sk to each length-compatible log
// trace; T_L = sum f_k w_k one_hot(t_k) / sum f_k w_k.
LikelihoodMatrix likelihood_matrix(const StochasticTrace& sk, const EventLog& log);

// alpha * prior + beta * T_L.
StochasticTrace posterior_update(const StochasticTrace& prior, const LikelihoodMatrix& tl,
                                 BlendWeights weights);

struct LabelledObservation {
  StochasticTrace observation;
  DeterministicTrace truth;
};

struct WeightEstimate {
  BlendWeights weights;
  std::size_t correct;  // exact-match decodes at the chosen alpha
  std::vector<std::pair<double, std::size_t>> grid;  // (alpha, correct) per grid point
};

// Grid search over alpha in {0, step, 2 step, ..., 1} maximizing the number of
// posterior decodes that equal their ground truth; ties go to the larger alpha.
WeightEstimate estimate_weights(const std::vector<LabelledObservation>& pairs,
                                const EventLog& log, double grid_step = 0.1);

enum class ClassifyMethod { MatrixFrobenius, StochasticAlignment, ExpectedCost };

struct NamedModel {
  std::string id;
  TraceSetModel model;
};

struct ClassificationResult {
  struct Score {
    std::string id;
    double score;
    // MatrixFrobenius only: true when no trace had the observation's length and
    // the score is a stochastic alignment cost instead.
    bool fell_back = false;
  };
  std::vector<Score> ranking;  // ascending score, ties in model order
  std::string winner;
};

struct ClassifyOptions {
  ClassifyMethod method = ClassifyMethod::MatrixFrobenius;
  CostScheme scheme{};
  std::uint64_t max_realizations = 10'000'000;
};

// Lower score = more conforming.
ClassificationResult classify(const StochasticTrace& sk, const std::vector<NamedModel>& models,
                              const ClassifyOptions& options = {});

}  // namespace skconf
