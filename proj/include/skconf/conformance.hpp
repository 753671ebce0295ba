#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "skconf/core.hpp"
#include "skconf/measures.hpp"

namespace skconf {

enum class MoveKind { Synchronous, Log, Model };

struct Move {
  MoveKind kind;
  std::optional<std::size_t> log_position;     // set for Synchronous and Log
  std::optional<ActivityIndex> model_activity;  // set for Synchronous and Model
  double cost;
};

struct Alignment {
  std::vector<Move> moves;
  double total_cost = 0.0;
};

enum class SyncCost { OneMinusP, NegLogP };

struct CostScheme {
  SyncCost sync = SyncCost::OneMinusP;
  double log_move_cost = 1.0;
  double model_move_cost = 1.0;
  double log_floor = kLogFloor;
};

// Classic alignment: synchronous moves only on equal labels at cost 0, log and
// model moves at cost 1. Among optimal alignments, synchronous moves are
// preferred over log moves over model moves.
Alignment align(const DeterministicTrace& log_trace, const DeterministicTrace& model_trace);

struct TraceConformance {
  DeterministicTrace best_trace;
  std::size_t best_index;  // position in the model's entry list
  double cost;
};

// Best alignment cost over the model's traces; ties go to the earlier trace.
TraceConformance model_conformance_det(const DeterministicTrace& trace,
                                       const TraceSetModel& model);

// Alignment of an SK trace with a model trace. A synchronous move on activity
// a at event j costs 1 - p (or -ln max(p, floor)) and is only available when
// p > 0; log and model moves cost the scheme's constants.
Alignment stochastic_alignment(const StochasticTrace& sk, const DeterministicTrace& model_trace,
                               const CostScheme& scheme = {});

struct StochasticConformance {
  DeterministicTrace best_trace;
  std::size_t best_index;
  Alignment alignment;
};

// Best stochastic alignment over the model's traces; ties go to the earlier trace.
StochasticConformance model_conformance_stochastic(const StochasticTrace& sk,
                                                   const TraceSetModel& model,
                                                   const CostScheme& scheme = {});

enum class MatrixMeasure { Frobenius, CrossEntropyOfDecode };

// Compares sk with the one-hot matrix of every model trace of the same length.
// Frobenius scores the matrix distance; CrossEntropyOfDecode scores the model
// trace as a decoding of sk by cross_entropy(model_trace, sk).
TraceConformance matrix_conformance(const StochasticTrace& sk, const TraceSetModel& model,
                                    MatrixMeasure measure);

struct ExpectedConformance {
  double expected_cost = 0.0;
  double covered_mass = 0.0;
  std::size_t realizations = 0;
  bool zero_coverage = true;
};

// sum over realizations r with P(r) > min_prob of P(r) * model_conformance_det(r).
ExpectedConformance expected_conformance(const StochasticTrace& sk, const TraceSetModel& model,
                                         double min_prob,
                                         std::uint64_t max_realizations = 10'000'000);

}  // namespace skconf
