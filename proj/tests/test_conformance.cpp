#include <doctest.h>

#include <cmath>
#include <map>

#include "oracles.hpp"
#include "skconf/conformance.hpp"
#include "skconf/error.hpp"

using namespace skconf;
using namespace skconf::testing;

namespace {

// Every trace over `alphabet` with length <= max_len.
std::vector<DeterministicTrace> all_traces(const AlphabetPtr& alphabet, std::size_t max_len) {
  std::vector<DeterministicTrace> out{DeterministicTrace(alphabet, {})};
  std::vector<std::vector<ActivityIndex>> frontier{{}};
  for (std::size_t len = 1; len <= max_len; ++len) {
    std::vector<std::vector<ActivityIndex>> next;
    for (const auto& prefix : frontier) {
      for (ActivityIndex a = 0; a < alphabet->size(); ++a) {
        auto grown = prefix;
        grown.push_back(a);
        out.emplace_back(alphabet, grown);
        next.push_back(std::move(grown));
      }
    }
    frontier = std::move(next);
  }
  return out;
}

void check_alignment_shape(const Alignment& alignment, std::size_t log_len, const DeterministicTrace& model) {
  double total = 0.0;
  std::vector<std::size_t> log_positions;
  std::vector<ActivityIndex> model_activities;
  for (const auto& move : alignment.moves) {
    total += move.cost;
    switch (move.kind) {
      case MoveKind::Synchronous:
        REQUIRE(move.log_position.has_value());
        REQUIRE(move.model_activity.has_value());
        break;
      case MoveKind::Log:
        REQUIRE(move.log_position.has_value());
        REQUIRE(!move.model_activity.has_value());
        break;
      case MoveKind::Model:
        REQUIRE(!move.log_position.has_value());
        REQUIRE(move.model_activity.has_value());
        break;
    }
    if (move.log_position) log_positions.push_back(*move.log_position);
    if (move.model_activity) model_activities.push_back(*move.model_activity);
  }
  CHECK(std::abs(total - alignment.total_cost) <= 1e-9);
  REQUIRE(log_positions.size() == log_len);
  for (std::size_t i = 0; i < log_len; ++i) CHECK(log_positions[i] == i);
  CHECK(model_activities == model.activities());
}

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected skconf::Error");
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_SUITE("align") {
  TEST_CASE("examples") {
    const auto alphabet = abcd();
    const auto same = align(trace_of(alphabet, "a b c d"), trace_of(alphabet, "a b c d"));
    CHECK(same.total_cost == 0.0);
    REQUIRE(same.moves.size() == 4);
    for (const auto& m : same.moves) CHECK(m.kind == MoveKind::Synchronous);

    const auto swapped_log = trace_of(alphabet, "a b d c");
    const auto reference = trace_of(alphabet, "a b c d");
    CHECK(exhaustive_classic_cost(swapped_log, reference) == 2.0);
    CHECK(align(swapped_log, reference).total_cost == 2.0);

    const auto empty = align(DeterministicTrace(alphabet, {}), trace_of(alphabet, "a b"));
    CHECK(empty.total_cost == 2.0);
    REQUIRE(empty.moves.size() == 2);
    CHECK(empty.moves[0].kind == MoveKind::Model);
    CHECK(empty.moves[1].kind == MoveKind::Model);
  }

  TEST_CASE("tie-break prefers synchronous, then log, then model moves") {
    const auto alphabet = letters(2);
    // <a> vs <b>: log+model in either order; the walk back takes the log move
    // last, so the forward order is model then log.
    const auto ab = align(trace_of(alphabet, "a"), trace_of(alphabet, "b"));
    REQUIRE(ab.moves.size() == 2);
    CHECK(ab.moves[0].kind == MoveKind::Model);
    CHECK(ab.moves[1].kind == MoveKind::Log);
    // Same input always yields the same alignment.
    const auto again = align(trace_of(alphabet, "a"), trace_of(alphabet, "b"));
    CHECK(again.moves.size() == ab.moves.size());
  }

  TEST_CASE("DP equals exhaustive search for every pair with lengths <= 5 over two labels") {
    const auto alphabet = letters(2);
    const auto traces = all_traces(alphabet, 5);
    REQUIRE(traces.size() == 63);
    for (const auto& t : traces) {
      for (const auto& u : traces) {
        const auto alignment = align(t, u);
        REQUIRE(alignment.total_cost == exhaustive_classic_cost(t, u));
        CHECK(alignment.total_cost == align(u, t).total_cost);
      }
      CHECK(align(t, t).total_cost == 0.0);
    }
  }

  TEST_CASE("alignment structure on random traces") {
    Rng rng(41);
    for (int k = 0; k < 300; ++k) {
      const auto alphabet = letters(1 + rng.below(4));
      const auto t = random_trace(rng, alphabet, rng.below(7));
      const auto u = random_trace(rng, alphabet, rng.below(7));
      check_alignment_shape(align(t, u), t.size(), u);
    }
  }

  TEST_CASE("alphabet mismatch") {
    CHECK(kind_of([] { align(trace_of(letters(2), "a"), trace_of(letters(3), "a")); }) ==
          ErrorKind::AlphabetMismatch);
  }
}

TEST_SUITE("model_conformance_det") {
  TEST_CASE("examples") {
    const auto alphabet = abcd();
    TraceSetModel model(alphabet);
    model.add(trace_of(alphabet, "a b c d"));
    model.add(trace_of(alphabet, "b a c d"));

    const auto member = model_conformance_det(trace_of(alphabet, "a b c d"), model);
    CHECK(member.best_trace.to_string() == "a b c d");
    CHECK(member.cost == 0.0);

    const auto swapped = trace_of(alphabet, "a b d c");
    CHECK(exhaustive_classic_cost(swapped, trace_of(alphabet, "a b c d")) == 2.0);
    CHECK(exhaustive_classic_cost(swapped, trace_of(alphabet, "b a c d")) == 4.0);
    const auto result = model_conformance_det(swapped, model);
    CHECK(result.cost == 2.0);
    CHECK(result.best_index == 0);

    TraceSetModel single(alphabet);
    single.add(trace_of(alphabet, "a"));
    CHECK(model_conformance_det(DeterministicTrace(alphabet, {}), single).cost == 1.0);
  }

  TEST_CASE("ties go to the earlier model trace") {
    const auto alphabet = letters(3);
    TraceSetModel model(alphabet);
    model.add(trace_of(alphabet, "a c"));
    model.add(trace_of(alphabet, "b c"));
    const auto result = model_conformance_det(trace_of(alphabet, "c"), model);
    CHECK(result.cost == 1.0);
    CHECK(result.best_index == 0);
  }

  TEST_CASE("empty model") {
    const auto alphabet = letters(2);
    CHECK(kind_of([&] { model_conformance_det(trace_of(alphabet, "a"), TraceSetModel(alphabet)); }) ==
          ErrorKind::EmptyModel);
  }
}

TEST_SUITE("stochastic_alignment") {
  TEST_CASE("one-hot input costs nothing against its own trace") {
    const auto alphabet = abcd();
    const auto t = trace_of(alphabet, "d a c b a");
    CHECK(stochastic_alignment(one_hot(t), t).total_cost == 0.0);
  }

  TEST_CASE("worked example prior against a b c d") {
    const auto alphabet = abcd();
    const auto prior = prior_matrix(alphabet);
    const auto model = trace_of(alphabet, "a b c d");
    const double oracle = exhaustive_alignment_cost(
        4, 4, [&](std::size_t i, std::size_t j) { return 1.0 - prior.at(model[j], i); }, 1.0, 1.0);
    CHECK(oracle == doctest::Approx(2.41).epsilon(1e-12));

    const auto alignment = stochastic_alignment(prior, model);
    CHECK(std::abs(alignment.total_cost - 2.41) <= 1e-9);
    REQUIRE(alignment.moves.size() == 4);
    for (const auto& m : alignment.moves) CHECK(m.kind == MoveKind::Synchronous);
    check_alignment_shape(alignment, 4, model);
  }

  TEST_CASE("zero-probability synchronous moves are unavailable") {
    // Matrix (0, 1) over (a, b) against <a>: a cannot have occurred at the
    // event, so the only alignments are log + model moves.
    const auto alphabet = letters(2);
    const auto sk = validate_stochastic_trace({{0.0}, {1.0}}, alphabet);
    const auto alignment = stochastic_alignment(sk, trace_of(alphabet, "a"));
    CHECK(alignment.total_cost == 2.0);
    REQUIRE(alignment.moves.size() == 2);
    CHECK(alignment.moves[0].kind != MoveKind::Synchronous);
    CHECK(alignment.moves[1].kind != MoveKind::Synchronous);

    // Any positive probability re-enables the synchronous move.
    const auto tiny = validate_stochastic_trace({{1e-9}, {1.0 - 1e-9}}, alphabet);
    CHECK(stochastic_alignment(tiny, trace_of(alphabet, "a")).total_cost == doctest::Approx(1.0 - 1e-9));
  }

  TEST_CASE("neg-log-p costs") {
    const auto alphabet = letters(2);
    const auto sk = validate_stochastic_trace({{0.25, 0.5}, {0.75, 0.5}}, alphabet);
    CostScheme scheme;
    scheme.sync = SyncCost::NegLogP;
    scheme.log_move_cost = 5.0;
    scheme.model_move_cost = 5.0;
    const auto alignment = stochastic_alignment(sk, trace_of(alphabet, "a b"), scheme);
    CHECK(alignment.total_cost == doctest::Approx(-std::log(0.25) - std::log(0.5)));
  }

  TEST_CASE("degenerates to the classic alignment on one-hot input") {
    Rng rng(43);
    for (int k = 0; k < 300; ++k) {
      const auto alphabet = letters(1 + rng.below(5));
      const auto t = random_trace(rng, alphabet, 1 + rng.below(7));
      const auto u = random_trace(rng, alphabet, rng.below(8));
      CHECK(stochastic_alignment(one_hot(t), u).total_cost == align(t, u).total_cost);
    }
  }

  TEST_CASE("DP equals exhaustive search and respects the all-log/all-model bound") {
    Rng rng(47);
    for (int k = 0; k < 300; ++k) {
      const auto alphabet = letters(1 + rng.below(4));
      const auto sk = random_stochastic(rng, alphabet, 1 + rng.below(5));
      const auto u = random_trace(rng, alphabet, rng.below(6));
      CostScheme scheme;
      scheme.log_move_cost = 0.5 + rng.uniform();
      scheme.model_move_cost = 0.5 + rng.uniform();
      const auto alignment = stochastic_alignment(sk, u, scheme);
      const double oracle = exhaustive_alignment_cost(
          sk.events(), u.size(),
          [&](std::size_t i, std::size_t j) {
            const double p = sk.at(u[j], i);
            return p > 0.0 ? 1.0 - p : -1.0;
          },
          scheme.log_move_cost, scheme.model_move_cost);
      CHECK(alignment.total_cost == doctest::Approx(oracle).epsilon(1e-12));
      CHECK(alignment.total_cost <=
            sk.events() * scheme.log_move_cost + u.size() * scheme.model_move_cost + 1e-12);
      check_alignment_shape(alignment, sk.events(), u);
    }
  }

  TEST_CASE("scheme validation") {
    const auto alphabet = letters(2);
    CostScheme bad;
    bad.log_move_cost = -1.0;
    CHECK(kind_of([&] { stochastic_alignment(one_hot(trace_of(alphabet, "a")), trace_of(alphabet, "a"), bad); }) ==
          ErrorKind::InvalidArgument);
  }
}

TEST_SUITE("matrix_conformance") {
  TEST_CASE("worked example") {
    const auto alphabet = abcd();
    const auto log = worked_example_log(alphabet);
    const auto result = matrix_conformance(prior_matrix(alphabet), log, MatrixMeasure::Frobenius);
    CHECK(result.best_trace.to_string() == "a b c d");
    CHECK(std::abs(result.cost - 1.52) <= 0.01);
  }

  TEST_CASE("member trace scores zero") {
    const auto alphabet = abcd();
    const auto log = worked_example_log(alphabet);
    const auto t = trace_of(alphabet, "b a c d");
    for (auto measure : {MatrixMeasure::Frobenius, MatrixMeasure::CrossEntropyOfDecode}) {
      const auto result = matrix_conformance(one_hot(t), log, measure);
      CHECK(result.best_trace == t);
      CHECK(result.cost == 0.0);
    }
  }

  TEST_CASE("cross-entropy picks the most probable model trace") {
    const auto alphabet = abcd();
    const auto result =
        matrix_conformance(prior_matrix(alphabet), worked_example_log(alphabet), MatrixMeasure::CrossEntropyOfDecode);
    CHECK(result.best_trace.to_string() == "a b c d");
    CHECK(result.cost ==
          doctest::Approx((-std::log(0.5) - std::log(0.6) - std::log(0.2) - std::log(0.29)) / 4.0));
  }

  TEST_CASE("length-incompatible traces are skipped") {
    const auto alphabet = abcd();
    TraceSetModel model(alphabet);
    model.add(trace_of(alphabet, "a b c"));
    CHECK(kind_of([&] { matrix_conformance(prior_matrix(alphabet), model, MatrixMeasure::Frobenius); }) ==
          ErrorKind::NoLengthCompatibleTrace);
    model.add(trace_of(alphabet, "b a c d"));
    CHECK(matrix_conformance(prior_matrix(alphabet), model, MatrixMeasure::Frobenius).best_index == 1);
    CHECK(kind_of([&] { matrix_conformance(prior_matrix(alphabet), TraceSetModel(alphabet), MatrixMeasure::Frobenius); }) ==
          ErrorKind::EmptyModel);
  }
}

TEST_SUITE("expected_conformance") {
  TEST_CASE("one-hot observation") {
    const auto alphabet = abcd();
    const auto log = worked_example_log(alphabet);
    const auto result = expected_conformance(one_hot(trace_of(alphabet, "a b c d")), log, 0.0);
    CHECK(result.expected_cost == 0.0);
    CHECK(result.covered_mass == 1.0);
    CHECK(!result.zero_coverage);
  }

  TEST_CASE("two-event example: 0.7 * 0 + 0.3 * 2") {
    const auto alphabet = letters(2);
    const auto sk = validate_stochastic_trace({{0.7, 0.0}, {0.3, 1.0}}, alphabet);
    TraceSetModel model(alphabet);
    model.add(trace_of(alphabet, "a b"));
    CHECK(exhaustive_classic_cost(trace_of(alphabet, "a b"), trace_of(alphabet, "a b")) == 0.0);
    CHECK(exhaustive_classic_cost(trace_of(alphabet, "b b"), trace_of(alphabet, "a b")) == 2.0);
    const auto result = expected_conformance(sk, model, 0.0);
    CHECK(result.expected_cost == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(result.covered_mass == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(result.realizations == 2);
  }

  TEST_CASE("min_prob 1 covers nothing") {
    const auto alphabet = abcd();
    const auto result = expected_conformance(prior_matrix(alphabet), worked_example_log(alphabet), 1.0);
    CHECK(result.expected_cost == 0.0);
    CHECK(result.covered_mass == 0.0);
    CHECK(result.zero_coverage);
  }

  TEST_CASE("pruning lowers coverage but never the per-realization costs") {
    const auto alphabet = abcd();
    const auto sk = prior_matrix(alphabet);
    const auto log = worked_example_log(alphabet);
    const auto full = expected_conformance(sk, log, 0.0);
    const auto pruned = expected_conformance(sk, log, 0.01);
    CHECK(pruned.covered_mass < full.covered_mass);
    CHECK(pruned.expected_cost <= full.expected_cost);
    CHECK(pruned.realizations < full.realizations);
  }

  TEST_CASE("matches a direct brute-force sum") {
    Rng rng(53);
    for (int k = 0; k < 40; ++k) {
      const auto alphabet = letters(1 + rng.below(3));
      const auto sk = random_stochastic(rng, alphabet, 1 + rng.below(4));
      TraceSetModel model(alphabet);
      for (int t = 0; t < 3; ++t) model.add(random_trace(rng, alphabet, rng.below(5)));
      double oracle = 0.0;
      for (const auto& r : all_sequences(sk)) {
        const DeterministicTrace trace(alphabet, r.activities);
        double best = INFINITY;
        for (const auto& e : model.entries()) best = std::min(best, exhaustive_classic_cost(trace, e.trace));
        oracle += r.probability * best;
      }
      CHECK(expected_conformance(sk, model, 0.0).expected_cost == doctest::Approx(oracle).epsilon(1e-12));
    }
  }

  TEST_CASE("guard") {
    const auto alphabet = letters(4);
    std::vector<double> uniform(4 * 6, 0.25);
    const auto sk = validate_stochastic_trace(uniform, 6, alphabet);
    TraceSetModel model(alphabet);
    model.add(trace_of(alphabet, "a"));
    CHECK(kind_of([&] { expected_conformance(sk, model, 0.0, 1000); }) == ErrorKind::ExplosionGuard);
    CHECK(expected_conformance(sk, model, 0.0, 4096).realizations == 4096);
  }
}
