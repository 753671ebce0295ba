#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "skconf/error.hpp"
#include "skconf/measures.hpp"

using namespace skconf;
using namespace skconf::testing;

TEST_SUITE("frobenius_distance") {
  TEST_CASE("worked example distances") {
    const auto alphabet = abcd();
    const auto prior = prior_matrix(alphabet);
    CHECK(std::abs(frobenius_distance(one_hot(trace_of(alphabet, "a b c d")), prior) - 1.52) <= 0.01);
    CHECK(std::abs(frobenius_distance(one_hot(trace_of(alphabet, "b a c d")), prior) - 1.82) <= 0.01);
    // Hand evaluation of the squared sums: 2.3352 and 3.3352.
    CHECK(frobenius_distance(one_hot(trace_of(alphabet, "a b c d")), prior) == doctest::Approx(std::sqrt(2.3352)));
    CHECK(frobenius_distance(one_hot(trace_of(alphabet, "b a c d")), prior) == doctest::Approx(std::sqrt(3.3352)));
  }

  TEST_CASE("identity and hamming") {
    const auto alphabet = abcd();
    const auto prior = prior_matrix(alphabet);
    CHECK(frobenius_distance(prior, prior) == 0.0);
    const auto t = one_hot(trace_of(alphabet, "a b c d a"));
    const auto u = one_hot(trace_of(alphabet, "a c c b a"));
    CHECK(frobenius_distance(t, u) == std::sqrt(4.0));
  }

  TEST_CASE("metric properties on random matrices") {
    Rng rng(29);
    for (int k = 0; k < 500; ++k) {
      const auto alphabet = letters(1 + rng.below(5));
      const std::size_t m = 1 + rng.below(8);
      const auto a = random_stochastic(rng, alphabet, m);
      const auto b = random_stochastic(rng, alphabet, m);
      const auto c = random_stochastic(rng, alphabet, m);
      const double ab = frobenius_distance(a, b);
      CHECK(ab == doctest::Approx(frobenius_distance(b, a)).epsilon(1e-14));
      CHECK(frobenius_distance(a, a) <= 1e-12);
      CHECK(ab <= frobenius_distance(a, c) + frobenius_distance(c, b) + 1e-12);
    }
  }

  TEST_CASE("shape errors") {
    const auto alphabet = abcd();
    const auto prior = prior_matrix(alphabet);
    CHECK_THROWS_AS(frobenius_distance(prior, one_hot(trace_of(alphabet, "a b"))), Error);
    // Separately built but equal alphabets are compatible.
    CHECK_NOTHROW(frobenius_distance(prior, one_hot(trace_of(letters(4), "a b c d"))));
    try {
      frobenius_distance(prior, one_hot(trace_of(letters(3), "a b c a")));
      FAIL("expected AlphabetMismatch");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::AlphabetMismatch);
    }
  }
}

TEST_SUITE("cross_entropy") {
  TEST_CASE("values") {
    const auto alphabet = abcd();
    const auto t = trace_of(alphabet, "a b c d");
    CHECK(cross_entropy(t, one_hot(t)) == 0.0);

    const double expected = (-std::log(0.5) - std::log(0.6) - std::log(0.6) - std::log(0.31)) / 4.0;
    CHECK(expected == doctest::Approx(0.7215).epsilon(1e-4));
    CHECK(cross_entropy(trace_of(alphabet, "a b d c"), prior_matrix(alphabet)) == doctest::Approx(expected).epsilon(1e-14));
  }

  TEST_CASE("zero probability hits the floor") {
    const auto alphabet = letters(2);
    const auto sk = validate_stochastic_trace({{0.0}, {1.0}}, alphabet);
    CHECK(cross_entropy(trace_of(alphabet, "a"), sk) == doctest::Approx(-std::log(1e-12)));
    CHECK(cross_entropy(trace_of(alphabet, "a"), sk) == doctest::Approx(27.631).epsilon(1e-4));
  }

  TEST_CASE("nonnegative") {
    Rng rng(31);
    for (int k = 0; k < 300; ++k) {
      const auto alphabet = letters(1 + rng.below(5));
      const std::size_t m = 1 + rng.below(8);
      CHECK(cross_entropy(random_trace(rng, alphabet, m), random_stochastic(rng, alphabet, m)) >= 0.0);
    }
  }

  TEST_CASE("length mismatch") {
    const auto alphabet = abcd();
    CHECK_THROWS_AS(cross_entropy(trace_of(alphabet, "a"), prior_matrix(alphabet)), Error);
  }
}

TEST_SUITE("softmin_normalize") {
  TEST_CASE("worked example weights") {
    const std::vector<double> d{1.52, 1.82};
    const auto w = softmin_normalize(d);
    CHECK(std::abs(w[0] - 0.57) <= 0.01);
    CHECK(std::abs(w[1] - 0.43) <= 0.01);
    CHECK(w[0] == doctest::Approx(1.0 / (1.0 + std::exp(-0.3))));
  }

  TEST_CASE("singleton and symmetric") {
    CHECK(softmin_normalize(std::vector<double>{3.7}) == std::vector<double>{1.0});
    for (double c : {0.0, 0.5, 7.0, 300.0}) {
      const auto w = softmin_normalize(std::vector<double>{c, c});
      CHECK(w[0] == 0.5);
      CHECK(w[1] == 0.5);
    }
  }

  TEST_CASE("shift invariance and strict ordering") {
    Rng rng(37);
    for (int k = 0; k < 500; ++k) {
      std::vector<double> d(1 + rng.below(8));
      for (auto& x : d) x = rng.uniform() * 5.0;
      const double shift = rng.uniform() * 50.0;
      std::vector<double> shifted(d);
      for (auto& x : shifted) x += shift;
      const auto w = softmin_normalize(d);
      const auto ws = softmin_normalize(shifted);
      double total = 0.0;
      for (std::size_t i = 0; i < d.size(); ++i) {
        CHECK(std::abs(w[i] - ws[i]) <= 1e-12);
        CHECK(w[i] > 0.0);
        total += w[i];
        for (std::size_t j = 0; j < d.size(); ++j) {
          if (d[i] < d[j]) CHECK(w[i] > w[j]);
        }
      }
      CHECK(std::abs(total - 1.0) <= 1e-12);
    }
  }

  TEST_CASE("rejections") {
    CHECK_THROWS_AS(softmin_normalize(std::vector<double>{}), Error);
    CHECK_THROWS_AS(softmin_normalize(std::vector<double>{-1.0}), Error);
    CHECK_THROWS_AS(softmin_normalize(std::vector<double>{INFINITY}), Error);
  }
}
