#include "skconf/measures.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "skconf/error.hpp"
#include "skconf/kernels.hpp"

namespace skconf {

namespace {

void require_comparable(const AlphabetPtr& a, const AlphabetPtr& b, std::size_t len_a,
                        std::size_t len_b) {
  if (!same_alphabet(a, b)) {
    throw Error(ErrorKind::AlphabetMismatch, "operands use different alphabets");
  }
  if (len_a != len_b) {
    throw Error(ErrorKind::LengthMismatch, "operands have " + std::to_string(len_a) + " and " +
                                               std::to_string(len_b) + " events");
  }
}

}  // namespace

double frobenius_distance(const StochasticTrace& a, const StochasticTrace& b) {
  require_comparable(a.alphabet(), b.alphabet(), a.events(), b.events());
  return std::sqrt(kernels::squared_distance(a.values(), b.values()));
}

double cross_entropy(const DeterministicTrace& reference, const StochasticTrace& sk) {
  require_comparable(reference.alphabet(), sk.alphabet(), reference.size(), sk.events());
  double total = 0.0;
  for (std::size_t j = 0; j < reference.size(); ++j) {
    total -= std::log(std::max(sk.at(reference[j], j), kLogFloor));
  }
  return total / static_cast<double>(reference.size());
}

std::vector<double> softmin_normalize(std::span<const double> distances) {
  if (distances.empty()) throw Error(ErrorKind::EmptyVector, "softmin of an empty distance vector");
  for (double d : distances) {
    if (!std::isfinite(d) || d < 0.0) {
      throw Error(ErrorKind::InvalidArgument, "distances must be finite and nonnegative");
    }
  }
  const double shift = *std::min_element(distances.begin(), distances.end());
  std::vector<double> weights(distances.size());
  double total = 0.0;
  for (std::size_t k = 0; k < distances.size(); ++k) {
    weights[k] = std::exp(shift - distances[k]);
    total += weights[k];
  }
  for (double& w : weights) w /= total;
  return weights;
}

}  // namespace skconf
