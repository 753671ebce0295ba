#pragma once

#include <span>
#include <vector>

#include "skconf/core.hpp"

namespace skconf {

enum class Measure { Frobenius, CrossEntropy };

// Probability floor applied before taking logarithms.
inline constexpr double kLogFloor = 1e-12;

// Frobenius norm of A - B. Both traces must share alphabet and length.
double frobenius_distance(const StochasticTrace& a, const StochasticTrace& b);

// Mean negative log-probability of the reference activities under sk:
// (1/m) * sum_j -ln(max(p[ref_j][j], 1e-12)).
double cross_entropy(const DeterministicTrace& reference, const StochasticTrace& sk);

// w_k = exp(-d_k) / sum exp(-d_k'), evaluated after shifting by min(d).
// Throws Error(EmptyVector) on empty input, InvalidArgument on a negative or
// non-finite distance.
std::vector<double> softmin_normalize(std::span<const double> distances);

}  // namespace skconf
