#pragma once

// Dense double-precision kernels behind the matrix operations. Every kernel
// has a portable scalar reference implementation; vectorized variants (AVX2+FMA
// on x86-64, NEON on AArch64) are compiled in when the target supports them
// and picked at runtime from the CPU's feature set. Vector variants reorder
// floating-point reductions, so they agree with the scalar reference to a few
// ulps rather than bit-for-bit.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace skconf::kernels {

enum class Backend { Scalar, Avx2, Neon };

std::string_view to_string(Backend backend) noexcept;

struct KernelTable {
  Backend backend;
  // sum of x[0..n)
  double (*sum)(const double* x, std::size_t n);
  // sum of (x[i] - y[i])^2
  double (*squared_distance)(const double* x, const double* y, std::size_t n);
  // out[i] = a * x[i] + b * y[i]; out may alias x or y
  void (*axpby)(double a, const double* x, double b, const double* y,
                double* out, std::size_t n);
  // y[i] += a * x[i]
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // x[i] *= s
  void (*scale)(double s, double* x, std::size_t n);
};

// Table for a specific backend, or nullptr when it is not compiled in or the
// running CPU lacks the instructions.
const KernelTable* table_for(Backend backend) noexcept;

std::vector<Backend> available_backends();

// Currently selected table. Defaults to the widest available backend.
const KernelTable& active() noexcept;

// Pins the backend used by active(). Throws skconf::Error(InvalidArgument) if
// the backend is unavailable.
void select(Backend backend);

// Restores the default (widest available) backend.
void reset_selection() noexcept;

double sum(std::span<const double> x) noexcept;
double squared_distance(std::span<const double> x,
                        std::span<const double> y) noexcept;
void axpby(double a, std::span<const double> x, double b,
           std::span<const double> y, std::span<double> out) noexcept;
void axpy(double a, std::span<const double> x, std::span<double> y) noexcept;
void scale(double s, std::span<double> x) noexcept;

}  // namespace skconf::kernels
