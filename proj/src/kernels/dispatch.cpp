#include <atomic>
#include <string>

#include "backends.hpp"
#include "skconf/error.hpp"

namespace skconf::kernels {
namespace {

const KernelTable* widest_available() noexcept {
#if defined(SKCONF_HAVE_AVX2_KERNELS)
  if (detail::cpu_has_avx2_fma()) return &detail::kAvx2Table;
#endif
#if defined(SKCONF_HAVE_NEON_KERNELS)
  return &detail::kNeonTable;
#endif
  return &detail::kScalarTable;
}

const KernelTable* default_table() noexcept {
  static const KernelTable* const table = widest_available();
  return table;
}

std::atomic<const KernelTable*> g_override{nullptr};

}  // namespace

std::string_view to_string(Backend backend) noexcept {
  switch (backend) {
    case Backend::Scalar: return "scalar";
    case Backend::Avx2: return "avx2";
    case Backend::Neon: return "neon";
  }
  return "unknown";
}

const KernelTable* table_for(Backend backend) noexcept {
  switch (backend) {
    case Backend::Scalar:
      return &detail::kScalarTable;
    case Backend::Avx2:
#if defined(SKCONF_HAVE_AVX2_KERNELS)
      if (detail::cpu_has_avx2_fma()) return &detail::kAvx2Table;
#endif
      return nullptr;
    case Backend::Neon:
#if defined(SKCONF_HAVE_NEON_KERNELS)
      return &detail::kNeonTable;
#endif
      return nullptr;
  }
  return nullptr;
}

std::vector<Backend> available_backends() {
  std::vector<Backend> out;
  for (Backend b : {Backend::Scalar, Backend::Avx2, Backend::Neon}) {
    if (table_for(b) != nullptr) out.push_back(b);
  }
  return out;
}

const KernelTable& active() noexcept {
  const KernelTable* pinned = g_override.load(std::memory_order_acquire);
  return pinned != nullptr ? *pinned : *default_table();
}

void select(Backend backend) {
  const KernelTable* table = table_for(backend);
  if (table == nullptr) {
    throw Error(ErrorKind::InvalidArgument,
                "kernel backend '" + std::string(to_string(backend)) + "' is not available");
  }
  g_override.store(table, std::memory_order_release);
}

void reset_selection() noexcept { g_override.store(nullptr, std::memory_order_release); }

double sum(std::span<const double> x) noexcept { return active().sum(x.data(), x.size()); }

double squared_distance(std::span<const double> x, std::span<const double> y) noexcept {
  return active().squared_distance(x.data(), y.data(), x.size());
}

void axpby(double a, std::span<const double> x, double b, std::span<const double> y,
           std::span<double> out) noexcept {
  active().axpby(a, x.data(), b, y.data(), out.data(), out.size());
}

void axpy(double a, std::span<const double> x, std::span<double> y) noexcept {
  active().axpy(a, x.data(), y.data(), y.size());
}

void scale(double s, std::span<double> x) noexcept { active().scale(s, x.data(), x.size()); }

}  // namespace skconf::kernels
