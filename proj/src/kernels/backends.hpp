#pragma once

#include "skconf/kernels.hpp"

namespace skconf::kernels::detail {

extern const KernelTable kScalarTable;

#if defined(__x86_64__) || defined(_M_X64)
#define SKCONF_HAVE_AVX2_KERNELS 1
extern const KernelTable kAvx2Table;
bool cpu_has_avx2_fma() noexcept;
#endif

#if defined(__aarch64__) && defined(__ARM_NEON)
#define SKCONF_HAVE_NEON_KERNELS 1
extern const KernelTable kNeonTable;
#endif

}  // namespace skconf::kernels::detail
