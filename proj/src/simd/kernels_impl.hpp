#pragma once

#include "marginlab/simd/kernels.hpp"

namespace marginlab::simd::detail {

const KernelTable& scalar_table() noexcept;

#if defined(MARGINLAB_HAVE_AVX2)
const KernelTable& avx2_table() noexcept;
#endif

}  // namespace marginlab::simd::detail
