#pragma once

#include "pnpf/simd.hpp"

namespace pnpf::simd::detail {

const KernelTable& scalar_table();

// Null when the variant is not compiled into this build.
const KernelTable* avx2_table();
const KernelTable* neon_table();

}  // namespace pnpf::simd::detail
