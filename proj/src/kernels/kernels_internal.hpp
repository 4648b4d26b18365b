#pragma once

#include "nprr/kernels.hpp"

namespace nprr::kernels::detail {

extern const Table kScalarTable;

#if defined(NPRR_HAVE_AVX2)
extern const Table kAvx2Table;
#endif

}  // namespace nprr::kernels::detail
