#pragma once

#include "wfusion/kernels.hpp"

namespace wfusion::kernels::detail {

struct Vtable {
  void (*scale)(cxd, cxd*, std::size_t);
  void (*axpy)(cxd, const cxd*, cxd*, std::size_t);
  double (*norm_sq)(const cxd*, std::size_t);
  cxd (*dot)(const cxd*, const cxd*, std::size_t);
  void (*matvec)(const cxd*, const cxd*, cxd*, std::size_t);
};

const Vtable& scalar_vtable();

#if defined(WFUSION_HAVE_AVX2)
const Vtable& avx2_vtable();
#endif

}  // namespace wfusion::kernels::detail
