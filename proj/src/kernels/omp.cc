#include "skyshare/kernels.h"

namespace skyshare::kernels::omp {

// Small batches are not worth a fork/join.
#define SKYSHARE_PARALLEL_FOR \
  _Pragma("omp parallel for schedule(static) if (n > 8192)")
#include "kernel_bodies.inc"
#undef SKYSHARE_PARALLEL_FOR

}  // namespace skyshare::kernels::omp
