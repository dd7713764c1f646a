#include "skyshare/kernels.h"

namespace skyshare::kernels::serial {

#define SKYSHARE_PARALLEL_FOR
#include "kernel_bodies.inc"
#undef SKYSHARE_PARALLEL_FOR

}  // namespace skyshare::kernels::serial
