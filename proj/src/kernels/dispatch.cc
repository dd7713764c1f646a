#include <atomic>

#include "skyshare/kernels.h"

namespace skyshare::kernels {

namespace {
std::atomic<Backend> g_backend{Backend::kOpenMP};
}  // namespace

void set_backend(Backend b) { g_backend.store(b, std::memory_order_relaxed); }
Backend backend() { return g_backend.load(std::memory_order_relaxed); }

namespace dispatch {

#define SKYSHARE_DISPATCH(name, ...)            \
  if (backend() == Backend::kSerial) {          \
    serial::name(__VA_ARGS__);                  \
  } else {                                      \
    omp::name(__VA_ARGS__);                     \
  }

void arith_mask(std::span<const Word> x, std::span<const Word> u,
                std::span<Word> out, Word mask) {
  SKYSHARE_DISPATCH(arith_mask, x, u, out, mask)
}

void arith_add(std::span<const Word> a, std::span<const Word> b,
               std::span<Word> out, Word mask) {
  SKYSHARE_DISPATCH(arith_add, a, b, out, mask)
}

void arith_beaver_combine(bool first, std::span<const Word> e,
                          std::span<const Word> f, std::span<const Word> u,
                          std::span<const Word> v, std::span<const Word> w,
                          std::span<Word> out, Word mask) {
  SKYSHARE_DISPATCH(arith_beaver_combine, first, e, f, u, v, w, out, mask)
}

void bin_xor(std::span<const Word> a, std::span<const Word> b,
             std::span<Word> out) {
  SKYSHARE_DISPATCH(bin_xor, a, b, out)
}

void bin_beaver_combine(bool first, std::span<const Word> e,
                        std::span<const Word> f, std::span<const Word> u,
                        std::span<const Word> v, std::span<const Word> w,
                        std::span<Word> out) {
  SKYSHARE_DISPATCH(bin_beaver_combine, first, e, f, u, v, w, out)
}

void dabit_to_arith(bool first, std::span<const Word> c,
                    std::span<const Word> ra, std::span<Word> out, Word mask) {
  SKYSHARE_DISPATCH(dabit_to_arith, first, c, ra, out, mask)
}

void ppa_first_level_operands(bool first, std::span<const Word> d,
                              std::span<Word> left, std::span<Word> right,
                              Word mask) {
  SKYSHARE_DISPATCH(ppa_first_level_operands, first, d, left, right, mask)
}

void ppa_first_level_combine(bool first, std::span<const Word> d,
                             std::span<const Word> z, std::span<Word> g,
                             std::span<Word> p, Word mask) {
  SKYSHARE_DISPATCH(ppa_first_level_combine, first, d, z, g, p, mask)
}

void ppa_level_operands(std::span<const Word> g, std::span<const Word> p,
                        unsigned shift, bool with_propagate,
                        std::span<Word> left, std::span<Word> right,
                        Word mask) {
  SKYSHARE_DISPATCH(ppa_level_operands, g, p, shift, with_propagate, left,
                    right, mask)
}

#undef SKYSHARE_DISPATCH

}  // namespace dispatch
}  // namespace skyshare::kernels
