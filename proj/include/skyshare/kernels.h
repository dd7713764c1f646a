#pragma once

// Element-wise share kernels used by every online gadget.
//
// Two implementations with identical semantics: a serial reference kept for
// testing, and an OpenMP version used at runtime. `dispatch()` picks one
// according to the process-wide backend setting.

#include <cstddef>
#include <span>

#include "skyshare/ring.h"

namespace skyshare::kernels {

enum class Backend { kSerial, kOpenMP };

void set_backend(Backend b);
Backend backend();

#define SKYSHARE_KERNEL_DECLS                                                \
  /* out = (x - u) mod 2^l */                                                \
  void arith_mask(std::span<const Word> x, std::span<const Word> u,          \
                  std::span<Word> out, Word mask);                           \
  /* out = (a + b) mod 2^l */                                                \
  void arith_add(std::span<const Word> a, std::span<const Word> b,           \
                 std::span<Word> out, Word mask);                            \
  /* z = [first] e*f + e*v + f*u + w */                                      \
  void arith_beaver_combine(bool first, std::span<const Word> e,             \
                            std::span<const Word> f, std::span<const Word> u, \
                            std::span<const Word> v, std::span<const Word> w, \
                            std::span<Word> out, Word mask);                 \
  /* out = a ^ b */                                                          \
  void bin_xor(std::span<const Word> a, std::span<const Word> b,             \
               std::span<Word> out);                                         \
  /* z = [first] e&f ^ e&v ^ f&u ^ w */                                      \
  void bin_beaver_combine(bool first, std::span<const Word> e,               \
                          std::span<const Word> f, std::span<const Word> u,  \
                          std::span<const Word> v, std::span<const Word> w,  \
                          std::span<Word> out);                              \
  /* [c]A from public bit c and daBit rA: [first] c + rA - 2 c rA */         \
  void dabit_to_arith(bool first, std::span<const Word> c,                   \
                      std::span<const Word> ra, std::span<Word> out,         \
                      Word mask);                                            \
  /* Operands of the fused first adder level, five ANDs per element laid  */ \
  /* out as [a&b, A2&(b<<1), (a<<1)&B2, a&(b<<1), (a<<1)&b] blocks.       */ \
  void ppa_first_level_operands(bool first, std::span<const Word> d,         \
                                std::span<Word> left, std::span<Word> right, \
                                Word mask);                                  \
  /* Combine the five products into span-2 generate/propagate words. */      \
  void ppa_first_level_combine(bool first, std::span<const Word> d,          \
                               std::span<const Word> z, std::span<Word> g,   \
                               std::span<Word> p, Word mask);                \
  /* Operands of one Kogge-Stone level: left=[P | P], right=[G<<s | P<<s] */ \
  void ppa_level_operands(std::span<const Word> g, std::span<const Word> p,  \
                          unsigned shift, bool with_propagate,               \
                          std::span<Word> left, std::span<Word> right,       \
                          Word mask);

namespace serial {
SKYSHARE_KERNEL_DECLS
}  // namespace serial

namespace omp {
SKYSHARE_KERNEL_DECLS
}  // namespace omp

namespace dispatch {
SKYSHARE_KERNEL_DECLS
}  // namespace dispatch

#undef SKYSHARE_KERNEL_DECLS

}  // namespace skyshare::kernels
