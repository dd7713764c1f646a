#include <gtest/gtest.h>

#include <random>

#include "skyshare/errors.h"
#include "skyshare/ring.h"

namespace skyshare {
namespace {

TEST(Ring, RejectsWidthsOutsideRange) {
  EXPECT_THROW(Ring(1), InvalidArgument);
  EXPECT_THROW(Ring(65), InvalidArgument);
  EXPECT_NO_THROW(Ring(2));
  EXPECT_NO_THROW(Ring(64));
}

TEST(Ring, MaskAndWordBytes) {
  EXPECT_EQ(Ring(64).mask(), ~Word{0});
  EXPECT_EQ(Ring(8).mask(), 0xffu);
  EXPECT_EQ(Ring(13).mask(), 0x1fffu);
  EXPECT_EQ(Ring(8).word_bytes(), 1u);
  EXPECT_EQ(Ring(9).word_bytes(), 2u);
  EXPECT_EQ(Ring(64).word_bytes(), 8u);
}

TEST(Ring, MsbMatchesSignExhaustivelyAtEightBits) {
  const Ring ring(8);
  for (Word x = 0; x < 256; ++x) {
    EXPECT_EQ(ring.msb(x), ring.decode(x) < 0 ? 1u : 0u) << x;
  }
}

TEST(Ring, MsbOfDifferenceIsLessThanInsideTheWindow) {
  // Both operands below 2^(l-2): a - b never wraps, so msb(a - b) = [a < b].
  const Ring ring(8);
  for (Word a = 0; a < 64; ++a) {
    for (Word b = 0; b < 64; ++b) {
      EXPECT_EQ(ring.msb(ring.sub(a, b)), a < b ? 1u : 0u);
    }
  }
}

TEST(Ring, EncodeDecodeRoundTrip) {
  const Ring ring(8);
  for (std::int64_t v = -127; v <= 127; ++v) {
    EXPECT_EQ(ring.decode(ring.encode(v)), v);
  }
  EXPECT_THROW(ring.encode(128), InvalidArgument);
  EXPECT_THROW(ring.encode(-128), InvalidArgument);
  const Ring wide(64);
  EXPECT_EQ(wide.decode(wide.encode(-5)), -5);
  EXPECT_EQ(wide.encode(-1), ~Word{0});
}

TEST(Ring, ArithmeticWrapsModuloTwoToTheL) {
  std::mt19937_64 rng(1);
  for (unsigned l : {2u, 4u, 13u, 32u, 63u, 64u}) {
    const Ring ring(l);
    for (int i = 0; i < 1000; ++i) {
      const Word a = ring.reduce(rng()), b = ring.reduce(rng());
      EXPECT_EQ(ring.add(a, b), (a + b) & ring.mask());
      EXPECT_EQ(ring.sub(ring.add(a, b), b), a);
      EXPECT_EQ(ring.add(a, ring.neg(a)), 0u);
      EXPECT_EQ(ring.mul(a, b), (a * b) & ring.mask());
    }
  }
}

TEST(Ring, CeilLog2) {
  EXPECT_EQ(ceil_log2(0), 0u);
  EXPECT_EQ(ceil_log2(1), 0u);
  EXPECT_EQ(ceil_log2(2), 1u);
  EXPECT_EQ(ceil_log2(3), 2u);
  EXPECT_EQ(ceil_log2(4), 2u);
  EXPECT_EQ(ceil_log2(5), 3u);
  EXPECT_EQ(ceil_log2(200000), 18u);
  EXPECT_EQ(ceil_div(7, 3), 3u);
}

}  // namespace
}  // namespace skyshare
