#include <gtest/gtest.h>

#include <random>

#include "skyshare/errors.h"
#include "skyshare/runtime.h"
#include "skyshare/sharing.h"
#include "test_util.h"

namespace skyshare {
namespace {

TEST(Sharing, ArithRoundTrip) {
  Prg prg(derive_seed(1, 1));
  for (unsigned l : {4u, 17u, 64u}) {
    const Ring ring(l);
    for (int i = 0; i < 200; ++i) {
      const Word x = prg.next(ring);
      auto [a, b] = share_arith(x, ring, prg);
      EXPECT_EQ(a.party, PartyId::kFirst);
      EXPECT_EQ(b.party, PartyId::kSecond);
      EXPECT_EQ(reconstruct_arith(a, b, ring), x);
      EXPECT_EQ(reconstruct_arith(b, a, ring), x);
    }
  }
}

TEST(Sharing, ReconstructRejectsOneSidedPairs) {
  const Ring ring(8);
  EXPECT_THROW(reconstruct_arith({PartyId::kFirst, 1}, {PartyId::kFirst, 2}, ring),
               InvalidArgument);
  EXPECT_THROW(reconstruct_bin({PartyId::kSecond, 1}, {PartyId::kSecond, 0}),
               InvalidArgument);
  EXPECT_THROW(party_from_int(3), InvalidArgument);
}

TEST(Sharing, SharesAreUniformAndInputIndependentAtFourBits) {
  const Ring ring(4);
  Prg prg(derive_seed(2, 2));
  const int draws = 32000;
  for (Word x : {Word{0}, Word{7}, Word{15}}) {
    std::vector<int> first(16, 0), second(16, 0);
    for (int i = 0; i < draws; ++i) {
      auto [a, b] = share_arith(x, ring, prg);
      ++first[a.value];
      ++second[b.value];
    }
    // Expected 2000 per bucket; 6 sigma is about 260.
    for (int v = 0; v < 16; ++v) {
      EXPECT_NEAR(first[v], draws / 16, 260) << "x=" << x << " v=" << v;
      EXPECT_NEAR(second[v], draws / 16, 260) << "x=" << x << " v=" << v;
    }
  }
}

TEST(Sharing, BitVectorsKeepPaddingClear) {
  Prg prg(derive_seed(3, 3));
  std::vector<unsigned> bits(70);
  for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = (i * 7) % 3 == 0;
  const BitVec plain = BitVec::from_bits(bits, 16);
  auto [a, b] = share_bits(plain, prg);
  EXPECT_EQ(a.words().size(), 5u);
  EXPECT_EQ(a.words().back() & ~a.valid_mask(4), 0u);
  EXPECT_EQ(b.words().back() & ~b.valid_mask(4), 0u);
  EXPECT_EQ(reconstruct_bits(a, b), plain);
  const BitVec n1 = not_bits(a, PartyId::kFirst);
  const BitVec n2 = not_bits(b, PartyId::kSecond);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    EXPECT_EQ(reconstruct_bits(n1, n2).get(i), 1 - bits[i]);
  }
}

TEST(Sharing, LocalOperationsAreLinear) {
  const Ring ring(32);
  Prg prg(derive_seed(4, 4));
  std::vector<Word> x(50), y(50);
  prg.fill(x, ring);
  prg.fill(y, ring);
  auto [x1, x2] = share_arith_vec(x, ring, prg);
  auto [y1, y2] = share_arith_vec(y, ring, prg);
  const auto sum = reconstruct_arith_vec(add_shares(x1, y1, ring), add_shares(x2, y2, ring), ring);
  const auto diff = reconstruct_arith_vec(sub_shares(x1, y1, ring), sub_shares(x2, y2, ring), ring);
  const auto scaled = reconstruct_arith_vec(scale_shares(x1, 9, ring), scale_shares(x2, 9, ring), ring);
  const auto plus = reconstruct_arith_vec(add_public(x1, 5, PartyId::kFirst, ring),
                                          add_public(x2, 5, PartyId::kSecond, ring), ring);
  for (std::size_t i = 0; i < x.size(); ++i) {
    EXPECT_EQ(sum[i], ring.add(x[i], y[i]));
    EXPECT_EQ(diff[i], ring.sub(x[i], y[i]));
    EXPECT_EQ(scaled[i], ring.mul(x[i], 9));
    EXPECT_EQ(plus[i], ring.add(x[i], 5));
  }
}

TEST(Beaver, ArithmeticProducts) {
  for (unsigned l : {8u, 64u}) {
    const Ring ring(l);
    Prg prg(derive_seed(5, l));
    std::vector<Word> x(300), y(300);
    prg.fill(x, ring);
    prg.fill(y, ring);
    auto [x1, x2] = share_arith_vec(x, ring, prg);
    auto [y1, y2] = share_arith_vec(y, ring, prg);
    auto out = run_two_party(testing::options(l), [&](PartyContext& ctx) {
      return ctx.first() ? mul_beaver(ctx, x1, y1) : mul_beaver(ctx, x2, y2);
    });
    const auto z = reconstruct_arith_vec(out.first, out.second, ring);
    for (std::size_t i = 0; i < x.size(); ++i) EXPECT_EQ(z[i], ring.mul(x[i], y[i]));
  }
}

TEST(Beaver, AndTruthTableUnderManySplits) {
  Prg prg(derive_seed(6, 6));
  std::vector<unsigned> xs, ys;
  for (int rep = 0; rep < 100; ++rep) {
    for (unsigned x = 0; x < 2; ++x) {
      for (unsigned y = 0; y < 2; ++y) {
        xs.push_back(x);
        ys.push_back(y);
      }
    }
  }
  auto [x1, x2] = share_bits(BitVec::from_bits(xs, 64), prg);
  auto [y1, y2] = share_bits(BitVec::from_bits(ys, 64), prg);
  auto out = run_two_party(testing::options(), [&](PartyContext& ctx) {
    return ctx.first() ? and_beaver(ctx, x1, y1) : and_beaver(ctx, x2, y2);
  });
  const auto z = reconstruct_bits(out.first, out.second);
  for (std::size_t i = 0; i < xs.size(); ++i) EXPECT_EQ(z.get(i), xs[i] & ys[i]);
}

TEST(Beaver, WordAnd) {
  const Ring ring(20);
  Prg prg(derive_seed(7, 7));
  std::vector<Word> x(64), y(64), x1(64), y1(64), x2(64), y2(64);
  prg.fill(x, ring);
  prg.fill(y, ring);
  prg.fill(x1, ring);
  prg.fill(y1, ring);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x2[i] = x[i] ^ x1[i];
    y2[i] = y[i] ^ y1[i];
  }
  auto out = run_two_party(testing::options(20), [&](PartyContext& ctx) {
    return ctx.first() ? and_words(ctx, x1, y1) : and_words(ctx, x2, y2);
  });
  for (std::size_t i = 0; i < x.size(); ++i) {
    EXPECT_EQ(out.first[i] ^ out.second[i], x[i] & y[i]);
  }
}

TEST(Beaver, RejectsMismatchedLengths) {
  const std::vector<Word> a(3), b(4);
  EXPECT_THROW(run_two_party(testing::options(), [&](PartyContext& ctx) {
                 return mul_beaver(ctx, a, b);
               }),
               InvalidArgument);
}

}  // namespace
}  // namespace skyshare
