#include <gtest/gtest.h>

#include <random>

#include "skyshare/dataset.h"
#include "skyshare/gadgets.h"
#include "skyshare/runtime.h"
#include "test_util.h"

namespace skyshare {
namespace {

class Transcript : public ::testing::TestWithParam<MultiBaMode> {};

TEST_P(Transcript, OnlyTheStopBitIsOpened) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 8; ++trial) {
    const auto db = testing::random_database(rng, 2 + rng() % 30, 1 + rng() % 4, 100, 3);
    const Tuple q = random_query(rng, db.m, 100);
    auto opts = testing::options(64, trial);
    opts.mode = GetParam();
    opts.record_values = true;
    const auto r = run_local_query(db, q, opts);
    const std::uint64_t k = r.rows.size();
    for (const auto& p : r.party) {
      std::vector<Word> stops;
      for (const auto& e : p.transcript) {
        switch (e.tag) {
          case OpenTag::kStopBit:
            ASSERT_EQ(e.words, 1u);
            EXPECT_EQ(e.masks, 0u);
            stops.push_back(e.values.at(0));
            break;
          case OpenTag::kTwoMessage:
            // Only present when the one-round select was asked for.
            EXPECT_EQ(GetParam(), MultiBaMode::kTwoMessage);
            break;
          default:
            EXPECT_GE(e.masks, e.words) << to_string(e.tag);
        }
      }
      EXPECT_EQ(stops.size(), k + 1);
    }
    // The opened bits read 0 for every fetched tuple and 1 at the end.
    std::vector<unsigned> opened;
    std::size_t at = 0;
    for (const auto& e : r.party[0].transcript) {
      if (e.tag != OpenTag::kStopBit) continue;
      // Party 1 received party 2's share; find party 2's matching entry.
      while (r.party[1].transcript[at].tag != OpenTag::kStopBit) ++at;
      opened.push_back(static_cast<unsigned>((e.values[0] ^ r.party[1].transcript[at].values[0]) & 1));
      ++at;
    }
    std::vector<unsigned> want(k, 0);
    want.push_back(1);
    EXPECT_EQ(opened, want);
  }
}

INSTANTIATE_TEST_SUITE_P(Modes, Transcript,
                         ::testing::Values(MultiBaMode::kDaBit, MultiBaMode::kTwoMessage));

TEST(Transcript, ShapeIsDataIndependent) {
  // Two databases of the same shape with the same k produce identical
  // transcripts up to the masked values.
  const auto a = PlainDatabase::from_rows({{1, 9}, {9, 1}, {5, 5}});
  const auto b = PlainDatabase::from_rows({{2, 2}, {1, 4}, {4, 1}});
  const auto ra = run_local_query(a, {0, 0}, testing::options(64, 1));
  const auto rb = run_local_query(b, {0, 0}, testing::options(64, 2));
  ASSERT_EQ(ra.rows.size(), rb.rows.size());
  const auto& ta = ra.party[0].transcript;
  const auto& tb = rb.party[0].transcript;
  ASSERT_EQ(ta.size(), tb.size());
  for (std::size_t i = 0; i < ta.size(); ++i) {
    EXPECT_EQ(ta[i].tag, tb[i].tag);
    EXPECT_EQ(ta[i].words, tb[i].words);
    EXPECT_EQ(ta[i].masks, tb[i].masks);
  }
}

// Runs one Beaver batch over hand-built triples and returns the opened
// (e, f) pairs.
template <typename Body>
std::vector<std::pair<Word, Word>> opened_pairs(PartyPool p1, PartyPool p2, unsigned l,
                                                Body body, bool xor_open) {
  auto opts = testing::options(l);
  opts.record_values = true;
  opts.pool1 = std::make_shared<PartyPool>(std::move(p1));
  opts.pool2 = std::make_shared<PartyPool>(std::move(p2));
  auto run = run_two_party(opts, [&](PartyContext& ctx) {
    body(ctx);
    return ctx.transcript();
  });
  const Ring ring(l);
  const auto& r1 = run.first.at(0).values;
  const auto& r2 = run.second.at(0).values;
  const std::size_t total = r1.size() / 2;
  std::vector<std::pair<Word, Word>> out;
  for (std::size_t i = 0; i < total; ++i) {
    if (xor_open) {
      out.emplace_back(r1[i] ^ r2[i], r1[total + i] ^ r2[total + i]);
    } else {
      out.emplace_back(ring.add(r1[i], r2[i]), ring.add(r1[total + i], r2[total + i]));
    }
  }
  return out;
}

TEST(BeaverOpenings, ArithmeticUniformAtFourBits) {
  // For every input (x, y) and every (u, v) the dealer can pick, (e, f)
  // covers Z_16^2 exactly once.
  const Ring ring(4);
  Prg prg(derive_seed(2, 2));
  PartyPool p1, p2;
  p1.ring = p2.ring = ring;
  p2.party = PartyId::kSecond;
  std::vector<Word> xs, ys;
  for (Word x = 0; x < 16; ++x) {
    for (Word y = 0; y < 16; ++y) {
      for (Word u = 0; u < 16; ++u) {
        for (Word v = 0; v < 16; ++v) {
          xs.push_back(x);
          ys.push_back(y);
          const auto t = make_arith_triple(ring, u, v, prg.next(ring), prg.next(ring),
                                           prg.next(ring));
          p1.arith.u.push_back(t.u1);
          p1.arith.v.push_back(t.v1);
          p1.arith.w.push_back(t.w1);
          p2.arith.u.push_back(t.u2);
          p2.arith.v.push_back(t.v2);
          p2.arith.w.push_back(t.w2);
        }
      }
    }
  }
  auto [x1, x2] = share_arith_vec(xs, ring, prg);
  auto [y1, y2] = share_arith_vec(ys, ring, prg);
  const auto ef = opened_pairs(
      std::move(p1), std::move(p2), 4,
      [&](PartyContext& ctx) {
        ctx.first() ? mul_beaver(ctx, x1, y1) : mul_beaver(ctx, x2, y2);
      },
      false);
  ASSERT_EQ(ef.size(), 65536u);
  for (std::size_t block = 0; block < 256; ++block) {
    std::vector<int> hits(256, 0);
    for (std::size_t j = 0; j < 256; ++j) {
      const auto [e, f] = ef[block * 256 + j];
      ++hits[e * 16 + f];
    }
    for (int h : hits) ASSERT_EQ(h, 1) << "input block " << block;
  }
}

TEST(BeaverOpenings, BinaryUniformAtFourBits) {
  const Ring ring(4);
  Prg prg(derive_seed(3, 3));
  PartyPool p1, p2;
  p1.ring = p2.ring = ring;
  p2.party = PartyId::kSecond;
  std::vector<Word> x1, x2, y1, y2, xs, ys;
  for (Word x = 0; x < 16; ++x) {
    for (Word y = 0; y < 16; ++y) {
      for (Word u = 0; u < 16; ++u) {
        for (Word v = 0; v < 16; ++v) {
          xs.push_back(x);
          ys.push_back(y);
          const Word u1 = prg.next(ring), v1 = prg.next(ring), w1 = prg.next(ring);
          p1.binary.u.push_back(u1);
          p1.binary.v.push_back(v1);
          p1.binary.w.push_back(w1);
          p2.binary.u.push_back(u ^ u1);
          p2.binary.v.push_back(v ^ v1);
          p2.binary.w.push_back((u & v) ^ w1);
          const Word xa = prg.next(ring), ya = prg.next(ring);
          x1.push_back(xa);
          x2.push_back(x ^ xa);
          y1.push_back(ya);
          y2.push_back(y ^ ya);
        }
      }
    }
  }
  std::vector<Word> z1, z2;
  const auto ef = opened_pairs(
      std::move(p1), std::move(p2), 4,
      [&](PartyContext& ctx) {
        if (ctx.first()) {
          z1 = and_words(ctx, x1, y1);
        } else {
          z2 = and_words(ctx, x2, y2);
        }
      },
      true);
  for (std::size_t i = 0; i < xs.size(); ++i) ASSERT_EQ(z1[i] ^ z2[i], xs[i] & ys[i]);
  for (std::size_t block = 0; block < 256; ++block) {
    std::vector<int> hits(256, 0);
    for (std::size_t j = 0; j < 256; ++j) {
      const auto [e, f] = ef[block * 256 + j];
      ++hits[e * 16 + f];
    }
    for (int h : hits) ASSERT_EQ(h, 1) << "input block " << block;
  }
}

TEST(TwoMessageMode, DifferenceExposesTheSenderShare) {
  // The documented cost of the one-round select: m1 - m0 = (1 - 2 x_i) y_i,
  // so the receiver learns the sender's bit share whenever y_i != 0.
  const Ring ring(16);
  Prg prg(derive_seed(4, 4));
  const std::vector<unsigned> bits{1, 0, 1, 1};
  const std::vector<Word> y{7, 7, 7, 7};
  auto [b1, b2] = share_bits(BitVec::from_bits(bits, 16), prg);
  auto [y1, y2] = share_arith_vec(y, ring, prg);
  auto opts = testing::options(16);
  opts.mode = MultiBaMode::kTwoMessage;
  opts.record_values = true;
  auto run = run_two_party(opts, [&](PartyContext& ctx) {
    ctx.first() ? multi_ba(ctx, b1, y1, 1) : multi_ba(ctx, b2, y2, 1);
    return ctx.transcript();
  });
  const auto& got = run.first.at(0);
  EXPECT_EQ(got.tag, OpenTag::kTwoMessage);
  EXPECT_EQ(got.masks, 0u);
  const std::size_t n = bits.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Word diff = ring.sub(got.values[n + i], got.values[i]);
    const Word x2 = b2.get(i);
    EXPECT_EQ(diff, ring.mul(ring.sub(1, 2 * x2), y2[i]));
  }
}

}  // namespace
}  // namespace skyshare
