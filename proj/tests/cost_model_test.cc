#include <gtest/gtest.h>

#include <random>

#include "skyshare/cost_model.h"
#include "skyshare/dataset.h"
#include "skyshare/errors.h"
#include "skyshare/gadgets.h"
#include "skyshare/runtime.h"
#include "test_util.h"

namespace skyshare {
namespace {

TEST(SecextCount, ClosedForm) {
  // n=4, m=2, k=2: 4*2 + 2*4*(2+2) + 4.
  EXPECT_EQ(secext_count(4, 2, 2), 44u);
  EXPECT_EQ(secext_count(1, 1, 1), 1u + 3u + 1u);
  EXPECT_EQ(secext_count(1000, 6, 0), 7000u);
}

TEST(PredictRounds, WorkedExample) {
  const Ring ring(64);
  const RoundBreakdown r = predict_rounds(4, 2, ring, 2);
  EXPECT_EQ(r.ext_rounds, 6u);
  EXPECT_EQ(r.select_rounds, 2u);
  EXPECT_EQ(r.min_levels, 2u);
  EXPECT_EQ(r.flag_rounds, 3u);
  // map 8, three fetches of 2*8+6+1 = 23, two filters of 6+3+2 = 11.
  EXPECT_EQ(r.total, 8u + 3 * 23 + 2 * 11);
  EXPECT_EQ(predict_query_cost(4, 2, ring, 2).rounds, r.total);
  EXPECT_EQ(predict_rounds(4, 2, ring, 2, MultiBaMode::kTwoMessage).total,
            7u + 3 * 21 + 2 * 10);
}

TEST(PredictCost, WorkedExampleBytes) {
  const Ring ring(64);
  const QueryCost c = predict_query_cost(4, 2, ring, 2);
  EXPECT_EQ(c.secext, 44u);
  // At least the comparison traffic: 14 AND words per SecExt, both halves.
  EXPECT_GT(c.bytes, 2u * 14 * 44 * 8);
  EXPECT_EQ(c.randomness.sentinels, 1u);
}

TEST(PredictCost, MonotoneInNAndM) {
  const Ring ring(64);
  for (std::uint64_t m = 1; m < 6; ++m) {
    EXPECT_LT(predict_query_cost(100, m, ring, 5).bytes,
              predict_query_cost(100, m + 1, ring, 5).bytes);
  }
  for (std::uint64_t n = 10; n < 200; n += 10) {
    EXPECT_LE(predict_query_cost(n, 2, ring, 5).bytes,
              predict_query_cost(n + 10, 2, ring, 5).bytes);
  }
}

TEST(PredictCost, MatchesMeterAcrossShapes) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 16; ++trial) {
    const unsigned l = trial % 2 ? 64 : 24;
    const MultiBaMode mode = trial % 4 < 2 ? MultiBaMode::kDaBit : MultiBaMode::kTwoMessage;
    const Ring ring(l);
    const std::size_t n = 1 + rng() % 40, m = 1 + rng() % 5;
    const auto db = testing::random_database(rng, n, m, 200, 4);
    const Tuple q = random_query(rng, m, 200);
    auto opts = testing::options(l, trial);
    opts.mode = mode;
    const auto r = run_local_query(db, q, opts);
    const QueryCost want = predict_query_cost(n, m, ring, r.rows.size(), mode);
    for (const auto& p : r.party) {
      EXPECT_EQ(p.metrics.rounds, want.rounds) << trial;
      EXPECT_EQ(p.metrics.bytes_tx, want.bytes) << trial;
      EXPECT_EQ(p.metrics.bytes_rx, want.bytes) << trial;
      EXPECT_EQ(p.metrics.secext, want.secext) << trial;
      EXPECT_EQ(p.consumed, want.randomness) << trial;
    }
  }
}

TEST(Budget, CoversEveryK) {
  const Ring ring(64);
  const PoolCounts budget = budget_for_query(50, 3, ring, 50);
  for (std::uint64_t k = 0; k <= 50; ++k) {
    EXPECT_TRUE(budget.covers(predict_query_cost(50, 3, ring, k).randomness)) << k;
  }
  EXPECT_EQ(budget, predict_query_cost(50, 3, ring, 50).randomness);
  EXPECT_THROW(budget_for_query(50, 3, ring, 0), InvalidArgument);
  // Two-message selects need no daBits or arithmetic triples at all.
  const PoolCounts two = budget_for_query(50, 3, ring, 50, MultiBaMode::kTwoMessage);
  EXPECT_EQ(two.dabits, 0u);
  EXPECT_EQ(two.arith_triples, 0u);
}

TEST(Meter, ReportAndCsv) {
  SessionMetrics m;
  EXPECT_THROW(meter_report(m), InvalidArgument);
  m.session = 3;
  m.n = 4;
  m.m = 2;
  m.k = 2;
  m.rounds = 99;
  m.bytes_tx = m.bytes_rx = 1000;
  m.secext = 44;
  m.wall_ms = 1.5;
  m.complete = true;
  const std::string report = meter_report(m);
  EXPECT_NE(report.find("secext = 44\n"), std::string::npos);
  EXPECT_NE(report.find("rounds = 99\n"), std::string::npos);
  EXPECT_EQ(metrics_csv_header(), "session,n,m,k,rounds,bytes_tx,bytes_rx,secext,wall_ms");
  EXPECT_EQ(metrics_csv_row(m).rfind("3,4,2,2,99,1000,1000,44,", 0), 0u);
}

TEST(Meter, ZeroLengthSessionIsAnError) {
  // A session that opened nothing has no metrics to report.
  auto out = run_two_party(testing::options(), [](PartyContext& ctx) {
    ctx.metrics().complete = true;
    return ctx.metrics();
  });
  EXPECT_THROW(meter_report(out.first), InvalidArgument);
}

}  // namespace
}  // namespace skyshare
