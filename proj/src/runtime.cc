#include "skyshare/runtime.h"

#include "skyshare/errors.h"
#include "skyshare/sharing.h"

namespace skyshare {

namespace {

constexpr std::uint64_t kDealerStream = 1;
constexpr std::uint64_t kDatabaseStream = 2;
constexpr std::uint64_t kQueryStream = 3;
constexpr std::uint64_t kPartyStream = 10;

Word effective_vmax(const LocalRunOptions& opts) {
  return opts.vmax != 0 ? opts.vmax : default_vmax(opts.ring);
}

}  // namespace

const char* to_string(Transport t) {
  return t == Transport::kInProcess ? "in-process" : "tcp";
}

namespace detail {

std::pair<std::unique_ptr<Channel>, std::unique_ptr<Channel>> make_channels(
    const LocalRunOptions& opts) {
  if (opts.transport == Transport::kTcp) {
    return make_tcp_loopback_pair(opts.latency);
  }
  return make_in_process_pair(opts.latency);
}

LocalRandomness::LocalRandomness(const LocalRunOptions& opts) {
  if (opts.pool1 && opts.pool2) {
    cursors_[0] = std::make_unique<PoolCursor>(opts.pool1);
    cursors_[1] = std::make_unique<PoolCursor>(opts.pool2);
  } else {
    dealer_ = std::make_unique<TrustedDealer>(
        opts.ring, effective_vmax(opts), derive_seed(opts.seed, kDealerStream));
  }
}

CorrelatedSource& LocalRandomness::source(PartyId p) {
  if (dealer_) return dealer_->source(p);
  return *cursors_[index_of(p)];
}

Seed party_seed(const LocalRunOptions& opts, PartyId p) {
  return derive_seed(opts.seed, kPartyStream + static_cast<std::uint64_t>(p));
}

void rethrow_root_cause(std::exception_ptr a, std::exception_ptr b) {
  std::exception_ptr fallback;
  for (const auto& e : {a, b}) {
    if (!e) continue;
    try {
      std::rethrow_exception(e);
    } catch (const ChannelError&) {
      if (!fallback) fallback = e;
    } catch (...) {
      throw;
    }
  }
  if (fallback) std::rethrow_exception(fallback);
}

}  // namespace detail

LocalQueryResult run_local_query(const PartyDatabase& first,
                                 const PartyDatabase& second, const Tuple& q,
                                 const LocalRunOptions& opts) {
  if (first.ring != opts.ring || second.ring != opts.ring) {
    throw InvalidArgument("share ring width differs from the session ring");
  }
  if (q.size() != first.m) throw InvalidArgument("query dimension mismatch");
  std::vector<Word> plain_q;
  for (auto v : q) plain_q.push_back(opts.ring.encode(static_cast<std::int64_t>(v)));
  Prg qprg(derive_seed(opts.seed, kQueryStream));
  auto [q1, q2] = share_arith_vec(plain_q, opts.ring, qprg);

  struct PartyOut {
    ResultShares shares;
    PartyRun run;
    QueryTrace trace;
  };
  auto outs = run_two_party(opts, [&](PartyContext& ctx) {
    PartyOut out;
    const PartyDatabase& db = ctx.first() ? first : second;
    const std::vector<Word>& my_q = ctx.first() ? q1 : q2;
    out.shares = run_query(ctx, db, my_q, opts.trace ? &out.trace : nullptr);
    out.run.metrics = ctx.metrics();
    out.run.transcript = ctx.transcript();
    out.run.consumed = ctx.randomness().consumed();
    return out;
  });

  LocalQueryResult result;
  result.rows = reconstruct_result(outs.first.shares, outs.second.shares, opts.ring);
  result.shares[0] = std::move(outs.first.shares);
  result.shares[1] = std::move(outs.second.shares);
  result.party[0] = std::move(outs.first.run);
  result.party[1] = std::move(outs.second.run);
  result.trace[0] = std::move(outs.first.trace);
  result.trace[1] = std::move(outs.second.trace);
  return result;
}

LocalQueryResult run_local_query(const PlainDatabase& db, const Tuple& q,
                                 const LocalRunOptions& opts) {
  check_domain(opts.ring, effective_vmax(opts), db.m, db.bound);
  check_query(effective_vmax(opts), q);
  Prg prg(derive_seed(opts.seed, kDatabaseStream));
  auto [a, b] = share_database(db, opts.ring, prg);
  return run_local_query(a, b, q, opts);
}

}  // namespace skyshare
