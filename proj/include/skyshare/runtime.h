#pragma once

// Runs both servers inside one process: each party on its own thread, joined
// by an in-process or loopback TCP channel, with randomness from an
// on-demand dealer or from pre-dealt pools.

#include <exception>
#include <functional>
#include <memory>
#include <optional>
#include <thread>
#include <utility>

#include "skyshare/channel.h"
#include "skyshare/party.h"
#include "skyshare/plaintext.h"
#include "skyshare/randomness.h"
#include "skyshare/skyline.h"

namespace skyshare {

enum class Transport { kInProcess, kTcp };

const char* to_string(Transport t);

struct LocalRunOptions {
  Ring ring{64};
  Word vmax = 0;  // 0 means default_vmax(ring)
  Transport transport = Transport::kInProcess;
  Latency latency{0};
  std::uint64_t seed = 1;
  std::uint32_t session = 1;
  MultiBaMode mode = MultiBaMode::kDaBit;
  bool trace = false;
  bool record_values = false;
  // When both are set, each party draws from its pool instead of the
  // on-demand dealer.
  std::shared_ptr<const PartyPool> pool1, pool2;
};

struct PartyRun {
  SessionMetrics metrics;
  std::vector<TranscriptEntry> transcript;
  PoolCounts consumed;
};

// Runs `body` once per party, concurrently, and returns both results.
// If either side throws, the channel is closed so the other side unblocks,
// and the first error is rethrown.
template <typename Body>
auto run_two_party(const LocalRunOptions& opts, Body body)
    -> std::pair<decltype(body(std::declval<PartyContext&>())),
                 decltype(body(std::declval<PartyContext&>()))>;

struct LocalQueryResult {
  std::vector<Tuple> rows;
  ResultShares shares[2];
  PartyRun party[2];
  QueryTrace trace[2];
};

LocalQueryResult run_local_query(const PartyDatabase& first,
                                 const PartyDatabase& second, const Tuple& q,
                                 const LocalRunOptions& opts);
// Shares the plaintext database and query with seeds derived from opts.seed.
LocalQueryResult run_local_query(const PlainDatabase& db, const Tuple& q,
                                 const LocalRunOptions& opts);

// ---- implementation ----------------------------------------------------------

namespace detail {

std::pair<std::unique_ptr<Channel>, std::unique_ptr<Channel>> make_channels(
    const LocalRunOptions& opts);

// Owns the randomness sources for one local run.
class LocalRandomness {
 public:
  explicit LocalRandomness(const LocalRunOptions& opts);
  CorrelatedSource& source(PartyId p);

 private:
  std::unique_ptr<TrustedDealer> dealer_;
  std::unique_ptr<PoolCursor> cursors_[2];
};

Seed party_seed(const LocalRunOptions& opts, PartyId p);

// When one side fails the other usually sees only the closed channel;
// prefer the error that is not a ChannelError.
void rethrow_root_cause(std::exception_ptr a, std::exception_ptr b);

}  // namespace detail

template <typename Body>
auto run_two_party(const LocalRunOptions& opts, Body body)
    -> std::pair<decltype(body(std::declval<PartyContext&>())),
                 decltype(body(std::declval<PartyContext&>()))> {
  using R = decltype(body(std::declval<PartyContext&>()));
  auto channels = detail::make_channels(opts);
  detail::LocalRandomness rnd(opts);
  PartyOptions popts{opts.mode, true, opts.record_values};

  std::exception_ptr errors[2];
  std::optional<R> results[2];
  auto run = [&](PartyId id, Channel& ch) {
    const int idx = index_of(id);
    try {
      PartyContext ctx(id, opts.ring, ch, rnd.source(id),
                       detail::party_seed(opts, id), opts.session, popts);
      results[idx].emplace(body(ctx));
    } catch (...) {
      errors[idx] = std::current_exception();
      ch.close();
    }
  };
  std::thread second([&] { run(PartyId::kSecond, *channels.second); });
  run(PartyId::kFirst, *channels.first);
  second.join();
  detail::rethrow_root_cause(errors[0], errors[1]);
  return {std::move(*results[0]), std::move(*results[1])};
}

}  // namespace skyshare
