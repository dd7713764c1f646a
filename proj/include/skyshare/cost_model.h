#pragma once

// Closed-form cost of one query, per party. The online phase is oblivious,
// so every count depends only on (n, m, l, k, mode) and never on the data.
//
// Per gadget, with w = word_bytes(l) and A = PpaPlan::and_words:
//   sec_ext(N)            rounds R_ext        bytes 2*A*N*w      N secext
//   b2a(N)                1 round             ceil(N/l)*w        N daBits
//   mul_beaver(N)         1 round             2*N*w              N triples
//   select(N, width)      b2a(N) + mul(N*width), or one two-message
//                         flight of 4*N*width words
//   and_beaver(N bits)    1 round             2*ceil(N/l)*w
//   open stop bit         1 round             w
//
// A query runs sec_map, then k+1 fetch loops (tree min plus stop check),
// and k filter rounds between them.

#include <cstdint>

#include "skyshare/party.h"
#include "skyshare/randomness.h"
#include "skyshare/ring.h"

namespace skyshare {

struct QueryCost {
  std::uint64_t rounds = 0;
  std::uint64_t secext = 0;
  // Bytes each party sends (and, by symmetry, receives).
  std::uint64_t bytes = 0;
  PoolCounts randomness;

  friend bool operator==(const QueryCost&, const QueryCost&) = default;
};

QueryCost predict_query_cost(std::uint64_t n, std::uint64_t m, const Ring& ring,
                             std::uint64_t k,
                             MultiBaMode mode = MultiBaMode::kDaBit);

// n*m + k*n*(2+m) + n
std::uint64_t secext_count(std::uint64_t n, std::uint64_t m, std::uint64_t k);

// Round count split by source, for reporting.
struct RoundBreakdown {
  std::uint64_t ext_rounds = 0;     // R_ext, AND rounds of one sec_ext
  std::uint64_t select_rounds = 0;  // 2 with daBits, 1 with two messages
  std::uint64_t min_levels = 0;     // ceil(log2 n)
  std::uint64_t flag_rounds = 0;    // max(ceil(log2 n), ceil(log2 m)) + 1
  std::uint64_t total = 0;
};
RoundBreakdown predict_rounds(std::uint64_t n, std::uint64_t m,
                              const Ring& ring, std::uint64_t k,
                              MultiBaMode mode = MultiBaMode::kDaBit);

// Correlated randomness that covers any query returning at most k_max
// skyline tuples. Throws InvalidArgument for k_max = 0.
PoolCounts budget_for_query(std::uint64_t n, std::uint64_t m, const Ring& ring,
                            std::uint64_t k_max,
                            MultiBaMode mode = MultiBaMode::kDaBit);

}  // namespace skyshare
