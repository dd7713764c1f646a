#pragma once

// Online building blocks over one party's shares: secure MSB extraction,
// bit-times-value products, oblivious selection and the tree minimum.
// Every gadget is vectorized and sends one flight per round.

#include <cstdint>
#include <span>
#include <vector>

#include "skyshare/bitvec.h"
#include "skyshare/party.h"
#include "skyshare/ring.h"

namespace skyshare {

// Shape of the bitsliced carry circuit used by sec_ext at width l.
//
// Level 0 forms span-2 (generate, propagate) words directly from the two
// parties' bits with five word ANDs. Each further level doubles the span:
// G ^= P & (G << s), P &= P << s. The last level skips P.
struct PpaPlan {
  unsigned width = 0;
  unsigned extra_levels = 0;
  // AND rounds: 1 + extra_levels.
  unsigned rounds = 0;
  // Binary triples (l-bit words) consumed per compared element.
  unsigned and_words = 0;

  static PpaPlan for_width(unsigned l);
};

// [msb(a - b)] for every element, i.e. [a < b] when a, b and a - b all fit
// the signed range. Counted as a.size() invocations.
BitVec sec_ext(PartyContext& ctx, std::span<const Word> a,
               std::span<const Word> b);

// XOR-shared bits to additive shares of the same bits (one daBit each).
std::vector<Word> b2a(PartyContext& ctx, const BitVec& x);

// [x_i * y_i] for a row-major y with `width` values per bit.
std::vector<Word> multi_ba(PartyContext& ctx, const BitVec& x,
                           std::span<const Word> y, std::size_t width);

// Row i of the result is u's row i when phi_i = 1, else v's row i.
std::vector<Word> obliv_select(PartyContext& ctx, const BitVec& phi,
                               std::span<const Word> u,
                               std::span<const Word> v, std::size_t width);

struct MinResult {
  Word key = 0;
  // The winning row of the payload matrix.
  std::vector<Word> row;
};

// Minimum key and its payload row by a pairwise tournament. Within a pair
// the right element wins only if strictly smaller, so among equal keys the
// lowest index survives. ceil(log2 n) comparison levels.
MinResult obliv_min_with_payload(PartyContext& ctx, std::span<const Word> keys,
                                 std::span<const Word> payload,
                                 std::size_t width);

// [x OR y] = x ^ y ^ (x & y), one AND round.
BitVec or_bits(PartyContext& ctx, const BitVec& x, const BitVec& y);

// Bit i is 1 iff x_i = 1 and x_j = 0 for every j < i.
// Sequential form: one dependent AND round per element.
BitVec first_set_sequential(PartyContext& ctx, const BitVec& x);
// Prefix form: ceil(log2 n) OR rounds plus one AND round.
BitVec first_set_prefix(PartyContext& ctx, const BitVec& x);

// Reveals shared bits to both parties (tagged as the stop bit, since that is
// the only bit the query protocol ever opens).
std::vector<unsigned> open_bits(PartyContext& ctx, const BitVec& x);

}  // namespace skyshare
