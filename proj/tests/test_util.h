#pragma once

#include <random>
#include <vector>

#include "skyshare/bitvec.h"
#include "skyshare/dataset.h"
#include "skyshare/plaintext.h"
#include "skyshare/ring.h"
#include "skyshare/runtime.h"
#include "skyshare/sharing.h"

namespace skyshare::testing {

// The four-tuple running example and its query.
inline PlainDatabase example_database() {
  return PlainDatabase::from_rows({{15, 102}, {14, 97}, {20, 99}, {19, 101}});
}
inline Tuple example_query() { return {16, 100}; }

inline std::vector<Word> open_words(const std::vector<Word>& a,
                                    const std::vector<Word>& b,
                                    const Ring& ring) {
  return reconstruct_arith_vec(a, b, ring);
}

inline std::vector<unsigned> open_bits_plain(const BitVec& a, const BitVec& b) {
  return reconstruct_bits(a, b).to_bits();
}

// Random n x m database with values in [0, bound]; `dup_every` > 0 copies
// an earlier row into every such slot so duplicates appear.
inline PlainDatabase random_database(std::mt19937_64& rng, std::size_t n,
                                     std::size_t m, std::uint64_t bound,
                                     std::size_t dup_every = 0) {
  PlainDatabase db;
  db.n = n;
  db.m = m;
  db.bound = bound;
  db.values.resize(n * m);
  for (std::size_t i = 0; i < n; ++i) {
    if (dup_every > 0 && i > 0 && i % dup_every == 0) {
      const std::size_t src = rng() % i;
      for (std::size_t j = 0; j < m; ++j) db.values[i * m + j] = db.values[src * m + j];
      continue;
    }
    for (std::size_t j = 0; j < m; ++j) db.values[i * m + j] = rng() % (bound + 1);
  }
  return db;
}

inline LocalRunOptions options(unsigned l = 64, std::uint64_t seed = 1) {
  LocalRunOptions o;
  o.ring = Ring(l);
  o.seed = seed;
  return o;
}

}  // namespace skyshare::testing
