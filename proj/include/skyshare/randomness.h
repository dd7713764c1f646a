#pragma once

// Correlated randomness for the online phase: arithmetic Beaver triples,
// binary (l-bit word) Beaver triples, daBits, and sharings of the sentinel
// vMAX. A trusted dealer produces both halves; each party only ever sees its
// own half, consumed strictly in order.

#include <cstdint>
#include <deque>
#include <filesystem>
#include <memory>
#include <mutex>
#include <utility>
#include <vector>

#include "skyshare/prg.h"
#include "skyshare/ring.h"
#include "skyshare/sharing.h"

namespace skyshare {

// One party's half of a batch of triples, struct-of-arrays.
struct TripleBatch {
  std::vector<Word> u, v, w;
  std::size_t size() const { return u.size(); }
  void resize(std::size_t n) {
    u.resize(n);
    v.resize(n);
    w.resize(n);
  }
};

// One party's half of a batch of daBits: rb holds the XOR share of the bit
// (0 or 1 per entry), ra the additive share of the same bit.
struct DaBitBatch {
  std::vector<Word> rb, ra;
  std::size_t size() const { return rb.size(); }
};

struct PoolCounts {
  std::uint64_t arith_triples = 0;
  std::uint64_t binary_triples = 0;
  std::uint64_t dabits = 0;
  std::uint64_t sentinels = 0;

  PoolCounts& operator+=(const PoolCounts& o) {
    arith_triples += o.arith_triples;
    binary_triples += o.binary_triples;
    dabits += o.dabits;
    sentinels += o.sentinels;
    return *this;
  }
  friend PoolCounts operator+(PoolCounts a, const PoolCounts& b) {
    return a += b;
  }
  PoolCounts operator*(std::uint64_t k) const {
    return {arith_triples * k, binary_triples * k, dabits * k, sentinels * k};
  }
  // Every count of `need` fits within this budget.
  bool covers(const PoolCounts& need) const {
    return arith_triples >= need.arith_triples &&
           binary_triples >= need.binary_triples && dabits >= need.dabits &&
           sentinels >= need.sentinels;
  }
  friend bool operator==(const PoolCounts&, const PoolCounts&) = default;
};

// What the online phase draws from. Implementations throw
// RandomnessExhausted instead of ever reusing material.
class CorrelatedSource {
 public:
  virtual ~CorrelatedSource() = default;
  virtual TripleBatch arith_triples(std::size_t count) = 0;
  virtual TripleBatch binary_triples(std::size_t count) = 0;
  virtual DaBitBatch dabits(std::size_t count) = 0;
  virtual Word sentinel() = 0;
  const PoolCounts& consumed() const { return consumed_; }

 protected:
  PoolCounts consumed_;
};

// ---- dealing -------------------------------------------------------------

std::pair<TripleBatch, TripleBatch> deal_arith_triples(const Ring& ring,
                                                       std::size_t count,
                                                       Prg& prg);
// Word-level AND triples: w = u & v bitwise on l-bit words.
std::pair<TripleBatch, TripleBatch> deal_binary_triples(const Ring& ring,
                                                        std::size_t count,
                                                        Prg& prg);
std::pair<DaBitBatch, DaBitBatch> deal_dabits(const Ring& ring,
                                              std::size_t count, Prg& prg);
std::pair<Word, Word> deal_sentinel(const Ring& ring, Word vmax, Prg& prg);

// Builds one arithmetic triple from explicit randomness; the dealer's
// triples are exactly this function applied to PRG output.
struct ArithTripleHalves {
  Word u1, v1, w1, u2, v2, w2;
};
ArithTripleHalves make_arith_triple(const Ring& ring, Word u, Word v, Word u1,
                                    Word v1, Word w1);

// ---- pre-dealt pools -----------------------------------------------------

// Immutable per-party storage, in consumption order.
struct PartyPool {
  Ring ring{64};
  PartyId party = PartyId::kFirst;
  TripleBatch arith;
  TripleBatch binary;
  DaBitBatch dabits;
  std::vector<Word> sentinels;

  PoolCounts counts() const {
    return {arith.size(), binary.size(), dabits.size(), sentinels.size()};
  }
};

std::pair<PartyPool, PartyPool> deal_pools(const Ring& ring, Word vmax,
                                           const PoolCounts& counts,
                                           Prg& prg);

// File format: magic "SSKR1", l:u8, party:u8, then four u64 counts
// (arith, binary, dabits, sentinels), then the values per kind in
// consumption order as little-endian l-bit words: arith u,v,w interleaved
// per triple, binary u,v,w interleaved, daBit rb,ra interleaved, sentinels.
void write_pool(const std::filesystem::path& path, const PartyPool& pool);
PartyPool read_pool(const std::filesystem::path& path);

// Reads a window [offset, offset + limit) of a shared pool.
class PoolCursor : public CorrelatedSource {
 public:
  explicit PoolCursor(std::shared_ptr<const PartyPool> pool)
      : PoolCursor(std::move(pool), PoolCounts{}, PoolCounts{}, false) {}
  PoolCursor(std::shared_ptr<const PartyPool> pool, PoolCounts offset,
             PoolCounts limit)
      : PoolCursor(std::move(pool), offset, limit, true) {}

  TripleBatch arith_triples(std::size_t count) override;
  TripleBatch binary_triples(std::size_t count) override;
  DaBitBatch dabits(std::size_t count) override;
  Word sentinel() override;

 private:
  PoolCursor(std::shared_ptr<const PartyPool> pool, PoolCounts offset,
             PoolCounts limit, bool bounded);
  std::uint64_t take(std::uint64_t& used, std::uint64_t offset,
                     std::uint64_t limit, std::uint64_t available,
                     std::size_t count, const char* kind);

  std::shared_ptr<const PartyPool> pool_;
  PoolCounts offset_;
  PoolCounts limit_;
};

// ---- on-demand dealer ------------------------------------------------------

// A trusted dealer that deals each batch the first time either party asks
// for it and holds the other half until the peer asks. Both parties must
// request identical (kind, count) sequences, which the protocol guarantees;
// a mismatch is a ProtocolError. Thread-safe.
class TrustedDealer {
 public:
  TrustedDealer(const Ring& ring, Word vmax, const Seed& seed);
  ~TrustedDealer();

  CorrelatedSource& source(PartyId party);
  // Total dealt so far, per party (the two are equal once both finish).
  PoolCounts dealt() const;

 private:
  enum class Kind { kArith, kBinary, kDaBit, kSentinel };
  struct Pending {
    Kind kind;
    std::size_t count;
    TripleBatch triples;
    DaBitBatch dabits;
    Word sentinel = 0;
  };
  class Source;

  Pending take(PartyId party, Kind kind, std::size_t count);

  Ring ring_;
  Word vmax_;
  mutable std::mutex mu_;
  Prg prg_;
  std::deque<Pending> pending_[2];
  PoolCounts dealt_;
  std::unique_ptr<Source> sources_[2];
};

}  // namespace skyshare
