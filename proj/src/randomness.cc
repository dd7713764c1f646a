#include "skyshare/randomness.h"

#include <array>
#include <cstring>
#include <fstream>

#include "skyshare/errors.h"

namespace skyshare {

namespace {

constexpr char kPoolMagic[5] = {'S', 'S', 'K', 'R', '1'};

void write_le(std::ostream& os, std::uint64_t v, unsigned bytes) {
  std::array<char, 8> buf{};
  for (unsigned i = 0; i < bytes; ++i) buf[i] = static_cast<char>(v >> (8 * i));
  os.write(buf.data(), bytes);
}

std::uint64_t read_le(std::istream& is, unsigned bytes) {
  std::array<unsigned char, 8> buf{};
  if (!is.read(reinterpret_cast<char*>(buf.data()), bytes)) {
    throw ParseError("pool file truncated");
  }
  std::uint64_t v = 0;
  for (unsigned i = 0; i < bytes; ++i) v |= std::uint64_t{buf[i]} << (8 * i);
  return v;
}

}  // namespace

std::pair<TripleBatch, TripleBatch> deal_arith_triples(const Ring& ring,
                                                       std::size_t count,
                                                       Prg& prg) {
  TripleBatch a, b;
  a.resize(count);
  b.resize(count);
  prg.fill(a.u, ring);
  prg.fill(a.v, ring);
  prg.fill(a.w, ring);
  prg.fill(b.u, ring);
  prg.fill(b.v, ring);
  for (std::size_t i = 0; i < count; ++i) {
    const Word u = ring.add(a.u[i], b.u[i]);
    const Word v = ring.add(a.v[i], b.v[i]);
    b.w[i] = ring.sub(ring.mul(u, v), a.w[i]);
  }
  return {std::move(a), std::move(b)};
}

ArithTripleHalves make_arith_triple(const Ring& ring, Word u, Word v, Word u1,
                                    Word v1, Word w1) {
  ArithTripleHalves t{};
  t.u1 = ring.reduce(u1);
  t.v1 = ring.reduce(v1);
  t.w1 = ring.reduce(w1);
  t.u2 = ring.sub(u, u1);
  t.v2 = ring.sub(v, v1);
  t.w2 = ring.sub(ring.mul(u, v), w1);
  return t;
}

std::pair<TripleBatch, TripleBatch> deal_binary_triples(const Ring& ring,
                                                        std::size_t count,
                                                        Prg& prg) {
  TripleBatch a, b;
  a.resize(count);
  b.resize(count);
  prg.fill(a.u, ring);
  prg.fill(a.v, ring);
  prg.fill(a.w, ring);
  prg.fill(b.u, ring);
  prg.fill(b.v, ring);
  for (std::size_t i = 0; i < count; ++i) {
    b.w[i] = ((a.u[i] ^ b.u[i]) & (a.v[i] ^ b.v[i])) ^ a.w[i];
  }
  return {std::move(a), std::move(b)};
}

std::pair<DaBitBatch, DaBitBatch> deal_dabits(const Ring& ring,
                                              std::size_t count, Prg& prg) {
  DaBitBatch a, b;
  a.rb.resize(count);
  a.ra.resize(count);
  b.rb.resize(count);
  b.ra.resize(count);
  std::vector<Word> bits(count);
  prg.fill(bits, ring);
  prg.fill(a.rb, ring);
  prg.fill(a.ra, ring);
  for (std::size_t i = 0; i < count; ++i) {
    const Word r = bits[i] & 1U;
    a.rb[i] &= 1U;
    b.rb[i] = r ^ a.rb[i];
    b.ra[i] = ring.sub(r, a.ra[i]);
  }
  return {std::move(a), std::move(b)};
}

std::pair<Word, Word> deal_sentinel(const Ring& ring, Word vmax, Prg& prg) {
  const Word s1 = prg.next(ring);
  return {s1, ring.sub(vmax, s1)};
}

std::pair<PartyPool, PartyPool> deal_pools(const Ring& ring, Word vmax,
                                           const PoolCounts& counts,
                                           Prg& prg) {
  PartyPool p1, p2;
  p1.ring = p2.ring = ring;
  p1.party = PartyId::kFirst;
  p2.party = PartyId::kSecond;
  std::tie(p1.arith, p2.arith) =
      deal_arith_triples(ring, counts.arith_triples, prg);
  std::tie(p1.binary, p2.binary) =
      deal_binary_triples(ring, counts.binary_triples, prg);
  std::tie(p1.dabits, p2.dabits) = deal_dabits(ring, counts.dabits, prg);
  for (std::uint64_t i = 0; i < counts.sentinels; ++i) {
    auto [s1, s2] = deal_sentinel(ring, vmax, prg);
    p1.sentinels.push_back(s1);
    p2.sentinels.push_back(s2);
  }
  return {std::move(p1), std::move(p2)};
}

void write_pool(const std::filesystem::path& path, const PartyPool& pool) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  const unsigned wb = pool.ring.word_bytes();
  os.write(kPoolMagic, sizeof(kPoolMagic));
  write_le(os, pool.ring.bits(), 1);
  write_le(os, static_cast<std::uint64_t>(pool.party), 1);
  const PoolCounts c = pool.counts();
  write_le(os, c.arith_triples, 8);
  write_le(os, c.binary_triples, 8);
  write_le(os, c.dabits, 8);
  write_le(os, c.sentinels, 8);
  for (const TripleBatch* t : {&pool.arith, &pool.binary}) {
    for (std::size_t i = 0; i < t->size(); ++i) {
      write_le(os, t->u[i], wb);
      write_le(os, t->v[i], wb);
      write_le(os, t->w[i], wb);
    }
  }
  for (std::size_t i = 0; i < pool.dabits.size(); ++i) {
    write_le(os, pool.dabits.rb[i], wb);
    write_le(os, pool.dabits.ra[i], wb);
  }
  for (Word s : pool.sentinels) write_le(os, s, wb);
  if (!os) throw Error("write failed for " + path.string());
}

PartyPool read_pool(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path.string());
  char magic[5];
  if (!is.read(magic, 5) || std::memcmp(magic, kPoolMagic, 5) != 0) {
    throw ParseError(path.string() + ": not a randomness pool (bad magic)");
  }
  PartyPool pool;
  pool.ring = Ring(static_cast<unsigned>(read_le(is, 1)));
  pool.party = party_from_int(static_cast<int>(read_le(is, 1)));
  PoolCounts c;
  c.arith_triples = read_le(is, 8);
  c.binary_triples = read_le(is, 8);
  c.dabits = read_le(is, 8);
  c.sentinels = read_le(is, 8);
  const unsigned wb = pool.ring.word_bytes();
  auto read_triples = [&](TripleBatch& t, std::uint64_t n) {
    t.resize(n);
    for (std::uint64_t i = 0; i < n; ++i) {
      t.u[i] = read_le(is, wb);
      t.v[i] = read_le(is, wb);
      t.w[i] = read_le(is, wb);
    }
  };
  read_triples(pool.arith, c.arith_triples);
  read_triples(pool.binary, c.binary_triples);
  pool.dabits.rb.resize(c.dabits);
  pool.dabits.ra.resize(c.dabits);
  for (std::uint64_t i = 0; i < c.dabits; ++i) {
    pool.dabits.rb[i] = read_le(is, wb);
    pool.dabits.ra[i] = read_le(is, wb);
  }
  pool.sentinels.resize(c.sentinels);
  for (auto& s : pool.sentinels) s = read_le(is, wb);
  if (is.peek() != std::char_traits<char>::eof()) {
    throw ParseError(path.string() + ": trailing bytes after pool data");
  }
  return pool;
}

// ---- PoolCursor ------------------------------------------------------------

PoolCursor::PoolCursor(std::shared_ptr<const PartyPool> pool,
                       PoolCounts offset, PoolCounts limit, bool bounded)
    : pool_(std::move(pool)), offset_(offset), limit_(limit) {
  if (!bounded) {
    offset_ = PoolCounts{};
    limit_ = pool_->counts();
  }
}

std::uint64_t PoolCursor::take(std::uint64_t& used, std::uint64_t offset,
                               std::uint64_t limit, std::uint64_t available,
                               std::size_t count, const char* kind) {
  if (used + count > limit || offset + used + count > available) {
    throw RandomnessExhausted(std::string("out of ") + kind + ": need " +
                              std::to_string(used + count) + ", have " +
                              std::to_string(std::min(
                                  limit, available > offset
                                             ? available - offset
                                             : std::uint64_t{0})));
  }
  const std::uint64_t start = offset + used;
  used += count;
  return start;
}

TripleBatch PoolCursor::arith_triples(std::size_t count) {
  const auto s = take(consumed_.arith_triples, offset_.arith_triples,
                      limit_.arith_triples, pool_->arith.size(), count,
                      "arithmetic triples");
  TripleBatch t;
  const auto& a = pool_->arith;
  t.u.assign(a.u.begin() + s, a.u.begin() + s + count);
  t.v.assign(a.v.begin() + s, a.v.begin() + s + count);
  t.w.assign(a.w.begin() + s, a.w.begin() + s + count);
  return t;
}

TripleBatch PoolCursor::binary_triples(std::size_t count) {
  const auto s = take(consumed_.binary_triples, offset_.binary_triples,
                      limit_.binary_triples, pool_->binary.size(), count,
                      "binary triples");
  TripleBatch t;
  const auto& a = pool_->binary;
  t.u.assign(a.u.begin() + s, a.u.begin() + s + count);
  t.v.assign(a.v.begin() + s, a.v.begin() + s + count);
  t.w.assign(a.w.begin() + s, a.w.begin() + s + count);
  return t;
}

DaBitBatch PoolCursor::dabits(std::size_t count) {
  const auto s = take(consumed_.dabits, offset_.dabits, limit_.dabits,
                      pool_->dabits.size(), count, "daBits");
  DaBitBatch d;
  const auto& a = pool_->dabits;
  d.rb.assign(a.rb.begin() + s, a.rb.begin() + s + count);
  d.ra.assign(a.ra.begin() + s, a.ra.begin() + s + count);
  return d;
}

Word PoolCursor::sentinel() {
  const auto s = take(consumed_.sentinels, offset_.sentinels,
                      limit_.sentinels, pool_->sentinels.size(), 1,
                      "sentinel sharings");
  return pool_->sentinels[s];
}

// ---- TrustedDealer ---------------------------------------------------------

class TrustedDealer::Source : public CorrelatedSource {
 public:
  Source(TrustedDealer& dealer, PartyId party)
      : dealer_(dealer), party_(party) {}

  TripleBatch arith_triples(std::size_t count) override {
    consumed_.arith_triples += count;
    return std::move(dealer_.take(party_, Kind::kArith, count).triples);
  }
  TripleBatch binary_triples(std::size_t count) override {
    consumed_.binary_triples += count;
    return std::move(dealer_.take(party_, Kind::kBinary, count).triples);
  }
  DaBitBatch dabits(std::size_t count) override {
    consumed_.dabits += count;
    return std::move(dealer_.take(party_, Kind::kDaBit, count).dabits);
  }
  Word sentinel() override {
    consumed_.sentinels += 1;
    return dealer_.take(party_, Kind::kSentinel, 1).sentinel;
  }

 private:
  TrustedDealer& dealer_;
  PartyId party_;
};

TrustedDealer::TrustedDealer(const Ring& ring, Word vmax, const Seed& seed)
    : ring_(ring), vmax_(vmax), prg_(seed) {
  sources_[0] = std::make_unique<Source>(*this, PartyId::kFirst);
  sources_[1] = std::make_unique<Source>(*this, PartyId::kSecond);
}

TrustedDealer::~TrustedDealer() = default;

CorrelatedSource& TrustedDealer::source(PartyId party) {
  return *sources_[index_of(party)];
}

PoolCounts TrustedDealer::dealt() const {
  std::lock_guard lock(mu_);
  return dealt_;
}

TrustedDealer::Pending TrustedDealer::take(PartyId party, Kind kind,
                                           std::size_t count) {
  std::lock_guard lock(mu_);
  auto& mine = pending_[index_of(party)];
  if (!mine.empty()) {
    Pending p = std::move(mine.front());
    mine.pop_front();
    if (p.kind != kind || p.count != count) {
      throw ProtocolError("parties requested different correlated randomness");
    }
    return p;
  }
  Pending a{kind, count, {}, {}, 0};
  Pending b{kind, count, {}, {}, 0};
  switch (kind) {
    case Kind::kArith:
      std::tie(a.triples, b.triples) = deal_arith_triples(ring_, count, prg_);
      dealt_.arith_triples += count;
      break;
    case Kind::kBinary:
      std::tie(a.triples, b.triples) = deal_binary_triples(ring_, count, prg_);
      dealt_.binary_triples += count;
      break;
    case Kind::kDaBit:
      std::tie(a.dabits, b.dabits) = deal_dabits(ring_, count, prg_);
      dealt_.dabits += count;
      break;
    case Kind::kSentinel:
      std::tie(a.sentinel, b.sentinel) = deal_sentinel(ring_, vmax_, prg_);
      dealt_.sentinels += 1;
      break;
  }
  // `a` is always party 1's half.
  if (party == PartyId::kFirst) {
    pending_[1].push_back(std::move(b));
    return a;
  }
  pending_[0].push_back(std::move(a));
  return b;
}

}  // namespace skyshare
