#include "skyshare/sharing.h"

#include "skyshare/errors.h"
#include "skyshare/kernels.h"
#include "skyshare/party.h"

namespace skyshare {

namespace {

void require_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw InvalidArgument(std::string(what) + ": length mismatch (" +
                          std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
}

void require_distinct(PartyId a, PartyId b) {
  if (a == b) throw InvalidArgument("both shares belong to the same party");
}

}  // namespace

PartyId party_from_int(int id) {
  if (id == 1) return PartyId::kFirst;
  if (id == 2) return PartyId::kSecond;
  throw InvalidArgument("party must be 1 or 2, got " + std::to_string(id));
}

std::pair<ArithShare, ArithShare> share_arith(Word x, const Ring& ring,
                                              Prg& prg) {
  const Word r = prg.next(ring);
  return {{PartyId::kFirst, r}, {PartyId::kSecond, ring.sub(x, r)}};
}

std::pair<BinShare, BinShare> share_bin(unsigned bit, Prg& prg) {
  const unsigned r = prg.next_bit();
  return {{PartyId::kFirst, r}, {PartyId::kSecond, (bit ^ r) & 1U}};
}

Word reconstruct_arith(const ArithShare& a, const ArithShare& b,
                       const Ring& ring) {
  require_distinct(a.party, b.party);
  return ring.add(a.value, b.value);
}

unsigned reconstruct_bin(const BinShare& a, const BinShare& b) {
  require_distinct(a.party, b.party);
  return (a.bit ^ b.bit) & 1U;
}

std::pair<std::vector<Word>, std::vector<Word>> share_arith_vec(
    std::span<const Word> x, const Ring& ring, Prg& prg) {
  std::vector<Word> first(x.size()), second(x.size());
  prg.fill(first, ring);
  for (std::size_t i = 0; i < x.size(); ++i) {
    second[i] = ring.sub(x[i], first[i]);
  }
  return {std::move(first), std::move(second)};
}

std::vector<Word> reconstruct_arith_vec(std::span<const Word> a,
                                        std::span<const Word> b,
                                        const Ring& ring) {
  require_same_size(a.size(), b.size(), "reconstruct");
  std::vector<Word> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = ring.add(a[i], b[i]);
  return out;
}

std::pair<BitVec, BitVec> share_bits(const BitVec& x, Prg& prg) {
  BitVec first(x.size(), x.width());
  Ring ring(x.width());
  prg.fill(first.words(), ring);
  for (std::size_t i = 0; i < first.words().size(); ++i) {
    first.words()[i] &= first.valid_mask(i);
  }
  BitVec second = first ^ x;
  return {std::move(first), std::move(second)};
}

BitVec reconstruct_bits(const BitVec& a, const BitVec& b) {
  require_same_size(a.size(), b.size(), "reconstruct_bits");
  return a ^ b;
}

std::vector<Word> add_shares(std::span<const Word> a, std::span<const Word> b,
                             const Ring& ring) {
  require_same_size(a.size(), b.size(), "add_shares");
  std::vector<Word> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = ring.add(a[i], b[i]);
  return out;
}

std::vector<Word> sub_shares(std::span<const Word> a, std::span<const Word> b,
                             const Ring& ring) {
  require_same_size(a.size(), b.size(), "sub_shares");
  std::vector<Word> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = ring.sub(a[i], b[i]);
  return out;
}

std::vector<Word> scale_shares(std::span<const Word> a, Word eta,
                               const Ring& ring) {
  std::vector<Word> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = ring.mul(a[i], eta);
  return out;
}

std::vector<Word> add_public(std::span<const Word> a, Word c, PartyId party,
                             const Ring& ring) {
  std::vector<Word> out(a.begin(), a.end());
  if (party == PartyId::kFirst) {
    for (auto& w : out) w = ring.add(w, c);
  }
  return out;
}

BitVec not_bits(const BitVec& x, PartyId party) {
  BitVec out = x;
  if (party == PartyId::kFirst) out.flip_all();
  return out;
}

std::vector<Word> mul_beaver(PartyContext& ctx, std::span<const Word> x,
                             std::span<const Word> y) {
  require_same_size(x.size(), y.size(), "mul_beaver");
  const std::size_t n = x.size();
  if (n == 0) return {};
  const Ring& ring = ctx.ring();
  const Word mask = ring.mask();
  TripleBatch t = ctx.randomness().arith_triples(n);

  std::vector<Word> ef(2 * n);
  std::span<Word> e(ef.data(), n), f(ef.data() + n, n);
  kernels::dispatch::arith_mask(x, t.u, e, mask);
  kernels::dispatch::arith_mask(y, t.v, f, mask);
  std::vector<Word> theirs = ctx.exchange(OpenTag::kBeaverArith, ef, 2 * n);
  kernels::dispatch::arith_add(ef, theirs, ef, mask);

  std::vector<Word> z(n);
  kernels::dispatch::arith_beaver_combine(ctx.first(), e, f, t.u, t.v, t.w, z,
                                          mask);
  return z;
}

std::vector<Word> and_words(PartyContext& ctx, std::span<const Word> x,
                            std::span<const Word> y) {
  require_same_size(x.size(), y.size(), "and_words");
  const std::size_t n = x.size();
  if (n == 0) return {};
  TripleBatch t = ctx.randomness().binary_triples(n);

  std::vector<Word> ef(2 * n);
  std::span<Word> e(ef.data(), n), f(ef.data() + n, n);
  kernels::dispatch::bin_xor(x, t.u, e);
  kernels::dispatch::bin_xor(y, t.v, f);
  std::vector<Word> theirs = ctx.exchange(OpenTag::kBeaverBinary, ef, 2 * n);
  kernels::dispatch::bin_xor(ef, theirs, ef);

  std::vector<Word> z(n);
  kernels::dispatch::bin_beaver_combine(ctx.first(), e, f, t.u, t.v, t.w, z);
  return z;
}

BitVec and_beaver(PartyContext& ctx, const BitVec& x, const BitVec& y) {
  require_same_size(x.size(), y.size(), "and_beaver");
  if (x.width() != ctx.ring().bits() || y.width() != ctx.ring().bits()) {
    throw InvalidArgument("bit vector packing width differs from the ring");
  }
  BitVec out(x.size(), x.width());
  if (x.size() == 0) return out;
  out.words() = and_words(ctx, x.words(), y.words());
  for (std::size_t i = 0; i < out.words().size(); ++i) {
    out.words()[i] &= out.valid_mask(i);
  }
  return out;
}

}  // namespace skyshare
