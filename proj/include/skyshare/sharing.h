#pragma once

// Two-party additive (mod 2^l) and XOR secret sharing.
//
// The dealer-side helpers (share/reconstruct) work on both shares at once.
// The interactive products (mul_beaver, and_beaver) run inside one party and
// talk to the peer through a PartyContext.

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "skyshare/bitvec.h"
#include "skyshare/prg.h"
#include "skyshare/ring.h"

namespace skyshare {

enum class PartyId : std::uint8_t { kFirst = 1, kSecond = 2 };

inline PartyId other(PartyId p) {
  return p == PartyId::kFirst ? PartyId::kSecond : PartyId::kFirst;
}
inline int index_of(PartyId p) { return p == PartyId::kFirst ? 0 : 1; }
PartyId party_from_int(int id);

struct ArithShare {
  PartyId party;
  Word value;
};

struct BinShare {
  PartyId party;
  unsigned bit;
};

// <x>_1 uniform, <x>_2 = x - <x>_1.
std::pair<ArithShare, ArithShare> share_arith(Word x, const Ring& ring,
                                              Prg& prg);
std::pair<BinShare, BinShare> share_bin(unsigned bit, Prg& prg);

Word reconstruct_arith(const ArithShare& a, const ArithShare& b,
                       const Ring& ring);
unsigned reconstruct_bin(const BinShare& a, const BinShare& b);

// Vector forms. Element i of the two outputs is one sharing of x[i].
std::pair<std::vector<Word>, std::vector<Word>> share_arith_vec(
    std::span<const Word> x, const Ring& ring, Prg& prg);
std::vector<Word> reconstruct_arith_vec(std::span<const Word> a,
                                        std::span<const Word> b,
                                        const Ring& ring);
std::pair<BitVec, BitVec> share_bits(const BitVec& x, Prg& prg);
BitVec reconstruct_bits(const BitVec& a, const BitVec& b);

// Local linear operations on one party's shares. No communication.
std::vector<Word> add_shares(std::span<const Word> a, std::span<const Word> b,
                             const Ring& ring);
std::vector<Word> sub_shares(std::span<const Word> a, std::span<const Word> b,
                             const Ring& ring);
std::vector<Word> scale_shares(std::span<const Word> a, Word eta,
                               const Ring& ring);
// Adds a public constant: only party 1 changes its share.
std::vector<Word> add_public(std::span<const Word> a, Word c, PartyId party,
                             const Ring& ring);
// Shared NOT: party 1 flips its share, party 2 keeps it.
BitVec not_bits(const BitVec& x, PartyId party);

class PartyContext;

// [x*y] for equal-length vectors, one round, consumes x.size() triples.
std::vector<Word> mul_beaver(PartyContext& ctx, std::span<const Word> x,
                             std::span<const Word> y);

// Word-wise AND of XOR-shared l-bit words, one round, one binary triple per
// word.
std::vector<Word> and_words(PartyContext& ctx, std::span<const Word> x,
                            std::span<const Word> y);

// [x AND y] for packed bit vectors of equal size.
BitVec and_beaver(PartyContext& ctx, const BitVec& x, const BitVec& y);

}  // namespace skyshare
