#pragma once

// Arithmetic in Z_{2^l} with two's-complement signed interpretation.
//
// Every plaintext value and every share in the system is a Word reduced
// modulo 2^l. The ring width l is a per-session constant in [2, 64].

#include <cstdint>

#include "skyshare/errors.h"

namespace skyshare {

using Word = std::uint64_t;

class Ring {
 public:
  static constexpr unsigned kMinBits = 2;
  static constexpr unsigned kMaxBits = 64;

  explicit Ring(unsigned bits = 64) : bits_(bits) {
    if (bits < kMinBits || bits > kMaxBits) {
      throw InvalidArgument("ring width must be in [2, 64], got " +
                            std::to_string(bits));
    }
    mask_ = bits == 64 ? ~Word{0} : ((Word{1} << bits) - 1);
  }

  unsigned bits() const { return bits_; }
  Word mask() const { return mask_; }
  // Bytes one l-bit word occupies on the wire.
  unsigned word_bytes() const { return (bits_ + 7) / 8; }

  Word reduce(Word a) const { return a & mask_; }
  Word add(Word a, Word b) const { return (a + b) & mask_; }
  Word sub(Word a, Word b) const { return (a - b) & mask_; }
  Word neg(Word a) const { return (Word{0} - a) & mask_; }
  Word mul(Word a, Word b) const { return (a * b) & mask_; }

  // Bit l-1; 1 iff the signed interpretation is negative.
  unsigned msb(Word a) const {
    return static_cast<unsigned>((a >> (bits_ - 1)) & 1U);
  }

  // Largest magnitude encode() accepts: 2^(l-1) - 1.
  std::int64_t max_signed() const {
    return static_cast<std::int64_t>((Word{1} << (bits_ - 1)) - 1);
  }

  Word encode(std::int64_t v) const {
    if (v > max_signed() || v < -max_signed()) {
      throw InvalidArgument("value " + std::to_string(v) +
                            " does not fit a signed " +
                            std::to_string(bits_) + "-bit ring element");
    }
    return static_cast<Word>(v) & mask_;
  }

  std::int64_t decode(Word a) const {
    a &= mask_;
    if (msb(a) == 0) return static_cast<std::int64_t>(a);
    if (bits_ == 64) return static_cast<std::int64_t>(a);
    return static_cast<std::int64_t>(a) -
           static_cast<std::int64_t>(Word{1} << bits_);
  }

  friend bool operator==(const Ring&, const Ring&) = default;

 private:
  unsigned bits_;
  Word mask_;
};

// ceil(log2(x)) for x >= 1; 0 for x <= 1.
constexpr unsigned ceil_log2(std::uint64_t x) {
  unsigned r = 0;
  std::uint64_t v = 1;
  while (v < x) {
    v <<= 1;
    ++r;
  }
  return r;
}

constexpr std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) {
  return (a + b - 1) / b;
}

}  // namespace skyshare
