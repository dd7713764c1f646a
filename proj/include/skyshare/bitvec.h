#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "skyshare/ring.h"

namespace skyshare {

// One party's XOR shares of a vector of secret bits, packed `width` bits per
// word where width is the ring width l. The packing matches the wire format:
// a bit vector of N bits travels as ceil(N / l) l-bit words.
class BitVec {
 public:
  BitVec() = default;
  BitVec(std::size_t size, unsigned width)
      : size_(size), width_(width), words_(ceil_div(size, width), 0) {}

  std::size_t size() const { return size_; }
  unsigned width() const { return width_; }
  std::vector<Word>& words() { return words_; }
  const std::vector<Word>& words() const { return words_; }

  unsigned get(std::size_t i) const {
    return static_cast<unsigned>((words_[i / width_] >> (i % width_)) & 1U);
  }
  void set(std::size_t i, unsigned bit) {
    Word& w = words_[i / width_];
    const Word m = Word{1} << (i % width_);
    w = bit ? (w | m) : (w & ~m);
  }

  // Mask of valid bit positions in word `idx`.
  Word valid_mask(std::size_t idx) const {
    const std::size_t start = idx * width_;
    const std::size_t n = std::min<std::size_t>(width_, size_ - start);
    return n == 64 ? ~Word{0} : ((Word{1} << n) - 1);
  }

  BitVec& operator^=(const BitVec& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] ^= o.words_[i];
    return *this;
  }
  friend BitVec operator^(BitVec a, const BitVec& b) { return a ^= b; }

  // Bit i of the result is bit i - shift of this vector, zero-filled.
  BitVec shifted_up(std::size_t shift) const {
    BitVec out(size_, width_);
    if (shift < size_) out.write_at(shift, slice(0, size_ - shift));
    return out;
  }

  // Flip all valid bits (the local half of a shared NOT).
  void flip_all() {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] ^= valid_mask(i);
  }

  // `len` <= width bits starting at bit `pos`, lowest first.
  Word get_run(std::size_t pos, unsigned len) const {
    const std::size_t w = pos / width_;
    const unsigned off = static_cast<unsigned>(pos % width_);
    Word v = words_[w] >> off;
    if (off + len > width_) v |= words_[w + 1] << (width_ - off);
    return len == 64 ? v : v & ((Word{1} << len) - 1);
  }
  // ORs `len` bits into positions [pos, pos + len), which must be clear.
  void or_run(std::size_t pos, unsigned len, Word bits) {
    const std::size_t w = pos / width_;
    const unsigned off = static_cast<unsigned>(pos % width_);
    const Word full = width_ == 64 ? ~Word{0} : ((Word{1} << width_) - 1);
    words_[w] |= (bits << off) & full;
    if (off + len > width_) words_[w + 1] |= bits >> (width_ - off);
  }
  BitVec slice(std::size_t from, std::size_t count) const {
    BitVec out(count, width_);
    for (std::size_t i = 0; i < count; i += width_) {
      const unsigned len = static_cast<unsigned>(std::min<std::size_t>(width_, count - i));
      out.words_[i / width_] = get_run(from + i, len);
    }
    return out;
  }
  // Copies all of `src` (same width) to positions starting at `at`.
  void write_at(std::size_t at, const BitVec& src) {
    for (std::size_t i = 0; i < src.size_; i += width_) {
      const unsigned len = static_cast<unsigned>(std::min<std::size_t>(width_, src.size_ - i));
      or_run(at + i, len, src.words_[i / width_]);
    }
  }

  static BitVec from_bits(const std::vector<unsigned>& bits, unsigned width) {
    BitVec v(bits.size(), width);
    for (std::size_t i = 0; i < bits.size(); ++i) v.set(i, bits[i] & 1U);
    return v;
  }

  std::vector<unsigned> to_bits() const {
    std::vector<unsigned> out(size_);
    for (std::size_t i = 0; i < size_; ++i) out[i] = get(i);
    return out;
  }

  friend bool operator==(const BitVec&, const BitVec&) = default;

 private:
  std::size_t size_ = 0;
  unsigned width_ = 64;
  std::vector<Word> words_;
};

}  // namespace skyshare
