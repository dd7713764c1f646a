#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>

#include "skyshare/ring.h"

namespace skyshare {

using Seed = std::array<std::uint8_t, 16>;

// Seed derived from a 64-bit integer plus a domain-separation label, so one
// --seed value can key several independent streams.
Seed derive_seed(std::uint64_t seed, std::uint64_t stream);

// Fresh seed from the operating system.
Seed os_seed();

// AES-128 in counter mode. Cryptographically secure, deterministic under a
// fixed seed. Not thread-safe; give every thread its own instance.
class Prg {
 public:
  explicit Prg(const Seed& seed);
  ~Prg();
  Prg(Prg&&) noexcept;
  Prg& operator=(Prg&&) noexcept;
  Prg(const Prg&) = delete;
  Prg& operator=(const Prg&) = delete;

  void fill_bytes(std::span<std::uint8_t> out);
  // Uniform words, each masked to the ring width.
  void fill(std::span<Word> out, const Ring& ring);
  Word next(const Ring& ring);
  std::uint64_t next_u64();
  unsigned next_bit();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace skyshare
