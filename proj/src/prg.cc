#include "skyshare/prg.h"

#include <openssl/evp.h>
#include <openssl/rand.h>

#include <algorithm>
#include <cstring>
#include <vector>

namespace skyshare {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

Seed derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t state = seed ^ (stream * 0xd1342543de82ef95ULL);
  Seed out{};
  std::uint64_t a = splitmix64(state);
  std::uint64_t b = splitmix64(state);
  std::memcpy(out.data(), &a, 8);
  std::memcpy(out.data() + 8, &b, 8);
  return out;
}

Seed os_seed() {
  Seed out{};
  if (RAND_bytes(out.data(), static_cast<int>(out.size())) != 1) {
    throw Error("RAND_bytes failed");
  }
  return out;
}

struct Prg::Impl {
  EVP_CIPHER_CTX* ctx = nullptr;
  std::vector<std::uint8_t> zeros;
  std::vector<std::uint8_t> buffer;
  std::size_t buffer_pos = 0;

  explicit Impl(const Seed& seed) {
    ctx = EVP_CIPHER_CTX_new();
    if (ctx == nullptr) throw Error("EVP_CIPHER_CTX_new failed");
    std::uint8_t iv[16] = {};
    if (EVP_EncryptInit_ex(ctx, EVP_aes_128_ctr(), nullptr, seed.data(), iv) !=
        1) {
      EVP_CIPHER_CTX_free(ctx);
      throw Error("AES-CTR init failed");
    }
  }
  ~Impl() { EVP_CIPHER_CTX_free(ctx); }

  void keystream(std::uint8_t* out, std::size_t len) {
    // Chunked so the zero buffer stays small.
    constexpr std::size_t kChunk = 1 << 16;
    if (zeros.size() < std::min(len, kChunk)) {
      zeros.assign(std::min(len, kChunk), 0);
    }
    while (len > 0) {
      std::size_t n = std::min(len, kChunk);
      int out_len = 0;
      if (EVP_EncryptUpdate(ctx, out, &out_len, zeros.data(),
                            static_cast<int>(n)) != 1) {
        throw Error("AES-CTR keystream failed");
      }
      out += n;
      len -= n;
    }
  }
};

Prg::Prg(const Seed& seed) : impl_(std::make_unique<Impl>(seed)) {}
Prg::~Prg() = default;
Prg::Prg(Prg&&) noexcept = default;
Prg& Prg::operator=(Prg&&) noexcept = default;

void Prg::fill_bytes(std::span<std::uint8_t> out) {
  impl_->keystream(out.data(), out.size());
}

void Prg::fill(std::span<Word> out, const Ring& ring) {
  impl_->keystream(reinterpret_cast<std::uint8_t*>(out.data()),
                   out.size() * sizeof(Word));
  if (ring.bits() < 64) {
    const Word mask = ring.mask();
    for (auto& w : out) w &= mask;
  }
}

std::uint64_t Prg::next_u64() {
  auto& im = *impl_;
  if (im.buffer_pos + 8 > im.buffer.size()) {
    im.buffer.resize(4096);
    im.keystream(im.buffer.data(), im.buffer.size());
    im.buffer_pos = 0;
  }
  std::uint64_t v;
  std::memcpy(&v, im.buffer.data() + im.buffer_pos, 8);
  im.buffer_pos += 8;
  return v;
}

Word Prg::next(const Ring& ring) { return next_u64() & ring.mask(); }

unsigned Prg::next_bit() { return static_cast<unsigned>(next_u64() & 1U); }

}  // namespace skyshare
