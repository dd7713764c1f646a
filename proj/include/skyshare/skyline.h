#pragma once

// The secure dynamic-skyline query, run by each server over its shares.
//
//   T = |P - q|                      sec_map
//   s = row sums of T                attribute_sums
//   loop:
//     (sMin, t*, p*) = tree min of s  sec_fetch
//     open [sMin >= vMAX]; stop if set
//     keep p*; push s_i to vMAX for the fetched row and for every row
//     t* dominates                    sec_filt

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "skyshare/bitvec.h"
#include "skyshare/party.h"
#include "skyshare/plaintext.h"
#include "skyshare/prg.h"
#include "skyshare/ring.h"

namespace skyshare {

// One server's share of the n x m database.
struct PartyDatabase {
  Ring ring{64};
  PartyId party = PartyId::kFirst;
  std::size_t n = 0;
  std::size_t m = 0;
  std::uint32_t scale = 1;
  std::vector<Word> shares;  // row-major
};

// vMAX = 2^(l-2) unless a smaller exponent is asked for.
Word default_vmax(const Ring& ring);
Word vmax_from_exponent(const Ring& ring, unsigned exponent);

// Every comparison stays in the signed window when m * B < vMAX <= 2^(l-2).
// Throws InvalidArgument otherwise.
void check_domain(const Ring& ring, Word vmax, std::size_t m,
                  std::uint64_t bound);

// |p - q| <= max(p, q), so m * max(q) < vMAX keeps every mapped sum below
// vMAX as well. Throws InvalidArgument otherwise.
void check_query(Word vmax, std::span<const std::uint64_t> q);

std::pair<PartyDatabase, PartyDatabase> share_database(const PlainDatabase& db,
                                                       const Ring& ring,
                                                       Prg& prg);

// Magic "SSKY1", l:u8, n:u64, m:u16, party:u8, scale:u32 (little-endian),
// then n*m little-endian l-bit words.
void write_share_file(const std::filesystem::path& path,
                      const PartyDatabase& db);
PartyDatabase read_share_file(const std::filesystem::path& path);

// ---- protocol steps ----------------------------------------------------------

std::vector<Word> sec_map(PartyContext& ctx, const PartyDatabase& db,
                          std::span<const Word> q);

std::vector<Word> attribute_sums(std::span<const Word> t, std::size_t n,
                                 std::size_t m, const Ring& ring);

struct FetchResult {
  Word s_min = 0;
  std::vector<Word> t_star;
  std::vector<Word> p_star;
};

FetchResult sec_fetch(PartyContext& ctx, std::span<const Word> s,
                      std::span<const Word> t, std::span<const Word> p,
                      std::size_t m);

struct FilterFlags {
  BitVec sigma;       // sMin >= s_i
  BitVec first_sky;   // the first i with sigma_i set
  BitVec dominated;   // t* dominates t_i
  BitVec phi;         // first_sky ^ dominated
};

std::vector<Word> sec_filt(PartyContext& ctx, std::span<const Word> t,
                           std::span<const Word> t_star, Word s_min,
                           std::span<const Word> s, Word vmax, std::size_t m,
                           FilterFlags* flags = nullptr);

// ---- full query ----------------------------------------------------------------

struct LoopTrace {
  std::vector<Word> s;  // sums entering the loop
  FetchResult fetch;
  unsigned stop = 0;    // the opened bit
  bool filtered = false;
  FilterFlags flags;
  std::vector<Word> s_after;
};

// One party's view of every intermediate value, for tests.
struct QueryTrace {
  Word vmax = 0;
  std::vector<Word> mapped;
  std::vector<Word> sums;
  std::vector<LoopTrace> loops;
};

// One party's share of the result: k rows of m values.
struct ResultShares {
  std::size_t k = 0;
  std::size_t m = 0;
  std::vector<Word> rows;
};

ResultShares run_query(PartyContext& ctx, const PartyDatabase& db,
                       std::span<const Word> q, QueryTrace* trace = nullptr);

// Wire form of a result share: k as u32 little-endian, then k*m l-bit words.
std::vector<std::uint8_t> encode_result(const ResultShares& r,
                                        const Ring& ring);
ResultShares decode_result(std::span<const std::uint8_t> bytes, std::size_t m,
                           const Ring& ring);

// Adds the two result shares. Rows come back in fetch order.
std::vector<Tuple> reconstruct_result(const ResultShares& a,
                                      const ResultShares& b, const Ring& ring);

}  // namespace skyshare
