#pragma once

// Cleartext skyline engines used as oracles for the secure protocol.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace skyshare {

using Tuple = std::vector<std::uint64_t>;

// n x m non-negative integers, row-major.
struct PlainDatabase {
  std::size_t n = 0;
  std::size_t m = 0;
  std::vector<std::uint64_t> values;
  // Largest attribute value the owner declares (B).
  std::uint64_t bound = 0;
  // Fixed-point scale applied when the data was ingested.
  std::uint32_t scale = 1;

  std::span<const std::uint64_t> row(std::size_t i) const {
    return {values.data() + i * m, m};
  }
  Tuple tuple(std::size_t i) const {
    auto r = row(i);
    return {r.begin(), r.end()};
  }
  static PlainDatabase from_rows(const std::vector<Tuple>& rows,
                                 std::uint32_t scale = 1);
};

// a[j] <= b[j] for all j and a[j] < b[j] for some j.
bool dominates(std::span<const std::uint64_t> a,
               std::span<const std::uint64_t> b);

// t_i[j] = |p_i[j] - q[j]|, row-major.
std::vector<std::uint64_t> map_to_query(const PlainDatabase& db,
                                        std::span<const std::uint64_t> q);

// Repeatedly take the first tuple with the smallest mapped sum, keep it,
// and drop it together with everything it dominates. Indices in fetch order.
std::vector<std::size_t> plaintext_skyline_indices(
    const PlainDatabase& db, std::span<const std::uint64_t> q);
std::vector<Tuple> plaintext_skyline(const PlainDatabase& db,
                                     std::span<const std::uint64_t> q);

// Every tuple no other tuple dominates in the mapped space. Ascending index.
std::vector<std::size_t> brute_force_skyline_indices(
    const PlainDatabase& db, std::span<const std::uint64_t> q);
std::vector<Tuple> brute_force_skyline(const PlainDatabase& db,
                                       std::span<const std::uint64_t> q);

// Equal as multisets of rows.
bool same_rows(std::vector<Tuple> a, std::vector<Tuple> b);

}  // namespace skyshare
