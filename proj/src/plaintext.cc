#include "skyshare/plaintext.h"

#include <algorithm>

#include "skyshare/errors.h"

namespace skyshare {

PlainDatabase PlainDatabase::from_rows(const std::vector<Tuple>& rows,
                                       std::uint32_t scale) {
  PlainDatabase db;
  db.n = rows.size();
  db.m = rows.empty() ? 0 : rows[0].size();
  db.scale = scale;
  for (const auto& r : rows) {
    if (r.size() != db.m) throw InvalidArgument("rows differ in dimension");
    db.values.insert(db.values.end(), r.begin(), r.end());
    for (auto v : r) db.bound = std::max(db.bound, v);
  }
  return db;
}

bool dominates(std::span<const std::uint64_t> a,
               std::span<const std::uint64_t> b) {
  if (a.size() != b.size()) throw InvalidArgument("dominates: dimension mismatch");
  bool strict = false;
  for (std::size_t j = 0; j < a.size(); ++j) {
    if (a[j] > b[j]) return false;
    if (a[j] < b[j]) strict = true;
  }
  return strict;
}

std::vector<std::uint64_t> map_to_query(const PlainDatabase& db,
                                        std::span<const std::uint64_t> q) {
  if (q.size() != db.m) throw InvalidArgument("query dimension mismatch");
  std::vector<std::uint64_t> t(db.values.size());
  for (std::size_t i = 0; i < db.n; ++i) {
    for (std::size_t j = 0; j < db.m; ++j) {
      const std::uint64_t p = db.values[i * db.m + j];
      t[i * db.m + j] = p > q[j] ? p - q[j] : q[j] - p;
    }
  }
  return t;
}

std::vector<std::size_t> plaintext_skyline_indices(
    const PlainDatabase& db, std::span<const std::uint64_t> q) {
  if (db.n == 0) throw InvalidArgument("empty database");
  const std::vector<std::uint64_t> t = map_to_query(db, q);
  const std::size_t m = db.m;
  auto mapped = [&](std::size_t i) {
    return std::span<const std::uint64_t>(t.data() + i * m, m);
  };

  std::vector<std::uint64_t> sums(db.n, 0);
  for (std::size_t i = 0; i < db.n; ++i) {
    for (auto v : mapped(i)) sums[i] += v;
  }
  std::vector<bool> alive(db.n, true);
  std::size_t remaining = db.n;
  std::vector<std::size_t> out;
  while (remaining > 0) {
    std::size_t best = db.n;
    for (std::size_t i = 0; i < db.n; ++i) {
      if (alive[i] && (best == db.n || sums[i] < sums[best])) best = i;
    }
    out.push_back(best);
    alive[best] = false;
    --remaining;
    for (std::size_t i = 0; i < db.n; ++i) {
      if (alive[i] && dominates(mapped(best), mapped(i))) {
        alive[i] = false;
        --remaining;
      }
    }
  }
  return out;
}

std::vector<Tuple> plaintext_skyline(const PlainDatabase& db,
                                     std::span<const std::uint64_t> q) {
  std::vector<Tuple> out;
  for (auto i : plaintext_skyline_indices(db, q)) out.push_back(db.tuple(i));
  return out;
}

std::vector<std::size_t> brute_force_skyline_indices(
    const PlainDatabase& db, std::span<const std::uint64_t> q) {
  if (db.n == 0) throw InvalidArgument("empty database");
  const std::vector<std::uint64_t> t = map_to_query(db, q);
  const std::size_t m = db.m;
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < db.n; ++i) {
    std::span<const std::uint64_t> ti(t.data() + i * m, m);
    bool dominated = false;
    for (std::size_t j = 0; j < db.n && !dominated; ++j) {
      if (j != i && dominates({t.data() + j * m, m}, ti)) dominated = true;
    }
    if (!dominated) out.push_back(i);
  }
  return out;
}

std::vector<Tuple> brute_force_skyline(const PlainDatabase& db,
                                       std::span<const std::uint64_t> q) {
  std::vector<Tuple> out;
  for (auto i : brute_force_skyline_indices(db, q)) out.push_back(db.tuple(i));
  return out;
}

bool same_rows(std::vector<Tuple> a, std::vector<Tuple> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return a == b;
}

}  // namespace skyshare
