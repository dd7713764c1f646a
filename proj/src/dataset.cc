#include "skyshare/dataset.h"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "skyshare/errors.h"

namespace skyshare {

const char* to_string(DatasetKind kind) {
  switch (kind) {
    case DatasetKind::kCorr:
      return "corr";
    case DatasetKind::kInde:
      return "inde";
    case DatasetKind::kAnti:
      return "anti";
    case DatasetKind::kCsv:
      return "csv";
  }
  return "unknown";
}

DatasetKind parse_dataset_kind(const std::string& text) {
  std::string t = text;
  std::transform(t.begin(), t.end(), t.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (t == "corr") return DatasetKind::kCorr;
  if (t == "inde") return DatasetKind::kInde;
  if (t == "anti") return DatasetKind::kAnti;
  if (t == "csv") return DatasetKind::kCsv;
  throw InvalidArgument("unknown dataset kind '" + text +
                        "' (expected corr, inde, anti or csv)");
}

void DatasetSpec::validate() const {
  if (kind == DatasetKind::kCsv) {
    if (csv_path.empty()) throw InvalidArgument("csv dataset needs a path");
    if (scale == 0) throw InvalidArgument("scale must be positive");
    return;
  }
  if (n == 0) throw InvalidArgument("n must be at least 1");
  if (m == 0) throw InvalidArgument("m must be at least 1");
  if (m > 65535) throw InvalidArgument("m must fit 16 bits");
  if (bound == 0) throw InvalidArgument("bound must be at least 1");
}

std::uint64_t uniform_u64(std::mt19937_64& rng, std::uint64_t lo,
                          std::uint64_t hi) {
  if (lo > hi) throw InvalidArgument("uniform_u64: empty range");
  const std::uint64_t span = hi - lo;
  if (span == ~std::uint64_t{0}) return rng();
  const std::uint64_t range = span + 1;
  // Reject the top partial bucket so every value is equally likely.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % range);
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return lo + x % range;
}

Tuple random_query(std::mt19937_64& rng, std::size_t m, std::uint64_t bound) {
  Tuple q(m);
  for (auto& v : q) v = uniform_u64(rng, 0, bound);
  return q;
}

namespace {

std::uint64_t clamp_signed(std::int64_t v, std::uint64_t bound) {
  if (v < 0) return 0;
  return std::min<std::uint64_t>(static_cast<std::uint64_t>(v), bound);
}

void fill_inde(PlainDatabase& db, std::mt19937_64& rng) {
  for (auto& v : db.values) v = uniform_u64(rng, 0, db.bound);
}

void fill_corr(PlainDatabase& db, std::mt19937_64& rng) {
  const auto b = static_cast<std::int64_t>(db.bound);
  const std::int64_t jitter = b / 20;
  for (std::size_t i = 0; i < db.n; ++i) {
    const auto base = static_cast<std::int64_t>(uniform_u64(rng, 0, db.bound));
    for (std::size_t j = 0; j < db.m; ++j) {
      const auto off = static_cast<std::int64_t>(
                           uniform_u64(rng, 0, 2 * static_cast<std::uint64_t>(jitter))) -
                       jitter;
      db.values[i * db.m + j] = clamp_signed(base + off, db.bound);
    }
  }
}

void fill_anti(PlainDatabase& db, std::mt19937_64& rng) {
  const std::uint64_t centre = db.m * db.bound / 2;
  const std::uint64_t spread = db.m * db.bound / 40;
  std::vector<std::uint64_t> weights(db.m);
  for (std::size_t i = 0; i < db.n; ++i) {
    const std::uint64_t total =
        centre - spread + uniform_u64(rng, 0, 2 * spread);
    std::uint64_t wsum = 0;
    for (auto& w : weights) {
      w = uniform_u64(rng, 1, 1000);
      wsum += w;
    }
    std::uint64_t placed = 0;
    for (std::size_t j = 0; j < db.m; ++j) {
      const std::uint64_t v = std::min(total * weights[j] / wsum, db.bound);
      db.values[i * db.m + j] = v;
      placed += v;
    }
    // Hand what clamping and rounding dropped to attributes with room, so
    // the row sum is exactly `total` (always possible: total < m * B).
    std::uint64_t rest = total - placed;
    for (std::size_t j = 0; rest > 0 && j < db.m; ++j) {
      std::uint64_t& v = db.values[i * db.m + j];
      const std::uint64_t add = std::min(rest, db.bound - v);
      v += add;
      rest -= add;
    }
  }
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
    return s.substr(1, s.size() - 2);
  }
  return s;
}

}  // namespace

PlainDatabase generate(const DatasetSpec& spec) {
  spec.validate();
  if (spec.kind == DatasetKind::kCsv) return load_csv(spec.csv_path, spec.scale);
  PlainDatabase db;
  db.n = spec.n;
  db.m = spec.m;
  db.bound = spec.bound;
  db.scale = spec.scale;
  db.values.assign(spec.n * spec.m, 0);
  std::mt19937_64 rng(spec.seed);
  switch (spec.kind) {
    case DatasetKind::kInde:
      fill_inde(db, rng);
      break;
    case DatasetKind::kCorr:
      fill_corr(db, rng);
      break;
    case DatasetKind::kAnti:
      fill_anti(db, rng);
      break;
    case DatasetKind::kCsv:
      break;
  }
  return db;
}

PlainDatabase load_csv(const std::filesystem::path& path, std::uint32_t scale,
                       std::vector<std::string>* header) {
  if (scale == 0) throw InvalidArgument("scale must be positive");
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());

  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> names;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) {
      names = split_commas(line);
      break;
    }
  }
  if (names.empty()) throw ParseError(path.string() + ": empty file");
  for (auto& name : names) name = unquote(name);

  PlainDatabase db;
  db.m = names.size();
  db.scale = scale;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string> cells = split_commas(line);
    if (cells.size() != db.m) {
      throw ParseError(path.string() + ": row " + std::to_string(line_no) +
                       " has " + std::to_string(cells.size()) +
                       " cells, expected " + std::to_string(db.m));
    }
    for (std::size_t j = 0; j < db.m; ++j) {
      const std::string where = path.string() + ": row " +
                                std::to_string(line_no) + ", column " +
                                std::to_string(j + 1) + " (" + names[j] + ")";
      const std::string& cell = cells[j];
      if (cell.empty()) throw ParseError(where + ": missing value");
      char* end = nullptr;
      errno = 0;
      const double v = std::strtod(cell.c_str(), &end);
      if (end != cell.c_str() + cell.size() || errno == ERANGE ||
          !std::isfinite(v)) {
        throw ParseError(where + ": not a number: '" + cell + "'");
      }
      const double scaled = std::round(v * scale);
      if (scaled < 0) throw ParseError(where + ": negative value " + cell);
      if (scaled > 9.0e15) throw ParseError(where + ": value too large " + cell);
      const auto value = static_cast<std::uint64_t>(scaled);
      db.values.push_back(value);
      db.bound = std::max(db.bound, value);
    }
    ++db.n;
  }
  if (db.n == 0) throw ParseError(path.string() + ": no data rows");
  if (header) *header = names;
  return db;
}

void write_csv(const std::filesystem::path& path, const PlainDatabase& db,
               const std::vector<std::string>& header) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  for (std::size_t j = 0; j < db.m; ++j) {
    if (j) out << ',';
    if (j < header.size()) {
      out << header[j];
    } else {
      out << 'a' << (j + 1);
    }
  }
  out << '\n';
  for (std::size_t i = 0; i < db.n; ++i) {
    for (std::size_t j = 0; j < db.m; ++j) {
      if (j) out << ',';
      out << db.values[i * db.m + j];
    }
    out << '\n';
  }
  if (!out) throw Error("write failed for " + path.string());
}

Tuple parse_tuple(const std::string& text) {
  Tuple out;
  for (const auto& cell : split_commas(text)) {
    if (cell.empty()) throw InvalidArgument("empty value in '" + text + "'");
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(cell, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != cell.size() || cell[0] == '-') {
      throw InvalidArgument("not a non-negative integer: '" + cell + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) throw InvalidArgument("empty tuple");
  return out;
}

}  // namespace skyshare
