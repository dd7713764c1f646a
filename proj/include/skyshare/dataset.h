#pragma once

// Synthetic workloads (independent, correlated, anti-correlated) and CSV
// ingestion of real tables.

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "skyshare/plaintext.h"

namespace skyshare {

enum class DatasetKind { kCorr, kInde, kAnti, kCsv };

const char* to_string(DatasetKind kind);
DatasetKind parse_dataset_kind(const std::string& text);

struct DatasetSpec {
  DatasetKind kind = DatasetKind::kInde;
  std::size_t n = 1000;
  std::size_t m = 2;
  std::uint64_t seed = 1;
  std::uint64_t bound = 1000;
  std::uint32_t scale = 1;
  std::filesystem::path csv_path;

  void validate() const;
};

// Deterministic for a fixed spec. All values are integers in [0, bound].
//   INDE: every attribute uniform on [0, B].
//   CORR: one uniform base per row, each attribute base + U[-B/20, B/20].
//   ANTI: per-row total near m*B/2 (within 5%), split by random weights;
//         whatever clamping cuts off is moved to attributes with room.
PlainDatabase generate(const DatasetSpec& spec);

// Header row required, comma-separated numeric cells. Each value is
// multiplied by `scale` and rounded. Errors name the row and column.
PlainDatabase load_csv(const std::filesystem::path& path, std::uint32_t scale,
                       std::vector<std::string>* header = nullptr);

// Values are written unscaled (as stored). Column names default to a1..am.
void write_csv(const std::filesystem::path& path, const PlainDatabase& db,
               const std::vector<std::string>& header = {});

// Uniform integer on [lo, hi] from a 64-bit engine, identical on every
// platform (std::uniform_int_distribution is not).
std::uint64_t uniform_u64(std::mt19937_64& rng, std::uint64_t lo,
                          std::uint64_t hi);

// A query tuple uniform on [0, bound]^m.
Tuple random_query(std::mt19937_64& rng, std::size_t m, std::uint64_t bound);

// Parses a "1,2,3" list.
Tuple parse_tuple(const std::string& text);

}  // namespace skyshare
