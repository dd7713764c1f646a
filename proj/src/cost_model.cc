#include "skyshare/cost_model.h"

#include <algorithm>
#include <vector>

#include "skyshare/errors.h"
#include "skyshare/gadgets.h"

namespace skyshare {

namespace {

class Tally {
 public:
  Tally(const Ring& ring, MultiBaMode mode)
      : l_(ring.bits()),
        wb_(ring.word_bytes()),
        plan_(PpaPlan::for_width(ring.bits())),
        mode_(mode) {}

  void sec_ext(std::uint64_t n) {
    if (n == 0) return;
    cost.secext += n;
    cost.rounds += plan_.rounds;
    cost.bytes += 2 * plan_.and_words * n * wb_;
    cost.randomness.binary_triples += plan_.and_words * n;
  }

  void b2a(std::uint64_t n) {
    ++cost.rounds;
    cost.bytes += ceil_div(n, l_) * wb_;
    cost.randomness.dabits += n;
  }

  void mul(std::uint64_t n) {
    ++cost.rounds;
    cost.bytes += 2 * n * wb_;
    cost.randomness.arith_triples += n;
  }

  void select(std::uint64_t n, std::uint64_t width) {
    if (n == 0) return;
    if (mode_ == MultiBaMode::kTwoMessage) {
      ++cost.rounds;
      cost.bytes += 4 * n * width * wb_;
      return;
    }
    b2a(n);
    mul(n * width);
  }

  void and_bits(std::uint64_t bits) {
    if (bits == 0) return;
    ++cost.rounds;
    const std::uint64_t words = ceil_div(bits, l_);
    cost.bytes += 2 * words * wb_;
    cost.randomness.binary_triples += words;
  }

  void open_bit() {
    ++cost.rounds;
    cost.bytes += wb_;
  }

  QueryCost cost;

 private:
  std::uint64_t l_;
  std::uint64_t wb_;
  PpaPlan plan_;
  MultiBaMode mode_;
};

// Bits ANDed at each level of the per-tuple tree over m columns.
std::vector<std::uint64_t> and_tree_bits(std::uint64_t n, std::uint64_t m) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t cols = m; cols > 1; cols = cols / 2 + cols % 2) {
    out.push_back(n * (cols / 2));
  }
  return out;
}

void check_shape(std::uint64_t n, std::uint64_t m) {
  if (n == 0 || m == 0) {
    throw InvalidArgument("query cost needs n >= 1 and m >= 1");
  }
}

}  // namespace

std::uint64_t secext_count(std::uint64_t n, std::uint64_t m, std::uint64_t k) {
  return n * m + k * n * (2 + m) + n;
}

QueryCost predict_query_cost(std::uint64_t n, std::uint64_t m, const Ring& ring,
                             std::uint64_t k, MultiBaMode mode) {
  check_shape(n, m);
  Tally t(ring, mode);
  t.cost.randomness.sentinels = 1;

  // Mapping.
  t.sec_ext(n * m);
  t.select(n * m, 1);

  const std::vector<std::uint64_t> tree = and_tree_bits(n, m);
  const std::uint64_t prefix_levels = ceil_log2(n);
  const std::uint64_t flag_levels =
      std::max<std::uint64_t>(prefix_levels, tree.size());

  for (std::uint64_t loop = 0; loop <= k; ++loop) {
    // Fetch: tournament over n rows of [key | T row | P row].
    for (std::uint64_t count = n; count > 1; count = count / 2 + count % 2) {
      t.sec_ext(count / 2);
      t.select(count / 2, 1 + 2 * m);
    }
    // Stop check.
    t.sec_ext(1);
    t.open_bit();
    if (loop == k) break;

    // Filter.
    t.sec_ext(n + n * m);
    for (std::uint64_t r = 0; r < flag_levels; ++r) {
      std::uint64_t bits = r < prefix_levels ? n : 0;
      if (r < tree.size()) bits += tree[r];
      t.and_bits(bits);
    }
    t.and_bits(2 * n);
    t.select(n, 1);
  }
  return t.cost;
}

RoundBreakdown predict_rounds(std::uint64_t n, std::uint64_t m,
                              const Ring& ring, std::uint64_t k,
                              MultiBaMode mode) {
  check_shape(n, m);
  RoundBreakdown r;
  r.ext_rounds = PpaPlan::for_width(ring.bits()).rounds;
  r.select_rounds = mode == MultiBaMode::kTwoMessage ? 1 : 2;
  r.min_levels = ceil_log2(n);
  r.flag_rounds = std::max<std::uint64_t>(ceil_log2(n), ceil_log2(m)) + 1;
  const std::uint64_t per_compare = r.ext_rounds + r.select_rounds;
  r.total = per_compare +
            (k + 1) * (r.min_levels * per_compare + r.ext_rounds + 1) +
            k * (r.ext_rounds + r.flag_rounds + r.select_rounds);
  return r;
}

PoolCounts budget_for_query(std::uint64_t n, std::uint64_t m, const Ring& ring,
                            std::uint64_t k_max, MultiBaMode mode) {
  if (k_max == 0) {
    throw InvalidArgument("k_max must be at least 1 (one fetch round)");
  }
  return predict_query_cost(n, m, ring, k_max, mode).randomness;
}

}  // namespace skyshare
