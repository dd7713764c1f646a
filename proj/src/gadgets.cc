#include "skyshare/gadgets.h"

#include "skyshare/errors.h"
#include "skyshare/kernels.h"
#include "skyshare/sharing.h"

namespace skyshare {

namespace {

void require_rows(std::size_t values, std::size_t rows, std::size_t width,
                  const char* what) {
  if (values != rows * width) {
    throw InvalidArgument(std::string(what) + ": expected " +
                          std::to_string(rows) + " rows of width " +
                          std::to_string(width) + ", got " +
                          std::to_string(values) + " values");
  }
}

std::vector<Word> multi_ba_dabit(PartyContext& ctx, const BitVec& x,
                                 std::span<const Word> y, std::size_t width) {
  const std::vector<Word> xa = b2a(ctx, x);
  std::vector<Word> expanded(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < width; ++j) expanded[i * width + j] = xa[i];
  }
  return mul_beaver(ctx, expanded, y);
}

// Each party offers both candidates (x_i ^ c) * y_i - r_i for c in {0, 1};
// the peer keeps the candidate its own bit selects, which equals
// x * y_i - r_i. The sender keeps r_i.
std::vector<Word> multi_ba_two_message(PartyContext& ctx, const BitVec& x,
                                       std::span<const Word> y,
                                       std::size_t width) {
  const Ring& ring = ctx.ring();
  const std::size_t total = y.size();
  std::vector<Word> r(total);
  ctx.prg().fill(r, ring);

  std::vector<Word> msgs(2 * total);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const unsigned xi = x.get(i);
    for (std::size_t j = 0; j < width; ++j) {
      const std::size_t e = i * width + j;
      const Word zero = xi ? y[e] : 0;
      const Word one = xi ? 0 : y[e];
      msgs[e] = ring.sub(zero, r[e]);
      msgs[total + e] = ring.sub(one, r[e]);
    }
  }
  const std::vector<Word> theirs = ctx.exchange(OpenTag::kTwoMessage, msgs, 0);

  std::vector<Word> out(total);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const std::size_t base = x.get(i) ? total : 0;
    for (std::size_t j = 0; j < width; ++j) {
      const std::size_t e = i * width + j;
      out[e] = ring.add(r[e], theirs[base + e]);
    }
  }
  return out;
}

}  // namespace

PpaPlan PpaPlan::for_width(unsigned l) {
  Ring check(l);
  PpaPlan plan;
  plan.width = check.bits();
  unsigned span = 2;
  while (span < l - 1) {
    span *= 2;
    ++plan.extra_levels;
  }
  plan.rounds = 1 + plan.extra_levels;
  plan.and_words = 5;
  if (plan.extra_levels > 0) plan.and_words += 2 * (plan.extra_levels - 1) + 1;
  return plan;
}

BitVec sec_ext(PartyContext& ctx, std::span<const Word> a,
               std::span<const Word> b) {
  if (a.size() != b.size()) {
    throw InvalidArgument("sec_ext: operand lengths differ");
  }
  const Ring& ring = ctx.ring();
  const unsigned l = ring.bits();
  const Word mask = ring.mask();
  const std::size_t n = a.size();
  BitVec out(n, l);
  if (n == 0) return out;
  ctx.count_secext(n);

  const std::vector<Word> d = sub_shares(a, b, ring);
  const PpaPlan plan = PpaPlan::for_width(l);

  std::vector<Word> left(5 * n), right(5 * n);
  kernels::dispatch::ppa_first_level_operands(ctx.first(), d, left, right,
                                              mask);
  std::vector<Word> z = and_words(ctx, left, right);
  std::vector<Word> g(n), p(n);
  kernels::dispatch::ppa_first_level_combine(ctx.first(), d, z, g, p, mask);

  unsigned shift = 2;
  for (unsigned level = 1; level <= plan.extra_levels; ++level) {
    const bool with_p = level < plan.extra_levels;
    const std::size_t len = with_p ? 2 * n : n;
    left.resize(len);
    right.resize(len);
    kernels::dispatch::ppa_level_operands(g, p, shift, with_p, left, right,
                                          mask);
    z = and_words(ctx, left, right);
    kernels::dispatch::bin_xor(g, std::span<const Word>(z.data(), n), g);
    if (with_p) std::copy(z.begin() + n, z.begin() + 2 * n, p.begin());
    shift *= 2;
  }

  for (std::size_t i = 0; i < n; ++i) {
    out.set(i, static_cast<unsigned>(((d[i] >> (l - 1)) ^ (g[i] >> (l - 2))) &
                                     1U));
  }
  return out;
}

std::vector<Word> b2a(PartyContext& ctx, const BitVec& x) {
  const Ring& ring = ctx.ring();
  const std::size_t n = x.size();
  if (n == 0) return {};
  const DaBitBatch r = ctx.randomness().dabits(n);

  BitVec masked(n, ring.bits());
  for (std::size_t i = 0; i < n; ++i) {
    masked.set(i, x.get(i) ^ static_cast<unsigned>(r.rb[i] & 1U));
  }
  const std::vector<Word> theirs =
      ctx.exchange(OpenTag::kDabitMask, masked.words(), n);

  std::vector<Word> c(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Word word = masked.words()[i / ring.bits()] ^ theirs[i / ring.bits()];
    c[i] = (word >> (i % ring.bits())) & 1U;
  }
  std::vector<Word> out(n);
  kernels::dispatch::dabit_to_arith(ctx.first(), c, r.ra, out, ring.mask());
  return out;
}

std::vector<Word> multi_ba(PartyContext& ctx, const BitVec& x,
                           std::span<const Word> y, std::size_t width) {
  require_rows(y.size(), x.size(), width, "multi_ba");
  if (y.empty()) return {};
  if (ctx.options().mode == MultiBaMode::kTwoMessage) {
    return multi_ba_two_message(ctx, x, y, width);
  }
  return multi_ba_dabit(ctx, x, y, width);
}

std::vector<Word> obliv_select(PartyContext& ctx, const BitVec& phi,
                               std::span<const Word> u,
                               std::span<const Word> v, std::size_t width) {
  require_rows(u.size(), phi.size(), width, "obliv_select");
  require_rows(v.size(), phi.size(), width, "obliv_select");
  const Ring& ring = ctx.ring();
  if (u.empty()) return {};

  if (ctx.options().mode == MultiBaMode::kTwoMessage) {
    // phi * u + (not phi) * v as two products sharing one flight.
    const std::size_t n = phi.size();
    const BitVec not_phi = not_bits(phi, ctx.id());
    BitVec both(2 * n, phi.width());
    for (std::size_t i = 0; i < n; ++i) {
      both.set(i, phi.get(i));
      both.set(n + i, not_phi.get(i));
    }
    std::vector<Word> y(u.begin(), u.end());
    y.insert(y.end(), v.begin(), v.end());
    const std::vector<Word> prod = multi_ba(ctx, both, y, width);
    return add_shares(std::span<const Word>(prod.data(), u.size()),
                      std::span<const Word>(prod.data() + u.size(), u.size()),
                      ring);
  }

  // v + phi * (u - v)
  const std::vector<Word> diff = sub_shares(u, v, ring);
  const std::vector<Word> prod = multi_ba(ctx, phi, diff, width);
  return add_shares(v, prod, ring);
}

MinResult obliv_min_with_payload(PartyContext& ctx, std::span<const Word> keys,
                                 std::span<const Word> payload,
                                 std::size_t width) {
  const std::size_t n = keys.size();
  if (n == 0) throw InvalidArgument("obliv_min_with_payload: empty input");
  require_rows(payload.size(), n, width, "obliv_min_with_payload");

  const std::size_t row_width = 1 + width;
  std::vector<Word> rows(n * row_width);
  for (std::size_t i = 0; i < n; ++i) {
    rows[i * row_width] = keys[i];
    std::copy_n(payload.begin() + static_cast<std::ptrdiff_t>(i * width),
                width, rows.begin() + static_cast<std::ptrdiff_t>(i * row_width + 1));
  }

  std::size_t count = n;
  while (count > 1) {
    const std::size_t pairs = count / 2;
    std::vector<Word> left_keys(pairs), right_keys(pairs);
    std::vector<Word> left_rows(pairs * row_width), right_rows(pairs * row_width);
    for (std::size_t i = 0; i < pairs; ++i) {
      const Word* l = rows.data() + (2 * i) * row_width;
      const Word* r = rows.data() + (2 * i + 1) * row_width;
      left_keys[i] = l[0];
      right_keys[i] = r[0];
      std::copy_n(l, row_width, left_rows.data() + i * row_width);
      std::copy_n(r, row_width, right_rows.data() + i * row_width);
    }
    const BitVec right_smaller = sec_ext(ctx, right_keys, left_keys);
    std::vector<Word> next =
        obliv_select(ctx, right_smaller, right_rows, left_rows, row_width);
    if (count % 2 == 1) {
      const Word* last = rows.data() + (count - 1) * row_width;
      next.insert(next.end(), last, last + row_width);
    }
    rows = std::move(next);
    count = pairs + count % 2;
  }

  MinResult result;
  result.key = rows[0];
  result.row.assign(rows.begin() + 1, rows.begin() + static_cast<std::ptrdiff_t>(row_width));
  return result;
}

BitVec or_bits(PartyContext& ctx, const BitVec& x, const BitVec& y) {
  return x ^ y ^ and_beaver(ctx, x, y);
}

BitVec first_set_sequential(PartyContext& ctx, const BitVec& x) {
  const unsigned width = ctx.ring().bits();
  BitVec out(x.size(), width);
  BitVec seen(1, width);
  for (std::size_t i = 0; i < x.size(); ++i) {
    BitVec xi(1, width);
    xi.set(0, x.get(i));
    const BitVec hit = and_beaver(ctx, xi, not_bits(seen, ctx.id()));
    seen ^= hit;
    out.set(i, hit.get(0));
  }
  return out;
}

BitVec first_set_prefix(PartyContext& ctx, const BitVec& x) {
  BitVec before = x.shifted_up(1);
  for (std::size_t s = 1; s < x.size(); s *= 2) {
    before = or_bits(ctx, before, before.shifted_up(s));
  }
  return and_beaver(ctx, x, not_bits(before, ctx.id()));
}

std::vector<unsigned> open_bits(PartyContext& ctx, const BitVec& x) {
  const std::vector<Word> theirs =
      ctx.exchange(OpenTag::kStopBit, x.words(), 0);
  BitVec joined = x;
  for (std::size_t i = 0; i < theirs.size(); ++i) joined.words()[i] ^= theirs[i];
  return joined.to_bits();
}

}  // namespace skyshare
