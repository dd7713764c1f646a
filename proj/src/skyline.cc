#include "skyshare/skyline.h"

#include <array>
#include <cstring>
#include <fstream>

#include "skyshare/errors.h"
#include "skyshare/gadgets.h"
#include "skyshare/sharing.h"

namespace skyshare {

namespace {

constexpr char kShareMagic[5] = {'S', 'S', 'K', 'Y', '1'};

void put_le(std::vector<std::uint8_t>& out, std::uint64_t v, unsigned bytes) {
  for (unsigned i = 0; i < bytes; ++i) {
    out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
}

std::uint64_t get_le(const std::uint8_t* p, unsigned bytes) {
  std::uint64_t v = 0;
  for (unsigned i = 0; i < bytes; ++i) v |= std::uint64_t{p[i]} << (8 * i);
  return v;
}

// Concatenates bit vectors of the same packing width.
BitVec concat(std::initializer_list<const BitVec*> parts, unsigned width) {
  std::size_t total = 0;
  for (const BitVec* p : parts) total += p->size();
  BitVec out(total, width);
  std::size_t at = 0;
  for (const BitVec* p : parts) {
    out.write_at(at, *p);
    at += p->size();
  }
  return out;
}

BitVec slice(const BitVec& v, std::size_t from, std::size_t count) {
  return v.slice(from, count);
}

}  // namespace

Word default_vmax(const Ring& ring) {
  return vmax_from_exponent(ring, ring.bits() - 2);
}

Word vmax_from_exponent(const Ring& ring, unsigned exponent) {
  if (exponent == 0 || exponent > ring.bits() - 2) {
    throw InvalidArgument("vMAX exponent must be in [1, " +
                          std::to_string(ring.bits() - 2) + "], got " +
                          std::to_string(exponent));
  }
  return Word{1} << exponent;
}

void check_domain(const Ring& ring, Word vmax, std::size_t m,
                  std::uint64_t bound) {
  const Word limit = Word{1} << (ring.bits() - 2);
  if (vmax == 0 || vmax > limit) {
    throw InvalidArgument("vMAX must be in [1, 2^(l-2)]");
  }
  // m * bound < vmax, without overflowing.
  if (m == 0 || bound >= vmax || bound > (vmax - 1) / m) {
    throw InvalidArgument("attribute bound " + std::to_string(bound) +
                          " times m = " + std::to_string(m) +
                          " must stay below vMAX = " + std::to_string(vmax) +
                          " (use a wider ring or smaller values)");
  }
}

void check_query(Word vmax, std::span<const std::uint64_t> q) {
  if (q.empty()) throw InvalidArgument("empty query");
  for (auto v : q) {
    if (v >= vmax || v > (vmax - 1) / q.size()) {
      throw InvalidArgument("query value " + std::to_string(v) + " times m = " +
                            std::to_string(q.size()) +
                            " must stay below vMAX = " + std::to_string(vmax));
    }
  }
}

std::pair<PartyDatabase, PartyDatabase> share_database(const PlainDatabase& db,
                                                       const Ring& ring,
                                                       Prg& prg) {
  if (db.values.size() != db.n * db.m) {
    throw InvalidArgument("database shape does not match its values");
  }
  std::vector<Word> plain(db.values.begin(), db.values.end());
  for (auto v : plain) {
    if (v > static_cast<Word>(ring.max_signed())) {
      throw InvalidArgument("attribute " + std::to_string(v) +
                            " does not fit the ring");
    }
  }
  auto [s1, s2] = share_arith_vec(plain, ring, prg);
  PartyDatabase a{ring, PartyId::kFirst, db.n, db.m, db.scale, std::move(s1)};
  PartyDatabase b{ring, PartyId::kSecond, db.n, db.m, db.scale, std::move(s2)};
  return {std::move(a), std::move(b)};
}

void write_share_file(const std::filesystem::path& path,
                      const PartyDatabase& db) {
  if (db.m > 65535) throw InvalidArgument("m does not fit the share header");
  std::vector<std::uint8_t> out(kShareMagic, kShareMagic + 5);
  out.push_back(static_cast<std::uint8_t>(db.ring.bits()));
  put_le(out, db.n, 8);
  put_le(out, db.m, 2);
  out.push_back(static_cast<std::uint8_t>(db.party));
  put_le(out, db.scale, 4);
  const unsigned wb = db.ring.word_bytes();
  out.reserve(out.size() + db.shares.size() * wb);
  for (Word w : db.shares) put_le(out, w & db.ring.mask(), wb);

  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path.string());
  f.write(reinterpret_cast<const char*>(out.data()),
          static_cast<std::streamsize>(out.size()));
  if (!f) throw Error("write failed for " + path.string());
}

PartyDatabase read_share_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ParseError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                  std::istreambuf_iterator<char>());
  constexpr std::size_t kHeader = 5 + 1 + 8 + 2 + 1 + 4;
  if (bytes.size() < kHeader ||
      std::memcmp(bytes.data(), kShareMagic, 5) != 0) {
    throw ParseError(path.string() + ": not a share file");
  }
  PartyDatabase db;
  try {
    db.ring = Ring(bytes[5]);
    db.party = party_from_int(bytes[16]);
  } catch (const InvalidArgument& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  db.n = get_le(bytes.data() + 6, 8);
  db.m = get_le(bytes.data() + 14, 2);
  db.scale = static_cast<std::uint32_t>(get_le(bytes.data() + 17, 4));
  const unsigned wb = db.ring.word_bytes();
  const std::uint64_t count = db.n * db.m;
  if (db.n != 0 && count / db.n != db.m) {
    throw ParseError(path.string() + ": header sizes overflow");
  }
  if ((bytes.size() - kHeader) / wb != count ||
      (bytes.size() - kHeader) % wb != 0) {
    throw ParseError(path.string() + ": expected " + std::to_string(count) +
                     " values, file size disagrees");
  }
  db.shares.resize(count);
  const std::uint8_t* p = bytes.data() + kHeader;
  for (auto& w : db.shares) {
    w = get_le(p, wb);
    if (w & ~db.ring.mask()) throw ParseError(path.string() + ": value exceeds l bits");
    p += wb;
  }
  return db;
}

std::vector<Word> sec_map(PartyContext& ctx, const PartyDatabase& db,
                          std::span<const Word> q) {
  if (q.size() != db.m) {
    throw InvalidArgument("query has " + std::to_string(q.size()) +
                          " attributes, database has " + std::to_string(db.m));
  }
  const Ring& ring = ctx.ring();
  const std::size_t total = db.n * db.m;
  std::vector<Word> qrep(total);
  for (std::size_t i = 0; i < db.n; ++i) {
    std::copy(q.begin(), q.end(), qrep.begin() + static_cast<std::ptrdiff_t>(i * db.m));
  }
  const BitVec p_less = sec_ext(ctx, db.shares, qrep);
  const std::vector<Word> q_minus_p = sub_shares(qrep, db.shares, ring);
  const std::vector<Word> p_minus_q = sub_shares(db.shares, qrep, ring);
  return obliv_select(ctx, p_less, q_minus_p, p_minus_q, 1);
}

std::vector<Word> attribute_sums(std::span<const Word> t, std::size_t n,
                                 std::size_t m, const Ring& ring) {
  if (t.size() != n * m) throw InvalidArgument("attribute_sums: shape mismatch");
  std::vector<Word> s(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) s[i] = ring.add(s[i], t[i * m + j]);
  }
  return s;
}

FetchResult sec_fetch(PartyContext& ctx, std::span<const Word> s,
                      std::span<const Word> t, std::span<const Word> p,
                      std::size_t m) {
  const std::size_t n = s.size();
  if (n == 0) throw InvalidArgument("sec_fetch: empty database");
  if (t.size() != n * m || p.size() != n * m) {
    throw InvalidArgument("sec_fetch: shape mismatch");
  }
  std::vector<Word> payload(n * 2 * m);
  for (std::size_t i = 0; i < n; ++i) {
    std::copy_n(t.begin() + static_cast<std::ptrdiff_t>(i * m), m,
                payload.begin() + static_cast<std::ptrdiff_t>(i * 2 * m));
    std::copy_n(p.begin() + static_cast<std::ptrdiff_t>(i * m), m,
                payload.begin() + static_cast<std::ptrdiff_t>(i * 2 * m + m));
  }
  MinResult best = obliv_min_with_payload(ctx, s, payload, 2 * m);
  FetchResult out;
  out.s_min = best.key;
  out.t_star.assign(best.row.begin(), best.row.begin() + static_cast<std::ptrdiff_t>(m));
  out.p_star.assign(best.row.begin() + static_cast<std::ptrdiff_t>(m), best.row.end());
  return out;
}

std::vector<Word> sec_filt(PartyContext& ctx, std::span<const Word> t,
                           std::span<const Word> t_star, Word s_min,
                           std::span<const Word> s, Word vmax, std::size_t m,
                           FilterFlags* flags) {
  const std::size_t n = s.size();
  if (t.size() != n * m || t_star.size() != m) {
    throw InvalidArgument("sec_filt: shape mismatch");
  }
  const unsigned width = ctx.ring().bits();
  const PartyId me = ctx.id();

  // One batch: [sMin < s_i] for every i, then [t_i[j] < t*[j]] column by
  // column.
  std::vector<Word> lhs(n + n * m), rhs(n + n * m);
  for (std::size_t i = 0; i < n; ++i) {
    lhs[i] = s_min;
    rhs[i] = s[i];
    for (std::size_t j = 0; j < m; ++j) {
      lhs[n + j * n + i] = t[i * m + j];
      rhs[n + j * n + i] = t_star[j];
    }
  }
  const BitVec ext = sec_ext(ctx, lhs, rhs);

  const BitVec sigma = not_bits(slice(ext, 0, n), me);
  std::vector<BitVec> cols;
  for (std::size_t j = 0; j < m; ++j) {
    cols.push_back(not_bits(slice(ext, n + j * n, n), me));
  }

  // Exclusive prefix OR of sigma (Hillis-Steele) and the per-row AND over
  // the m columns, advanced together one level per round.
  BitVec before = sigma.shifted_up(1);
  std::size_t shift = 1;
  while (shift < n || cols.size() > 1) {
    const bool scan = shift < n;
    BitVec scan_in = scan ? before.shifted_up(shift) : BitVec(0, width);
    BitVec scan_x = scan ? before : BitVec(0, width);

    const std::size_t pairs = cols.size() / 2;
    BitVec tree_x(pairs * n, width), tree_y(pairs * n, width);
    for (std::size_t c = 0; c < pairs; ++c) {
      tree_x.write_at(c * n, cols[2 * c]);
      tree_y.write_at(c * n, cols[2 * c + 1]);
    }
    const BitVec z = and_beaver(ctx, concat({&scan_x, &tree_x}, width),
                                concat({&scan_in, &tree_y}, width));
    if (scan) {
      before = before ^ scan_in ^ slice(z, 0, n);
      shift *= 2;
    }
    if (pairs > 0) {
      std::vector<BitVec> next;
      for (std::size_t c = 0; c < pairs; ++c) {
        next.push_back(slice(z, scan_x.size() + c * n, n));
      }
      if (cols.size() % 2 == 1) next.push_back(cols.back());
      cols = std::move(next);
    }
  }
  const BitVec& all_le = cols[0];

  const BitVec not_before = not_bits(before, me);
  const BitVec not_sigma = not_bits(sigma, me);
  const BitVec z = and_beaver(ctx, concat({&sigma, &all_le}, width),
                              concat({&not_before, &not_sigma}, width));
  BitVec first_sky = slice(z, 0, n);
  BitVec dominated = slice(z, n, n);
  BitVec phi = first_sky ^ dominated;

  const std::vector<Word> vrep(n, vmax);
  std::vector<Word> next = obliv_select(ctx, phi, vrep, s, 1);
  if (flags) {
    flags->sigma = sigma;
    flags->first_sky = std::move(first_sky);
    flags->dominated = std::move(dominated);
    flags->phi = std::move(phi);
  }
  return next;
}

ResultShares run_query(PartyContext& ctx, const PartyDatabase& db,
                       std::span<const Word> q, QueryTrace* trace) {
  if (db.ring != ctx.ring()) throw InvalidArgument("database ring differs from session ring");
  if (db.n == 0) throw InvalidArgument("empty database");
  ctx.start_clock();
  SessionMetrics& metrics = ctx.metrics();
  metrics.n = db.n;
  metrics.m = db.m;
  metrics.complete = false;

  const Ring& ring = ctx.ring();
  const std::size_t n = db.n;
  const std::size_t m = db.m;
  const Word vmax = ctx.randomness().sentinel();

  std::vector<Word> t = sec_map(ctx, db, q);
  std::vector<Word> s = attribute_sums(t, n, m, ring);
  if (trace) {
    trace->vmax = vmax;
    trace->mapped = t;
    trace->sums = s;
    trace->loops.clear();
  }

  ResultShares result;
  result.m = m;
  for (std::size_t loop = 0;; ++loop) {
    if (loop > n) throw ProtocolError("query did not terminate after n + 1 fetches");
    LoopTrace* lt = nullptr;
    if (trace) {
      trace->loops.emplace_back();
      lt = &trace->loops.back();
      lt->s = s;
    }
    FetchResult fetched = sec_fetch(ctx, s, t, db.shares, m);

    const std::array<Word, 1> lhs{fetched.s_min}, rhs{vmax};
    const BitVec below = sec_ext(ctx, lhs, rhs);
    const unsigned stop = open_bits(ctx, not_bits(below, ctx.id()))[0];
    if (lt) {
      lt->fetch = fetched;
      lt->stop = stop;
    }
    if (stop) break;

    result.rows.insert(result.rows.end(), fetched.p_star.begin(),
                       fetched.p_star.end());
    ++result.k;
    s = sec_filt(ctx, t, fetched.t_star, fetched.s_min, s, vmax, m,
                 lt ? &lt->flags : nullptr);
    if (lt) {
      lt->filtered = true;
      lt->s_after = s;
    }
  }

  metrics.k = result.k;
  metrics.complete = true;
  ctx.stop_clock();
  return result;
}

std::vector<std::uint8_t> encode_result(const ResultShares& r,
                                        const Ring& ring) {
  if (r.rows.size() != r.k * r.m) throw InvalidArgument("result shape mismatch");
  std::vector<std::uint8_t> out;
  put_le(out, r.k, 4);
  const unsigned wb = ring.word_bytes();
  for (Word w : r.rows) put_le(out, w & ring.mask(), wb);
  return out;
}

ResultShares decode_result(std::span<const std::uint8_t> bytes, std::size_t m,
                           const Ring& ring) {
  if (bytes.size() < 4) throw ProtocolError("result stream too short");
  ResultShares r;
  r.m = m;
  r.k = get_le(bytes.data(), 4);
  const unsigned wb = ring.word_bytes();
  if (bytes.size() - 4 != r.k * m * wb) {
    throw ProtocolError("result stream length does not match k = " +
                        std::to_string(r.k));
  }
  r.rows.resize(r.k * m);
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    r.rows[i] = get_le(bytes.data() + 4 + i * wb, wb);
  }
  return r;
}

std::vector<Tuple> reconstruct_result(const ResultShares& a,
                                      const ResultShares& b, const Ring& ring) {
  if (a.k != b.k || a.m != b.m || a.rows.size() != b.rows.size()) {
    throw ProtocolError("the two result shares disagree on shape");
  }
  const std::vector<Word> plain = reconstruct_arith_vec(a.rows, b.rows, ring);
  std::vector<Tuple> out(a.k);
  for (std::size_t i = 0; i < a.k; ++i) {
    out[i].assign(plain.begin() + static_cast<std::ptrdiff_t>(i * a.m),
                  plain.begin() + static_cast<std::ptrdiff_t>((i + 1) * a.m));
  }
  return out;
}

}  // namespace skyshare
