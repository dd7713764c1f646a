// skyshare: dataset generation, dealing, servers, client queries,
// verification sweeps and metric sweeps.

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "skyshare/cost_model.h"
#include "skyshare/dataset.h"
#include "skyshare/errors.h"
#include "skyshare/plaintext.h"
#include "skyshare/runtime.h"
#include "skyshare/server.h"
#include "skyshare/skyline.h"

namespace fs = std::filesystem;
using namespace skyshare;

namespace {

// Exit codes, one per failure class.
enum Exit : int {
  kOk = 0,
  kMismatch = 1,
  kUsage = 2,
  kIo = 3,
  kParse = 4,
  kNetwork = 5,
  kProtocol = 6,
};

struct Globals {
  unsigned l = 64;
  unsigned vmax_exp = 0;  // 0 means l - 2
  double latency_ms = 1.0;
  std::uint64_t seed = 1;
  std::string mode = "dabit";
};

struct DataFlags {
  std::string kind = "inde";
  std::size_t n = 1000;
  std::size_t m = 2;
  std::uint64_t bound = 1000;
  std::string csv;
  std::uint32_t scale = 1;
};

void add_data_flags(CLI::App* cmd, DataFlags& d) {
  cmd->add_option("--kind", d.kind, "corr, inde, anti or csv")->capture_default_str();
  cmd->add_option("--n", d.n, "Tuples")->capture_default_str();
  cmd->add_option("--m", d.m, "Attributes")->capture_default_str();
  cmd->add_option("--bound", d.bound, "Attribute bound B")->capture_default_str();
  cmd->add_option("--csv", d.csv, "CSV input (implies --kind csv)");
  cmd->add_option("--scale", d.scale, "Fixed-point scale for CSV values")->capture_default_str();
}

DatasetSpec to_spec(const DataFlags& d, std::uint64_t seed) {
  DatasetSpec s;
  s.kind = d.csv.empty() ? parse_dataset_kind(d.kind) : DatasetKind::kCsv;
  s.n = d.n;
  s.m = d.m;
  s.bound = d.bound;
  s.seed = seed;
  s.scale = d.scale;
  s.csv_path = d.csv;
  s.validate();
  return s;
}

Ring ring_of(const Globals& g) { return Ring(g.l); }

Word vmax_of(const Globals& g) {
  const Ring ring = ring_of(g);
  return g.vmax_exp == 0 ? default_vmax(ring) : vmax_from_exponent(ring, g.vmax_exp);
}

Latency latency_of(const Globals& g) {
  if (g.latency_ms < 0) throw InvalidArgument("--latency-ms must be non-negative");
  return Latency(static_cast<std::int64_t>(g.latency_ms * 1000.0));
}

Seed seed_for(const Globals& g, std::uint64_t stream) {
  return g.seed == 0 ? os_seed() : derive_seed(g.seed, stream);
}

std::string format_row(const Tuple& row) {
  std::string s;
  for (std::size_t j = 0; j < row.size(); ++j) {
    if (j) s += ',';
    s += std::to_string(row[j]);
  }
  return s;
}

std::vector<std::size_t> parse_list(const std::string& text, const char* what) {
  std::vector<std::size_t> out;
  for (auto v : parse_tuple(text)) out.push_back(static_cast<std::size_t>(v));
  if (out.empty()) throw InvalidArgument(std::string("empty ") + what + " sweep");
  return out;
}

std::pair<Endpoint, Endpoint> parse_servers(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) {
    throw InvalidArgument("--servers takes host:port,host:port");
  }
  return {parse_endpoint(text.substr(0, comma)), parse_endpoint(text.substr(comma + 1))};
}

// ---- gen -------------------------------------------------------------------

int cmd_gen(const Globals& g, const DataFlags& d, const std::string& out) {
  const DatasetSpec spec = to_spec(d, g.seed);
  const PlainDatabase db = generate(spec);
  write_csv(out, db);
  std::cout << "wrote " << db.n << " x " << db.m << " " << to_string(spec.kind)
            << " tuples to " << out << "\n";
  return kOk;
}

// ---- deal ------------------------------------------------------------------

struct DealFlags {
  std::string out_dir;
  std::size_t queries = 1;
  std::size_t k_max = 0;  // 0 means n
};

int cmd_deal(const Globals& g, const DataFlags& d, const DealFlags& f) {
  const Ring ring = ring_of(g);
  const Word vmax = vmax_of(g);
  const MultiBaMode mode = parse_multiba_mode(g.mode);
  if (f.queries == 0) throw InvalidArgument("--queries must be at least 1");
  const PlainDatabase db = generate(to_spec(d, g.seed));
  check_domain(ring, vmax, db.m, db.bound);
  const std::size_t k_max = f.k_max == 0 ? db.n : f.k_max;

  Prg share_prg(seed_for(g, 2));
  auto [s1, s2] = share_database(db, ring, share_prg);
  const PoolCounts per_query = budget_for_query(db.n, db.m, ring, k_max, mode);
  Prg dealer(seed_for(g, 1));
  auto [p1, p2] = deal_pools(ring, vmax, per_query * f.queries, dealer);

  fs::create_directories(f.out_dir);
  const fs::path dir(f.out_dir);
  write_share_file(dir / "shares1.bin", s1);
  write_share_file(dir / "shares2.bin", s2);
  write_pool(dir / "pool1.bin", p1);
  write_pool(dir / "pool2.bin", p2);
  std::cout << "dealt n=" << db.n << " m=" << db.m << " l=" << ring.bits()
            << " for " << f.queries << " queries (k_max " << k_max << ") into "
            << dir.string() << "\n";
  return kOk;
}

// ---- serve -----------------------------------------------------------------

std::atomic<bool> g_stop{false};

extern "C" void on_signal(int) { g_stop = true; }

struct ServeFlags {
  int party = 1;
  std::string listen = "127.0.0.1:0";
  std::string peer;
  std::string shares;
  std::string pool;
  std::size_t k_max = 0;
  std::size_t sessions = 0;  // 0 = run until signalled
  std::string metrics_csv;
};

int cmd_serve(const Globals& g, const ServeFlags& f) {
  const PartyId party = party_from_int(f.party);
  const MultiBaMode mode = parse_multiba_mode(g.mode);
  const Endpoint listen = parse_endpoint(f.listen);
  Endpoint peer;
  if (party == PartyId::kFirst) {
    if (f.peer.empty()) throw InvalidArgument("server 1 needs --peer");
    peer = parse_endpoint(f.peer);
  }

  auto db = std::make_shared<PartyDatabase>(read_share_file(f.shares));
  auto pool = std::make_shared<PartyPool>(read_pool(f.pool));
  if (db->ring.bits() != g.l) {
    throw InvalidArgument("share file uses l = " + std::to_string(db->ring.bits()) +
                          ", --l is " + std::to_string(g.l));
  }
  const std::size_t k_max = f.k_max == 0 ? db->n : f.k_max;
  const PoolCounts segment = budget_for_query(db->n, db->m, db->ring, k_max, mode);
  if (!pool->counts().covers(segment)) {
    throw InvalidArgument("pool holds less than one query's randomness for k_max " +
                          std::to_string(k_max));
  }

  std::mutex out_mu;
  std::ofstream csv;
  if (!f.metrics_csv.empty()) {
    const bool fresh = !fs::exists(f.metrics_csv) || fs::file_size(f.metrics_csv) == 0;
    csv.open(f.metrics_csv, std::ios::app);
    if (!csv) throw Error("cannot open " + f.metrics_csv);
    if (fresh) csv << metrics_csv_header() << "\n" << std::flush;
  }

  ServerConfig cfg;
  cfg.party = party;
  cfg.listen = listen;
  cfg.peer = peer;
  cfg.db = db;
  cfg.pool = pool;
  cfg.segment = segment;
  cfg.latency = latency_of(g);
  cfg.mode = mode;
  cfg.on_session = [&](const SessionMetrics& m) {
    std::lock_guard lock(out_mu);
    std::cerr << "session " << m.session << ": k=" << m.k << " rounds=" << m.rounds
              << " secext=" << m.secext << " bytes_tx=" << m.bytes_tx << "\n";
    if (csv.is_open()) csv << metrics_csv_row(m) << "\n" << std::flush;
  };
  cfg.on_error = [&](const std::string& what) {
    std::lock_guard lock(out_mu);
    std::cerr << "skyshare serve: " << what << "\n";
  };

  Server server(cfg);
  const std::uint16_t port = server.start();
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::cout << "server " << f.party << " listening on " << listen.host << ":" << port
            << std::endl;
  while (!g_stop) {
    if (f.sessions > 0 &&
        server.sessions_completed() + server.sessions_failed() >= f.sessions) {
      break;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
  server.stop();
  return kOk;
}

// ---- query -----------------------------------------------------------------

int cmd_query(const Globals& g, const std::string& servers, const std::string& q_text) {
  const auto [e1, e2] = parse_servers(servers);
  const Tuple q = parse_tuple(q_text);
  ClientConfig cfg;
  cfg.server1 = e1;
  cfg.server2 = e2;
  cfg.ring = ring_of(g);
  cfg.vmax = vmax_of(g);
  cfg.seed = g.seed;
  const ClientResult r = client_query(cfg, q);
  for (const auto& row : r.rows) std::cout << format_row(row) << "\n";
  return kOk;
}

// ---- verify ----------------------------------------------------------------

struct VerifyFlags {
  std::size_t queries = 100;
  std::string servers;  // empty = in-process
  bool tcp = false;
};

int cmd_verify(const Globals& g, const DataFlags& d, const VerifyFlags& f) {
  if (f.queries == 0) throw InvalidArgument("--queries must be at least 1");
  const Ring ring = ring_of(g);
  const Word vmax = vmax_of(g);
  const MultiBaMode mode = parse_multiba_mode(g.mode);
  const Latency latency = latency_of(g);
  std::pair<Endpoint, Endpoint> servers;
  if (!f.servers.empty()) servers = parse_servers(f.servers);

  const PlainDatabase db = generate(to_spec(d, g.seed));
  check_domain(ring, vmax, db.m, db.bound);
  std::mt19937_64 rng(g.seed * 7919 + 3);
  const std::uint64_t qmax = std::min<std::uint64_t>(db.bound, (vmax - 1) / db.m);

  std::size_t matched = 0;
  for (std::size_t i = 0; i < f.queries; ++i) {
    const Tuple q = random_query(rng, db.m, qmax);
    std::vector<Tuple> rows;
    if (f.servers.empty()) {
      LocalRunOptions o;
      o.ring = ring;
      o.vmax = vmax;
      o.seed = g.seed * 1000003 + i;
      o.mode = mode;
      o.latency = latency;
      o.transport = f.tcp ? Transport::kTcp : Transport::kInProcess;
      rows = run_local_query(db, q, o).rows;
    } else {
      ClientConfig c;
      c.server1 = servers.first;
      c.server2 = servers.second;
      c.ring = ring;
      c.vmax = vmax;
      c.seed = g.seed == 0 ? 0 : g.seed * 1000003 + i;
      rows = client_query(c, q).rows;
    }
    const bool ok = same_rows(rows, plaintext_skyline(db, q));
    matched += ok;
    if (!ok) std::cerr << "mismatch on query " << format_row(q) << "\n";
  }
  const double rate = 100.0 * static_cast<double>(matched) / static_cast<double>(f.queries);
  std::printf("matched %zu/%zu (%.2f%%)\n", matched, f.queries, rate);
  return matched == f.queries ? kOk : kMismatch;
}

// ---- bench -----------------------------------------------------------------

struct BenchFlags {
  std::string kinds = "inde";
  std::string ns = "1000";
  std::string ms = "2";
  std::size_t queries = 1;
  std::string out;
  bool tcp = false;
};

int cmd_bench(const Globals& g, DataFlags d, const BenchFlags& f) {
  const Ring ring = ring_of(g);
  const Word vmax = vmax_of(g);
  const MultiBaMode mode = parse_multiba_mode(g.mode);
  const Latency latency = latency_of(g);
  const auto ns = parse_list(f.ns, "n");
  const auto ms = parse_list(f.ms, "m");
  std::vector<std::string> kinds;
  {
    std::stringstream in(f.kinds);
    std::string k;
    while (std::getline(in, k, ',')) {
      if (!k.empty()) kinds.push_back(k);
    }
  }
  if (kinds.empty()) throw InvalidArgument("empty dataset sweep");
  for (const auto& k : kinds) parse_dataset_kind(k);
  if (f.queries == 0) throw InvalidArgument("--queries must be at least 1");

  std::ofstream file;
  if (!f.out.empty()) {
    file.open(f.out);
    if (!file) throw Error("cannot open " + f.out);
  }
  std::ostream& out = f.out.empty() ? std::cout : file;
  out << "dataset," << metrics_csv_header() << "\n";

  bool formula_ok = true;
  std::uint32_t session = 1;
  for (const auto& kind : kinds) {
    for (std::size_t n : ns) {
      for (std::size_t m : ms) {
        d.kind = kind;
        d.csv.clear();
        d.n = n;
        d.m = m;
        const PlainDatabase db = generate(to_spec(d, g.seed));
        check_domain(ring, vmax, m, db.bound);
        std::mt19937_64 rng(g.seed * 31 + n * 7 + m);
        for (std::size_t i = 0; i < f.queries; ++i) {
          LocalRunOptions o;
          o.ring = ring;
          o.vmax = vmax;
          o.seed = g.seed * 1000003 + session;
          o.session = session++;
          o.mode = mode;
          o.latency = latency;
          o.transport = f.tcp ? Transport::kTcp : Transport::kInProcess;
          const auto r = run_local_query(db, random_query(rng, m, db.bound), o);
          const SessionMetrics& met = r.party[0].metrics;
          if (met.secext != secext_count(n, m, met.k)) formula_ok = false;
          out << kind << "," << metrics_csv_row(met) << "\n" << std::flush;
        }
      }
    }
  }
  if (!formula_ok) {
    std::cerr << "skyshare bench: metered SecExt count differs from n*m + k*n*(2+m) + n\n";
    return kMismatch;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-server secure dynamic skyline queries over secret-shared data"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "Read options from a file of key = value lines");

  Globals g;
  app.add_option("--l", g.l, "Ring width in bits")->capture_default_str();
  app.add_option("--vmax-exp", g.vmax_exp, "Sentinel exponent e, vMAX = 2^e (default l-2)");
  app.add_option("--latency-ms", g.latency_ms, "Injected one-way latency between servers")
      ->capture_default_str();
  app.add_option("--seed", g.seed, "Seed for every random stream (0 = OS entropy)")
      ->capture_default_str();
  app.add_option("--mode", g.mode, "Bit-times-value product: dabit or two-message")
      ->capture_default_str();

  DataFlags data;
  std::string gen_out;
  auto* gen = app.add_subcommand("gen", "Generate a synthetic dataset as CSV");
  add_data_flags(gen, data);
  gen->add_option("--out", gen_out, "Output CSV")->required();

  DealFlags deal_flags;
  auto* deal = app.add_subcommand("deal", "Share a dataset and deal randomness pools");
  add_data_flags(deal, data);
  deal->add_option("--out-dir", deal_flags.out_dir, "Directory for the four files")->required();
  deal->add_option("--queries", deal_flags.queries, "Queries the pools must cover")
      ->capture_default_str();
  deal->add_option("--k-max", deal_flags.k_max, "Largest skyline per query (default n)");

  ServeFlags serve_flags;
  auto* serve = app.add_subcommand("serve", "Run one server");
  serve->add_option("--party", serve_flags.party, "1 or 2")->required();
  serve->add_option("--listen", serve_flags.listen, "host:port (port 0 picks one)")
      ->capture_default_str();
  serve->add_option("--peer", serve_flags.peer, "Server 2 endpoint (server 1 only)");
  serve->add_option("--shares", serve_flags.shares, "This party's share file")->required();
  serve->add_option("--pool", serve_flags.pool, "This party's randomness pool")->required();
  serve->add_option("--k-max", serve_flags.k_max, "Same value given to deal (default n)");
  serve->add_option("--sessions", serve_flags.sessions, "Exit after this many sessions");
  serve->add_option("--metrics-csv", serve_flags.metrics_csv, "Append session metrics here");

  std::string query_servers, query_q;
  auto* query = app.add_subcommand("query", "Query both servers and print the skyline");
  query->add_option("--servers", query_servers, "host:port,host:port")->required();
  query->add_option("--q", query_q, "Query tuple, e.g. 16,100")->required();

  VerifyFlags verify_flags;
  auto* verify = app.add_subcommand("verify", "Compare random queries with the cleartext engine");
  add_data_flags(verify, data);
  verify->add_option("--queries", verify_flags.queries, "Number of queries R")
      ->capture_default_str();
  verify->add_flag("--local", "Run both servers in this process (default)");
  verify->add_option("--servers", verify_flags.servers, "Use running servers instead");
  verify->add_flag("--tcp", verify_flags.tcp, "In-process run over loopback TCP");

  BenchFlags bench_flags;
  auto* bench = app.add_subcommand("bench", "Sweep n and m and emit metrics CSV");
  add_data_flags(bench, data);
  bench->add_option("--kinds", bench_flags.kinds, "Datasets, e.g. corr,inde,anti")
      ->capture_default_str();
  bench->add_option("--n-list", bench_flags.ns, "Values of n")->capture_default_str();
  bench->add_option("--m-list", bench_flags.ms, "Values of m")->capture_default_str();
  bench->add_option("--queries", bench_flags.queries, "Queries per cell")
      ->capture_default_str();
  bench->add_option("--out", bench_flags.out, "CSV output (default stdout)");
  bench->add_flag("--tcp", bench_flags.tcp, "Loopback TCP instead of in-process");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (verify->count("--local") > 0 && !verify_flags.servers.empty()) {
      throw InvalidArgument("--local and --servers are exclusive");
    }
    if (*gen) return cmd_gen(g, data, gen_out);
    if (*deal) return cmd_deal(g, data, deal_flags);
    if (*serve) return cmd_serve(g, serve_flags);
    if (*query) return cmd_query(g, query_servers, query_q);
    if (*verify) return cmd_verify(g, data, verify_flags);
    if (*bench) return cmd_bench(g, data, bench_flags);
  } catch (const InvalidArgument& e) {
    std::cerr << "skyshare: invalid argument: " << e.what() << "\n";
    return kUsage;
  } catch (const ParseError& e) {
    std::cerr << "skyshare: parse error: " << e.what() << "\n";
    return kParse;
  } catch (const ChannelError& e) {
    std::cerr << "skyshare: network error: " << e.what() << "\n";
    return kNetwork;
  } catch (const ProtocolError& e) {
    std::cerr << "skyshare: protocol error: " << e.what() << "\n";
    return kProtocol;
  } catch (const RandomnessExhausted& e) {
    std::cerr << "skyshare: protocol error: " << e.what() << "\n";
    return kProtocol;
  } catch (const Error& e) {
    std::cerr << "skyshare: I/O error: " << e.what() << "\n";
    return kIo;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "skyshare: I/O error: " << e.what() << "\n";
    return kIo;
  }
  return kUsage;
}
