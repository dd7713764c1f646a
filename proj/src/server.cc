#include "skyshare/server.h"

#include "skyshare/errors.h"
#include "skyshare/sharing.h"

namespace skyshare {

namespace {

constexpr std::size_t kHelloBytes = 1 + 1 + 8;

std::vector<std::uint8_t> encode_hello(const Ring& ring, std::uint64_t segment) {
  std::vector<std::uint8_t> out{kProtocolVersion,
                                static_cast<std::uint8_t>(ring.bits())};
  for (unsigned i = 0; i < 8; ++i) {
    out.push_back(static_cast<std::uint8_t>(segment >> (8 * i)));
  }
  return out;
}

std::uint64_t decode_hello(const Frame& f, const Ring& ring) {
  if (f.payload.size() != kHelloBytes) throw ProtocolError("malformed peer hello");
  if (f.payload[0] != kProtocolVersion) {
    throw ProtocolError("peer speaks protocol version " +
                        std::to_string(f.payload[0]) + ", expected " +
                        std::to_string(kProtocolVersion));
  }
  if (f.payload[1] != ring.bits()) {
    throw ProtocolError("peer runs l = " + std::to_string(f.payload[1]) +
                        ", this server l = " + std::to_string(ring.bits()));
  }
  std::uint64_t seg = 0;
  for (unsigned i = 0; i < 8; ++i) {
    seg |= std::uint64_t{f.payload[2 + i]} << (8 * i);
  }
  return seg;
}

std::vector<Word> decode_query(const Frame& f, const PartyDatabase& db) {
  std::vector<Word> q = unpack_words(f.payload, db.ring);
  if (q.size() != db.m) {
    throw ProtocolError("query carries " + std::to_string(q.size()) +
                        " values, database has m = " + std::to_string(db.m));
  }
  return q;
}

}  // namespace

Server::Server(ServerConfig config) : config_(std::move(config)) {
  if (!config_.db) throw InvalidArgument("server needs a share database");
  if (!config_.pool) throw InvalidArgument("server needs a randomness pool");
  if (config_.pool->ring != config_.db->ring) {
    throw InvalidArgument("pool and share file use different ring widths");
  }
  if (config_.pool->party != config_.party || config_.db->party != config_.party) {
    throw InvalidArgument("share file or pool belongs to the other party");
  }
}

Server::~Server() { stop(); }

std::uint16_t Server::start() {
  listener_ = std::make_unique<TcpListener>(config_.listen);
  port_ = listener_->port();
  acceptor_ = std::thread([this] { accept_loop(); });
  return port_;
}

void Server::stop() {
  if (stopping_.exchange(true)) return;
  if (listener_) listener_->close();
  if (acceptor_.joinable()) acceptor_.join();
  std::vector<std::thread> workers;
  {
    std::lock_guard lock(mu_);
    for (Channel* ch : live_) ch->close();
    pending_.clear();
    workers.swap(workers_);
  }
  paired_.notify_all();
  for (auto& t : workers) t.join();
}

void Server::accept_loop() {
  while (!stopping_) {
    int fd = -1;
    try {
      fd = listener_->accept_fd();
    } catch (const ChannelError&) {
      if (stopping_) return;
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
      continue;
    }
    std::lock_guard lock(mu_);
    if (stopping_) {
      make_tcp_channel(fd);  // closes the socket
      return;
    }
    workers_.emplace_back([this, fd] { handle(fd); });
  }
}

void Server::track(Channel* ch, bool add) {
  std::lock_guard lock(mu_);
  if (add) {
    live_.insert(ch);
  } else {
    live_.erase(ch);
  }
}

void Server::fail(const std::string& what) {
  ++failed_;
  if (config_.on_error) config_.on_error(what);
}

void Server::handle(int fd) {
  std::unique_ptr<Channel> ch = make_tcp_channel(fd);
  Frame first;
  try {
    track(ch.get(), true);
    first = ch->recv();
    track(ch.get(), false);
  } catch (const Error& e) {
    track(ch.get(), false);
    fail(std::string("connection dropped before its first frame: ") + e.what());
    return;
  }
  const std::uint32_t session = first.session;

  try {
    if (first.kind == MessageKind::kQuery) {
      std::vector<Word> q = decode_query(first, *config_.db);
      if (config_.party == PartyId::kFirst) {
        run_first(session, std::move(ch), std::move(q));
        return;
      }
      std::unique_lock lock(mu_);
      Pending& p = pending_[session];
      if (p.has_client) throw ProtocolError("duplicate query for session " + std::to_string(session));
      p.client = std::move(ch);
      p.query = std::move(q);
      p.has_client = true;
    } else if (first.kind == MessageKind::kRoundData &&
               config_.party == PartyId::kSecond) {
      const std::uint64_t seg = decode_hello(first, config_.db->ring);
      ch->set_latency(config_.latency);
      std::unique_lock lock(mu_);
      Pending& p = pending_[session];
      if (p.has_peer) throw ProtocolError("duplicate peer hello for session " + std::to_string(session));
      p.peer = std::move(ch);
      p.segment = seg;
      p.has_peer = true;
    } else {
      throw ProtocolError(std::string("unexpected opening frame ") +
                          to_string(first.kind));
    }
  } catch (const Error& e) {
    fail("session " + std::to_string(session) + ": " + e.what());
    return;
  }

  // Server 2: whichever connection completes the pair runs the session; the
  // other waits so that an unmatched half can be dropped after a timeout.
  Pending ready;
  {
    std::unique_lock lock(mu_);
    auto it = pending_.find(session);
    if (it == pending_.end()) return;
    if (!it->second.has_client || !it->second.has_peer) {
      const bool matched = paired_.wait_for(lock, config_.pair_timeout, [&] {
        return stopping_ || pending_.count(session) == 0;
      });
      if (!matched) {
        pending_.erase(session);  // closes the waiting connection
        lock.unlock();
        fail("session " + std::to_string(session) +
             ": the other half of the session never arrived");
      }
      return;
    }
    ready = std::move(it->second);
    pending_.erase(it);
    live_.insert(ready.client.get());
    live_.insert(ready.peer.get());
  }
  paired_.notify_all();
  run_session(session, *ready.client, std::move(ready.query), *ready.peer,
              ready.segment);
  track(ready.client.get(), false);
  track(ready.peer.get(), false);
}

void Server::run_first(std::uint32_t session, std::unique_ptr<Channel> client,
                       std::vector<Word> query) {
  const std::uint64_t seg = next_segment_++;
  std::unique_ptr<Channel> peer;
  try {
    peer = make_tcp_channel(tcp_connect(config_.peer, config_.peer_timeout),
                            config_.latency);
    peer->send(Frame{MessageKind::kRoundData, session,
                     encode_hello(config_.db->ring, seg)});
  } catch (const Error& e) {
    fail("session " + std::to_string(session) + ": peer unreachable: " + e.what());
    return;
  }
  track(client.get(), true);
  track(peer.get(), true);
  run_session(session, *client, std::move(query), *peer, seg);
  track(client.get(), false);
  track(peer.get(), false);
}

void Server::run_session(std::uint32_t session, Channel& client,
                         std::vector<Word> query, Channel& peer,
                         std::uint64_t segment) {
  try {
    std::unique_ptr<PoolCursor> cursor;
    if (config_.segment == PoolCounts{}) {
      if (segment != 0) throw RandomnessExhausted("pool has a single segment");
      cursor = std::make_unique<PoolCursor>(config_.pool);
    } else {
      cursor = std::make_unique<PoolCursor>(config_.pool, config_.segment * segment,
                                            config_.segment);
    }
    PartyOptions opts{config_.mode, false, false};
    PartyContext ctx(config_.party, config_.db->ring, peer, *cursor, os_seed(),
                     session, opts);
    ResultShares result = run_query(ctx, *config_.db, query);
    client.send(Frame{MessageKind::kResult, session,
                      encode_result(result, config_.db->ring)});
    client.close();
    peer.close();
    ++completed_;
    if (config_.on_session) config_.on_session(ctx.metrics());
  } catch (const Error& e) {
    client.close();
    peer.close();
    fail("session " + std::to_string(session) + ": " + e.what());
  }
}

ClientResult client_query(const ClientConfig& config, const Tuple& q) {
  const Word vmax = config.vmax != 0 ? config.vmax : default_vmax(config.ring);
  check_query(vmax, q);

  std::unique_ptr<Channel> c1, c2;
  try {
    c1 = make_tcp_channel(tcp_connect(config.server1, config.connect_timeout));
  } catch (const ChannelError& e) {
    throw ChannelError("server 1 unreachable: " + std::string(e.what()));
  }
  try {
    c2 = make_tcp_channel(tcp_connect(config.server2, config.connect_timeout));
  } catch (const ChannelError& e) {
    throw ChannelError("server 2 unreachable: " + std::string(e.what()));
  }

  Prg prg(config.seed == 0 ? os_seed() : derive_seed(config.seed, 3));
  std::uint32_t session = 0;
  while (session == 0) session = static_cast<std::uint32_t>(prg.next_u64());

  std::vector<Word> plain;
  for (auto v : q) plain.push_back(config.ring.encode(static_cast<std::int64_t>(v)));
  auto [q1, q2] = share_arith_vec(plain, config.ring, prg);
  c1->send(Frame{MessageKind::kQuery, session, pack_words(q1, config.ring)});
  c2->send(Frame{MessageKind::kQuery, session, pack_words(q2, config.ring)});

  auto receive = [&](Channel& ch, int which) {
    Frame f;
    try {
      f = ch.recv();
    } catch (const ChannelError& e) {
      throw ChannelError("server " + std::to_string(which) +
                         " closed the session without a result: " + e.what());
    }
    if (f.kind != MessageKind::kResult || f.session != session) {
      throw ProtocolError("server " + std::to_string(which) +
                          " sent an unexpected frame");
    }
    return decode_result(f.payload, q.size(), config.ring);
  };
  const ResultShares r1 = receive(*c1, 1);
  const ResultShares r2 = receive(*c2, 2);

  ClientResult out;
  out.session = session;
  out.rows = reconstruct_result(r1, r2, config.ring);
  return out;
}

}  // namespace skyshare
