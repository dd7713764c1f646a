#pragma once

// Long-running server roles and the query client.
//
// Each server listens on one port. A client connects to both servers and
// sends each its query share. Server 1 then dials server 2 with a hello
// frame naming the session and the randomness segment to use; server 2
// pairs that hello with the client connection carrying the same session id.
// Every session runs on its own thread, and a failing session never takes
// the server down.

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <thread>
#include <vector>

#include "skyshare/channel.h"
#include "skyshare/party.h"
#include "skyshare/plaintext.h"
#include "skyshare/randomness.h"
#include "skyshare/skyline.h"

namespace skyshare {

inline constexpr std::uint8_t kProtocolVersion = 1;

struct ServerConfig {
  PartyId party = PartyId::kFirst;
  Endpoint listen{"127.0.0.1", 0};
  // Where server 2 listens; only server 1 dials.
  Endpoint peer;
  std::shared_ptr<const PartyDatabase> db;
  std::shared_ptr<const PartyPool> pool;
  // Randomness reserved per session; session i uses segment i.
  PoolCounts segment;
  Latency latency{0};
  MultiBaMode mode = MultiBaMode::kDaBit;
  std::chrono::milliseconds peer_timeout{5000};
  // How long server 2 holds one half of a session (client query or peer
  // hello) waiting for the other half.
  std::chrono::milliseconds pair_timeout{5000};
  // Called after each finished session (from the session thread).
  std::function<void(const SessionMetrics&)> on_session;
  // Called with a one-line message when a session fails.
  std::function<void(const std::string&)> on_error;
};

class Server {
 public:
  explicit Server(ServerConfig config);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  // Binds and starts accepting. Returns the bound port.
  std::uint16_t start();
  // Stops accepting, aborts live sessions and joins every thread.
  void stop();

  std::uint16_t port() const { return port_; }
  std::size_t sessions_completed() const { return completed_.load(); }
  std::size_t sessions_failed() const { return failed_.load(); }

 private:
  struct Pending {
    std::unique_ptr<Channel> client;
    std::vector<Word> query;
    std::unique_ptr<Channel> peer;
    std::uint64_t segment = 0;
    bool has_client = false;
    bool has_peer = false;
  };

  void accept_loop();
  void handle(int fd);
  void run_first(std::uint32_t session, std::unique_ptr<Channel> client,
                 std::vector<Word> query);
  void run_session(std::uint32_t session, Channel& client,
                   std::vector<Word> query, Channel& peer,
                   std::uint64_t segment);
  void fail(const std::string& what);
  void track(Channel* ch, bool add);

  ServerConfig config_;
  std::unique_ptr<TcpListener> listener_;
  std::uint16_t port_ = 0;
  std::atomic<bool> stopping_{false};
  std::thread acceptor_;
  std::mutex mu_;
  std::condition_variable paired_;
  std::vector<std::thread> workers_;
  std::map<std::uint32_t, Pending> pending_;
  std::set<Channel*> live_;
  std::atomic<std::uint64_t> next_segment_{0};
  std::atomic<std::size_t> completed_{0};
  std::atomic<std::size_t> failed_{0};
};

struct ClientConfig {
  Endpoint server1;
  Endpoint server2;
  Ring ring{64};
  Word vmax = 0;  // 0 means default_vmax(ring)
  std::chrono::milliseconds connect_timeout{2000};
  std::uint64_t seed = 0;  // 0 draws the sharing randomness from the OS
};

struct ClientResult {
  std::uint32_t session = 0;
  std::vector<Tuple> rows;
};

// Connects to both servers first; if either is unreachable nothing is sent.
ClientResult client_query(const ClientConfig& config, const Tuple& q);

}  // namespace skyshare
