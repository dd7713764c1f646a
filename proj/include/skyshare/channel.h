#pragma once

// Ordered, reliable duplex message channels between the two servers (and
// between client and server), plus the wire framing they share.
//
// Frame layout on the wire:
//   u32 big-endian length of everything after this field
//   u8  message kind
//   u32 big-endian session id
//   payload (for protocol data: little-endian l-bit words)

#include <chrono>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "skyshare/ring.h"

namespace skyshare {

enum class MessageKind : std::uint8_t {
  kShareUpload = 1,
  kQuery = 2,
  kRoundData = 3,
  kOpenBit = 4,
  kResult = 5,
};

const char* to_string(MessageKind kind);

struct Frame {
  MessageKind kind = MessageKind::kRoundData;
  std::uint32_t session = 0;
  std::vector<std::uint8_t> payload;

  friend bool operator==(const Frame&, const Frame&) = default;
};

inline constexpr std::size_t kFrameHeaderBytes = 9;
inline constexpr std::size_t kMaxFrameBytes = std::size_t{1} << 30;

std::vector<std::uint8_t> encode_frame(const Frame& frame);
// Parses exactly one frame occupying all of `bytes`. Throws ChannelError on
// truncation, trailing bytes, unknown kinds, or a length over the limit.
Frame decode_frame(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> pack_words(std::span<const Word> words,
                                     const Ring& ring);
std::vector<Word> unpack_words(std::span<const std::uint8_t> bytes,
                               const Ring& ring);

using Latency = std::chrono::microseconds;

class Channel {
 public:
  virtual ~Channel() = default;
  virtual void send(Frame frame) = 0;
  // Blocks until the next frame arrives. Throws ChannelError if the peer
  // closed the channel or the transport failed.
  virtual Frame recv() = 0;
  // Wakes any blocked recv on either end.
  virtual void close() = 0;
  // Changes the delay applied to frames received from now on.
  virtual void set_latency(Latency latency) = 0;
};

// Two connected in-process endpoints. A frame becomes visible to the
// receiver `latency` after it was sent.
std::pair<std::unique_ptr<Channel>, std::unique_ptr<Channel>>
make_in_process_pair(Latency latency = Latency{0});

// ---- TCP -------------------------------------------------------------------

struct Endpoint {
  std::string host;
  std::uint16_t port = 0;
  std::string to_string() const;
};

// "host:port"
Endpoint parse_endpoint(const std::string& text);

class TcpListener {
 public:
  explicit TcpListener(const Endpoint& where);
  ~TcpListener();
  TcpListener(const TcpListener&) = delete;
  TcpListener& operator=(const TcpListener&) = delete;

  // The bound port (useful when listening on port 0).
  std::uint16_t port() const { return port_; }
  // Blocks for the next connection; returns the socket fd.
  int accept_fd();
  void close();

 private:
  int fd_ = -1;
  std::uint16_t port_ = 0;
};

// Connects with a bounded number of retries.
int tcp_connect(const Endpoint& where,
                std::chrono::milliseconds timeout = std::chrono::seconds(5));

// Frame channel over a connected socket. Sends go through a writer thread so
// both ends can push large flights at the same time without deadlocking.
// recv() applies the injected latency after each frame is read.
std::unique_ptr<Channel> make_tcp_channel(int fd, Latency latency = Latency{0});

// Loopback TCP pair within one process (for tests and transport checks).
std::pair<std::unique_ptr<Channel>, std::unique_ptr<Channel>>
make_tcp_loopback_pair(Latency latency = Latency{0});

}  // namespace skyshare
