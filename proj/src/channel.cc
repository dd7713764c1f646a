#include "skyshare/channel.h"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <bit>
#include <cerrno>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <mutex>
#include <optional>
#include <thread>

#include "skyshare/errors.h"

namespace skyshare {

const char* to_string(MessageKind kind) {
  switch (kind) {
    case MessageKind::kShareUpload:
      return "share-upload";
    case MessageKind::kQuery:
      return "query";
    case MessageKind::kRoundData:
      return "round-data";
    case MessageKind::kOpenBit:
      return "open-bit";
    case MessageKind::kResult:
      return "result";
  }
  return "unknown";
}

namespace {

void put_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

std::uint32_t get_be32(const std::uint8_t* p) {
  return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) |
         (std::uint32_t{p[2]} << 8) | std::uint32_t{p[3]};
}

bool valid_kind(std::uint8_t k) { return k >= 1 && k <= 5; }

}  // namespace

std::vector<std::uint8_t> encode_frame(const Frame& frame) {
  if (frame.payload.size() + 5 > kMaxFrameBytes) {
    throw ChannelError("frame payload too large: " +
                       std::to_string(frame.payload.size()) + " bytes");
  }
  std::vector<std::uint8_t> out;
  out.reserve(kFrameHeaderBytes + frame.payload.size());
  put_be32(out, static_cast<std::uint32_t>(frame.payload.size() + 5));
  out.push_back(static_cast<std::uint8_t>(frame.kind));
  put_be32(out, frame.session);
  out.insert(out.end(), frame.payload.begin(), frame.payload.end());
  return out;
}

Frame decode_frame(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kFrameHeaderBytes) {
    throw ChannelError("truncated frame header");
  }
  const std::uint32_t len = get_be32(bytes.data());
  if (len < 5) throw ChannelError("frame length below header size");
  if (len > kMaxFrameBytes) throw ChannelError("oversized frame");
  if (bytes.size() - 4 != len) {
    throw ChannelError(bytes.size() - 4 < len ? "truncated frame payload"
                                              : "trailing bytes after frame");
  }
  if (!valid_kind(bytes[4])) {
    throw ChannelError("unknown message kind " + std::to_string(bytes[4]));
  }
  Frame f;
  f.kind = static_cast<MessageKind>(bytes[4]);
  f.session = get_be32(bytes.data() + 5);
  f.payload.assign(bytes.begin() + kFrameHeaderBytes, bytes.end());
  return f;
}

std::vector<std::uint8_t> pack_words(std::span<const Word> words,
                                     const Ring& ring) {
  const unsigned wb = ring.word_bytes();
  std::vector<std::uint8_t> out(words.size() * wb);
  std::uint8_t* p = out.data();
  const Word mask = ring.mask();
  if constexpr (std::endian::native == std::endian::little) {
    if (wb == 8) {
      std::memcpy(p, words.data(), out.size());
      return out;
    }
    for (Word w : words) {
      w &= mask;
      std::memcpy(p, &w, wb);
      p += wb;
    }
  } else {
    for (Word w : words) {
      w &= mask;
      for (unsigned b = 0; b < wb; ++b) *p++ = static_cast<std::uint8_t>(w >> (8 * b));
    }
  }
  return out;
}

std::vector<Word> unpack_words(std::span<const std::uint8_t> bytes,
                               const Ring& ring) {
  const unsigned wb = ring.word_bytes();
  if (bytes.size() % wb != 0) {
    throw ChannelError("payload is not a whole number of " +
                       std::to_string(ring.bits()) + "-bit words");
  }
  std::vector<Word> out(bytes.size() / wb);
  const std::uint8_t* p = bytes.data();
  Word high = 0;
  if constexpr (std::endian::native == std::endian::little) {
    if (wb == 8) {
      std::memcpy(out.data(), p, bytes.size());
    } else {
      for (auto& w : out) {
        Word v = 0;
        std::memcpy(&v, p, wb);
        p += wb;
        w = v;
      }
    }
  } else {
    for (auto& w : out) {
      Word v = 0;
      for (unsigned b = 0; b < wb; ++b) v |= Word{*p++} << (8 * b);
      w = v;
    }
  }
  for (Word w : out) high |= w;
  if ((high & ~ring.mask()) != 0) {
    throw ChannelError("word exceeds the ring width");
  }
  return out;
}

// ---- in-process ------------------------------------------------------------

namespace {

using Clock = std::chrono::steady_clock;

struct Mailbox {
  std::mutex mu;
  std::condition_variable cv;
  std::deque<std::pair<Clock::time_point, Frame>> queue;
  bool closed = false;
};

class InProcessChannel : public Channel {
 public:
  InProcessChannel(std::shared_ptr<Mailbox> in, std::shared_ptr<Mailbox> out,
                   Latency latency)
      : in_(std::move(in)), out_(std::move(out)), latency_(latency) {}
  ~InProcessChannel() override { close(); }

  void send(Frame frame) override {
    {
      std::lock_guard lock(out_->mu);
      if (out_->closed) throw ChannelError("peer closed the channel");
      out_->queue.emplace_back(Clock::now() + latency_, std::move(frame));
    }
    out_->cv.notify_one();
  }

  Frame recv() override {
    std::unique_lock lock(in_->mu);
    in_->cv.wait(lock, [&] { return !in_->queue.empty() || in_->closed; });
    if (in_->queue.empty()) throw ChannelError("peer closed the channel");
    auto [due, frame] = std::move(in_->queue.front());
    in_->queue.pop_front();
    lock.unlock();
    if (latency_.count() > 0) std::this_thread::sleep_until(due);
    return std::move(frame);
  }

  void set_latency(Latency latency) override { latency_ = latency; }

  void close() override {
    for (auto* box : {in_.get(), out_.get()}) {
      {
        std::lock_guard lock(box->mu);
        box->closed = true;
      }
      box->cv.notify_all();
    }
  }

 private:
  std::shared_ptr<Mailbox> in_, out_;
  Latency latency_;
};

}  // namespace

std::pair<std::unique_ptr<Channel>, std::unique_ptr<Channel>>
make_in_process_pair(Latency latency) {
  auto a_to_b = std::make_shared<Mailbox>();
  auto b_to_a = std::make_shared<Mailbox>();
  return {std::make_unique<InProcessChannel>(b_to_a, a_to_b, latency),
          std::make_unique<InProcessChannel>(a_to_b, b_to_a, latency)};
}

// ---- TCP ---------------------------------------------------------------------

std::string Endpoint::to_string() const {
  return host + ":" + std::to_string(port);
}

Endpoint parse_endpoint(const std::string& text) {
  const auto colon = text.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == text.size()) {
    throw InvalidArgument("endpoint must be host:port, got '" + text + "'");
  }
  Endpoint e;
  e.host = text.substr(0, colon);
  const std::string port = text.substr(colon + 1);
  try {
    std::size_t used = 0;
    const unsigned long p = std::stoul(port, &used);
    if (used != port.size() || p > 65535) throw std::out_of_range("port");
    e.port = static_cast<std::uint16_t>(p);
  } catch (const std::exception&) {
    throw InvalidArgument("bad port in endpoint '" + text + "'");
  }
  return e;
}

namespace {

sockaddr_in resolve(const Endpoint& where) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  if (getaddrinfo(where.host.c_str(), nullptr, &hints, &res) != 0 ||
      res == nullptr) {
    throw ChannelError("cannot resolve host " + where.host);
  }
  sockaddr_in addr = *reinterpret_cast<sockaddr_in*>(res->ai_addr);
  freeaddrinfo(res);
  addr.sin_port = htons(where.port);
  return addr;
}

void write_all(int fd, const std::uint8_t* data, std::size_t len) {
  while (len > 0) {
    const ssize_t n = ::send(fd, data, len, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw ChannelError(std::string("send failed: ") + std::strerror(errno));
    }
    data += n;
    len -= static_cast<std::size_t>(n);
  }
}

// Returns false on orderly EOF before the first byte.
bool read_all(int fd, std::uint8_t* data, std::size_t len) {
  std::size_t got = 0;
  while (got < len) {
    const ssize_t n = ::recv(fd, data + got, len - got, 0);
    if (n == 0) {
      if (got == 0) return false;
      throw ChannelError("connection closed mid-frame");
    }
    if (n < 0) {
      if (errno == EINTR) continue;
      throw ChannelError(std::string("recv failed: ") + std::strerror(errno));
    }
    got += static_cast<std::size_t>(n);
  }
  return true;
}

class TcpChannel : public Channel {
 public:
  TcpChannel(int fd, Latency latency) : fd_(fd), latency_(latency) {
    int one = 1;
    ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
    writer_ = std::thread([this] { write_loop(); });
  }

  ~TcpChannel() override {
    {
      std::lock_guard lock(mu_);
      stopping_ = true;
    }
    cv_.notify_all();
    if (writer_.joinable()) writer_.join();
    ::shutdown(fd_, SHUT_RDWR);
    ::close(fd_);
  }

  void send(Frame frame) override {
    auto bytes = encode_frame(frame);
    {
      std::lock_guard lock(mu_);
      if (write_error_) throw ChannelError(*write_error_);
      if (stopping_) throw ChannelError("channel closed");
      outbox_.push_back(std::move(bytes));
    }
    cv_.notify_all();
  }

  Frame recv() override {
    std::uint8_t header[4];
    if (!read_all(fd_, header, 4)) throw ChannelError("peer closed the connection");
    const std::uint32_t len = get_be32(header);
    if (len < 5 || len > kMaxFrameBytes) {
      throw ChannelError("bad frame length " + std::to_string(len));
    }
    std::vector<std::uint8_t> buf(4 + len);
    std::memcpy(buf.data(), header, 4);
    if (!read_all(fd_, buf.data() + 4, len)) {
      throw ChannelError("connection closed mid-frame");
    }
    Frame f = decode_frame(buf);
    if (latency_.count() > 0) std::this_thread::sleep_for(latency_);
    return f;
  }

  void set_latency(Latency latency) override { latency_ = latency; }

  void close() override {
    // Let queued frames drain before the socket goes away.
    flush();
    ::shutdown(fd_, SHUT_RDWR);
  }

 private:
  void flush() {
    std::unique_lock lock(mu_);
    cv_.wait_for(lock, std::chrono::seconds(5), [&] {
      return (outbox_.empty() && !writing_) || write_error_;
    });
  }

  void write_loop() {
    std::unique_lock lock(mu_);
    for (;;) {
      cv_.wait(lock, [&] { return stopping_ || !outbox_.empty(); });
      if (outbox_.empty()) return;
      auto bytes = std::move(outbox_.front());
      outbox_.pop_front();
      writing_ = true;
      lock.unlock();
      try {
        write_all(fd_, bytes.data(), bytes.size());
      } catch (const ChannelError& e) {
        lock.lock();
        write_error_ = e.what();
        writing_ = false;
        cv_.notify_all();
        return;
      }
      lock.lock();
      writing_ = false;
      cv_.notify_all();
    }
  }

  int fd_;
  Latency latency_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<std::vector<std::uint8_t>> outbox_;
  bool writing_ = false;
  bool stopping_ = false;
  std::optional<std::string> write_error_;
  std::thread writer_;
};

}  // namespace

TcpListener::TcpListener(const Endpoint& where) {
  fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd_ < 0) throw ChannelError("socket() failed");
  int one = 1;
  ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  sockaddr_in addr = resolve(where);
  if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
    const std::string err = std::strerror(errno);
    ::close(fd_);
    throw ChannelError("cannot bind " + where.to_string() + ": " + err);
  }
  if (::listen(fd_, 64) != 0) {
    ::close(fd_);
    throw ChannelError("listen failed on " + where.to_string());
  }
  socklen_t len = sizeof(addr);
  ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

TcpListener::~TcpListener() { close(); }

int TcpListener::accept_fd() {
  for (;;) {
    const int fd = ::accept(fd_, nullptr, nullptr);
    if (fd >= 0) return fd;
    if (errno == EINTR) continue;
    throw ChannelError("accept failed: " + std::string(std::strerror(errno)));
  }
}

void TcpListener::close() {
  if (fd_ >= 0) {
    ::shutdown(fd_, SHUT_RDWR);
    ::close(fd_);
    fd_ = -1;
  }
}

int tcp_connect(const Endpoint& where, std::chrono::milliseconds timeout) {
  const sockaddr_in addr = resolve(where);
  const auto deadline = Clock::now() + timeout;
  for (;;) {
    const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) throw ChannelError("socket() failed");
    if (::connect(fd, reinterpret_cast<const sockaddr*>(&addr), sizeof(addr)) ==
        0) {
      return fd;
    }
    const std::string err = std::strerror(errno);
    ::close(fd);
    if (Clock::now() >= deadline) {
      throw ChannelError("cannot connect to " + where.to_string() + ": " + err);
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
}

std::unique_ptr<Channel> make_tcp_channel(int fd, Latency latency) {
  return std::make_unique<TcpChannel>(fd, latency);
}

std::pair<std::unique_ptr<Channel>, std::unique_ptr<Channel>>
make_tcp_loopback_pair(Latency latency) {
  TcpListener listener(Endpoint{"127.0.0.1", 0});
  int accepted = -1;
  std::thread t([&] { accepted = listener.accept_fd(); });
  int connected = -1;
  try {
    connected = tcp_connect(Endpoint{"127.0.0.1", listener.port()});
  } catch (...) {
    listener.close();
    t.join();
    throw;
  }
  t.join();
  return {make_tcp_channel(connected, latency),
          make_tcp_channel(accepted, latency)};
}

}  // namespace skyshare
