#include <gtest/gtest.h>

#include <chrono>
#include <random>
#include <thread>

#include "skyshare/channel.h"
#include "skyshare/errors.h"

namespace skyshare {
namespace {

Frame sample_frame(std::mt19937_64& rng, std::size_t len) {
  Frame f;
  f.kind = static_cast<MessageKind>(1 + rng() % 5);
  f.session = static_cast<std::uint32_t>(rng());
  f.payload.resize(len);
  for (auto& b : f.payload) b = static_cast<std::uint8_t>(rng());
  return f;
}

TEST(Framing, HeaderLayout) {
  Frame f{MessageKind::kQuery, 0x01020304, {0xaa, 0xbb}};
  const auto bytes = encode_frame(f);
  const std::vector<std::uint8_t> want{0, 0, 0, 7, 2, 1, 2, 3, 4, 0xaa, 0xbb};
  EXPECT_EQ(bytes, want);
  EXPECT_EQ(decode_frame(bytes), f);
}

TEST(Framing, RoundTripFuzz) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 500; ++i) {
    const Frame f = sample_frame(rng, rng() % 300);
    EXPECT_EQ(decode_frame(encode_frame(f)), f);
  }
}

TEST(Framing, RejectsDamagedFrames) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 200; ++i) {
    const Frame f = sample_frame(rng, 1 + rng() % 100);
    auto bytes = encode_frame(f);
    // Truncated anywhere.
    const std::size_t cut = rng() % bytes.size();
    EXPECT_THROW(decode_frame(std::span(bytes).first(cut)), ChannelError);
    // Trailing garbage.
    auto longer = bytes;
    longer.push_back(0);
    EXPECT_THROW(decode_frame(longer), ChannelError);
  }
  // Unknown kind.
  auto bytes = encode_frame(Frame{MessageKind::kResult, 1, {}});
  bytes[4] = 9;
  EXPECT_THROW(decode_frame(bytes), ChannelError);
  // Declared length over the limit.
  std::vector<std::uint8_t> huge{0x7f, 0xff, 0xff, 0xff, 3, 0, 0, 0, 0};
  EXPECT_THROW(decode_frame(huge), ChannelError);
  // Declared length shorter than the header.
  std::vector<std::uint8_t> tiny{0, 0, 0, 2, 3, 0, 0, 0, 0};
  EXPECT_THROW(decode_frame(tiny), ChannelError);
}

TEST(Framing, WordPacking) {
  const Ring ring(12);
  const std::vector<Word> w{0, 1, 0xfff, 0x123};
  const auto bytes = pack_words(w, ring);
  EXPECT_EQ(bytes, (std::vector<std::uint8_t>{0, 0, 1, 0, 0xff, 0x0f, 0x23, 0x01}));
  EXPECT_EQ(unpack_words(bytes, ring), w);
  auto bad = bytes;
  bad[5] = 0x10;  // bit 12 set
  EXPECT_THROW(unpack_words(bad, ring), ChannelError);
  bad.pop_back();
  EXPECT_THROW(unpack_words(bad, ring), ChannelError);
  const Ring wide(64);
  const std::vector<Word> big{~Word{0}, 0x0102030405060708};
  EXPECT_EQ(unpack_words(pack_words(big, wide), wide), big);
  EXPECT_EQ(pack_words(big, wide)[8], 0x08);
}

TEST(Endpoint, Parse) {
  const Endpoint e = parse_endpoint("127.0.0.1:9000");
  EXPECT_EQ(e.host, "127.0.0.1");
  EXPECT_EQ(e.port, 9000);
  EXPECT_EQ(e.to_string(), "127.0.0.1:9000");
  EXPECT_THROW(parse_endpoint("nohost"), InvalidArgument);
  EXPECT_THROW(parse_endpoint("h:99999"), InvalidArgument);
  EXPECT_THROW(parse_endpoint("h:abc"), InvalidArgument);
}

void exercise_pair(Channel& a, Channel& b) {
  std::mt19937_64 rng(3);
  std::vector<Frame> sent;
  for (int i = 0; i < 50; ++i) sent.push_back(sample_frame(rng, rng() % 5000));
  // Both sides push big flights at once; neither may block the other.
  std::thread t([&] {
    for (const auto& f : sent) b.send(f);
    for (const auto& f : sent) EXPECT_EQ(b.recv(), f);
  });
  for (const auto& f : sent) a.send(f);
  for (const auto& f : sent) EXPECT_EQ(a.recv(), f);
  t.join();
}

TEST(InProcessChannel, OrderedExactlyOnce) {
  auto [a, b] = make_in_process_pair();
  exercise_pair(*a, *b);
}

TEST(TcpChannel, OrderedExactlyOnce) {
  auto [a, b] = make_tcp_loopback_pair();
  exercise_pair(*a, *b);
}

TEST(TcpChannel, LargeSimultaneousFlights) {
  auto [a, b] = make_tcp_loopback_pair();
  const Frame big{MessageKind::kRoundData, 1, std::vector<std::uint8_t>(8 << 20, 7)};
  std::thread t([&] {
    b->send(big);
    EXPECT_EQ(b->recv().payload.size(), big.payload.size());
  });
  a->send(big);
  EXPECT_EQ(a->recv(), big);
  t.join();
}

TEST(Channel, CloseWakesReceiver) {
  for (int transport = 0; transport < 2; ++transport) {
    auto pair = transport == 0 ? make_in_process_pair() : make_tcp_loopback_pair();
    std::thread t([&] { EXPECT_THROW(pair.second->recv(), ChannelError); });
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
    pair.first->close();
    t.join();
  }
}

TEST(Channel, LatencyDelaysDelivery) {
  using namespace std::chrono;
  for (int transport = 0; transport < 2; ++transport) {
    auto pair = transport == 0 ? make_in_process_pair(milliseconds(5))
                               : make_tcp_loopback_pair(milliseconds(5));
    const auto t0 = steady_clock::now();
    for (int i = 0; i < 10; ++i) {
      pair.first->send(Frame{MessageKind::kRoundData, 1, {1}});
      pair.second->recv();
    }
    EXPECT_GE(steady_clock::now() - t0, milliseconds(50));
  }
}

TEST(Tcp, ConnectFailsWithoutListener) {
  std::uint16_t port;
  {
    TcpListener l({"127.0.0.1", 0});
    port = l.port();
  }
  EXPECT_THROW(tcp_connect({"127.0.0.1", port}, std::chrono::milliseconds(200)),
               ChannelError);
}

}  // namespace
}  // namespace skyshare
