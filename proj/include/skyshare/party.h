#pragma once

// Per-session state of one server during the online phase: who we are, the
// channel to the peer, where correlated randomness comes from, and the
// meters every gadget reports into.

#include <chrono>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "skyshare/channel.h"
#include "skyshare/prg.h"
#include "skyshare/randomness.h"
#include "skyshare/ring.h"
#include "skyshare/sharing.h"

namespace skyshare {

// How a binary-shared bit multiplies an arithmetic-shared value.
//   kDaBit:    convert the bit with a daBit, then a Beaver product.
//   kTwoMessage: each side sends two candidate messages for its own share
//              and the peer keeps the one its bit selects. One round, but the
//              difference of the two messages exposes the sender's share.
enum class MultiBaMode { kDaBit, kTwoMessage };

const char* to_string(MultiBaMode mode);
MultiBaMode parse_multiba_mode(const std::string& text);

// What a received payload is. Every kind except kStopBit and kTwoMessage is
// masked by fresh correlated randomness before it leaves the sender.
enum class OpenTag : std::uint8_t {
  kBeaverArith,
  kBeaverBinary,
  kDabitMask,
  kTwoMessage,
  kStopBit,
};

const char* to_string(OpenTag tag);

struct TranscriptEntry {
  OpenTag tag;
  std::uint64_t words = 0;
  // Number of fresh correlated values (triple halves, daBits) that masked
  // this payload. Zero for openings that are meant to be public.
  std::uint64_t masks = 0;
  // The received words, only when value recording is on.
  std::vector<Word> values;
};

struct SessionMetrics {
  std::uint32_t session = 0;
  std::uint64_t n = 0;
  std::uint64_t m = 0;
  std::uint64_t k = 0;
  std::uint64_t rounds = 0;
  std::uint64_t bytes_tx = 0;
  std::uint64_t bytes_rx = 0;
  std::uint64_t secext = 0;
  double wall_ms = 0;
  bool complete = false;

  // Everything except wall time.
  bool same_counts(const SessionMetrics& o) const {
    return n == o.n && m == o.m && k == o.k && rounds == o.rounds &&
           bytes_tx == o.bytes_tx && bytes_rx == o.bytes_rx &&
           secext == o.secext;
  }
};

// "key = value" lines. Throws InvalidArgument for a session that never ran.
std::string meter_report(const SessionMetrics& m);
std::string metrics_csv_header();
std::string metrics_csv_row(const SessionMetrics& m);

struct PartyOptions {
  MultiBaMode mode = MultiBaMode::kDaBit;
  bool record_transcript = true;
  bool record_values = false;
};

class PartyContext {
 public:
  PartyContext(PartyId id, const Ring& ring, Channel& peer,
               CorrelatedSource& randomness, const Seed& local_seed,
               std::uint32_t session, PartyOptions options = {});

  PartyId id() const { return id_; }
  bool first() const { return id_ == PartyId::kFirst; }
  const Ring& ring() const { return ring_; }
  CorrelatedSource& randomness() { return *randomness_; }
  Prg& prg() { return prg_; }
  const PartyOptions& options() const { return options_; }
  std::uint32_t session() const { return session_; }

  SessionMetrics& metrics() { return metrics_; }
  const SessionMetrics& metrics() const { return metrics_; }
  const std::vector<TranscriptEntry>& transcript() const { return transcript_; }

  // One round: send `words` to the peer and return the peer's flight, which
  // must have the same length. kStopBit travels as an open-bit frame, all
  // other tags as round data.
  std::vector<Word> exchange(OpenTag tag, std::span<const Word> words,
                             std::uint64_t masks);

  void count_secext(std::uint64_t count) { metrics_.secext += count; }

  void start_clock();
  void stop_clock();

 private:
  PartyId id_;
  Ring ring_;
  Channel* peer_;
  CorrelatedSource* randomness_;
  Prg prg_;
  std::uint32_t session_;
  PartyOptions options_;
  SessionMetrics metrics_;
  std::vector<TranscriptEntry> transcript_;
  std::chrono::steady_clock::time_point started_;
};

}  // namespace skyshare
