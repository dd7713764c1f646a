#include "skyshare/party.h"

#include <sstream>

#include "skyshare/errors.h"

namespace skyshare {

const char* to_string(MultiBaMode mode) {
  return mode == MultiBaMode::kDaBit ? "dabit" : "two-message";
}

MultiBaMode parse_multiba_mode(const std::string& text) {
  if (text == "dabit") return MultiBaMode::kDaBit;
  if (text == "two-message") return MultiBaMode::kTwoMessage;
  throw InvalidArgument("unknown multiplication mode '" + text +
                        "' (expected dabit or two-message)");
}

const char* to_string(OpenTag tag) {
  switch (tag) {
    case OpenTag::kBeaverArith:
      return "beaver-arith";
    case OpenTag::kBeaverBinary:
      return "beaver-binary";
    case OpenTag::kDabitMask:
      return "dabit-mask";
    case OpenTag::kTwoMessage:
      return "two-message";
    case OpenTag::kStopBit:
      return "stop-bit";
  }
  return "unknown";
}

std::string meter_report(const SessionMetrics& m) {
  if (!m.complete || m.rounds == 0) {
    throw InvalidArgument("session " + std::to_string(m.session) +
                          " has no completed rounds to report");
  }
  std::ostringstream out;
  out << "session = " << m.session << "\n"
      << "n = " << m.n << "\n"
      << "m = " << m.m << "\n"
      << "k = " << m.k << "\n"
      << "rounds = " << m.rounds << "\n"
      << "bytes_tx = " << m.bytes_tx << "\n"
      << "bytes_rx = " << m.bytes_rx << "\n"
      << "secext = " << m.secext << "\n"
      << "wall_ms = " << m.wall_ms << "\n";
  return out.str();
}

std::string metrics_csv_header() {
  return "session,n,m,k,rounds,bytes_tx,bytes_rx,secext,wall_ms";
}

std::string metrics_csv_row(const SessionMetrics& m) {
  std::ostringstream out;
  out << m.session << ',' << m.n << ',' << m.m << ',' << m.k << ','
      << m.rounds << ',' << m.bytes_tx << ',' << m.bytes_rx << ','
      << m.secext << ',' << m.wall_ms;
  return out.str();
}

PartyContext::PartyContext(PartyId id, const Ring& ring, Channel& peer,
                           CorrelatedSource& randomness, const Seed& local_seed,
                           std::uint32_t session, PartyOptions options)
    : id_(id),
      ring_(ring),
      peer_(&peer),
      randomness_(&randomness),
      prg_(local_seed),
      session_(session),
      options_(options) {
  metrics_.session = session;
}

std::vector<Word> PartyContext::exchange(OpenTag tag,
                                         std::span<const Word> words,
                                         std::uint64_t masks) {
  const MessageKind kind = tag == OpenTag::kStopBit ? MessageKind::kOpenBit
                                                    : MessageKind::kRoundData;
  Frame out{kind, session_, pack_words(words, ring_)};
  const std::size_t sent_bytes = out.payload.size();
  peer_->send(std::move(out));
  Frame in = peer_->recv();
  if (in.kind != kind) {
    throw ProtocolError(std::string("expected ") + to_string(kind) +
                        " frame, peer sent " + to_string(in.kind));
  }
  if (in.session != session_) {
    throw ProtocolError("frame for session " + std::to_string(in.session) +
                        " arrived on session " + std::to_string(session_));
  }
  std::vector<Word> theirs = unpack_words(in.payload, ring_);
  if (theirs.size() != words.size()) {
    throw ProtocolError("peer sent " + std::to_string(theirs.size()) +
                        " words, expected " + std::to_string(words.size()));
  }
  ++metrics_.rounds;
  metrics_.bytes_tx += sent_bytes;
  metrics_.bytes_rx += in.payload.size();
  if (options_.record_transcript) {
    TranscriptEntry e{tag, theirs.size(), masks, {}};
    if (options_.record_values) e.values = theirs;
    transcript_.push_back(std::move(e));
  }
  return theirs;
}

void PartyContext::start_clock() { started_ = std::chrono::steady_clock::now(); }

void PartyContext::stop_clock() {
  metrics_.wall_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - started_)
                         .count();
}

}  // namespace skyshare
