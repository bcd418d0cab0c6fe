#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "daeq/bytes.hpp"
#include "daeq/sharing.hpp"

namespace daeq {

/// Endpoint id of the aggregation server. Clients use their 1-based index.
inline constexpr ClientIndex kServer = 0;

enum class Phase : std::uint8_t {
  kDeal,
  kComplain,
  kVerify,
  kFeldman,
  kAssemble,
  kDownload,
  kUpload,
  kDecrypt,
  kEvaluate,
};

std::string_view phase_name(Phase phase);

/// One message on the simulated star network. Sealed payloads model the
/// confidential client-to-client share channel: the server relays them but
/// can never open them.
class Envelope {
 public:
  Envelope(Phase phase, std::string type, ClientIndex from, ClientIndex to, Bytes payload,
           bool sealed = false, std::uint32_t elements = 0);

  Phase phase() const { return phase_; }
  const std::string& type() const { return type_; }
  ClientIndex from() const { return from_; }
  ClientIndex to() const { return to_; }
  /// Original author of a relayed broadcast (equals from() otherwise).
  ClientIndex origin() const { return origin_; }
  bool sealed() const { return sealed_; }
  std::size_t size() const { return payload_.size(); }
  /// Group elements carried, for ciphertext accounting.
  std::uint32_t elements() const { return elements_; }

  /// Throws AccessViolation when `reader` is not the addressee of a sealed payload.
  const Bytes& open(ClientIndex reader) const;

  Envelope relayed_to(ClientIndex to) const;

 private:
  Phase phase_;
  std::string type_;
  ClientIndex from_;
  ClientIndex to_;
  ClientIndex origin_;
  Bytes payload_;
  bool sealed_;
  std::uint32_t elements_;
};

struct MessageRecord {
  std::uint32_t round = 0;
  Phase phase = Phase::kDeal;
  std::string type;
  ClientIndex from = 0;
  ClientIndex to = 0;
  ClientIndex origin = 0;
  std::size_t bytes = 0;
  std::uint32_t elements = 0;
  bool sealed = false;
};

/// Synchronous in-process message bus. Every send is logged (metadata only)
/// and queued in the addressee's inbox until drained.
class MessageBus {
 public:
  void set_round(std::uint32_t round) { round_ = round; }
  std::uint32_t round() const { return round_; }

  void send(Envelope envelope);
  /// Server echo of a client broadcast to every endpoint in `recipients` other than its origin.
  void broadcast(const Envelope& from_client, const std::vector<ClientIndex>& recipients);
  std::vector<Envelope> drain(ClientIndex endpoint);
  void discard_pending();

  const std::vector<MessageRecord>& log() const { return log_; }
  void clear_log() { log_.clear(); }

  /// JSON array of every logged message.
  std::string transcript_json() const;

 private:
  std::uint32_t round_ = 0;
  std::map<ClientIndex, std::vector<Envelope>> inboxes_;
  std::vector<MessageRecord> log_;
};

}  // namespace daeq
