#include "daeq/bus.hpp"

#include <nlohmann/json.hpp>

#include "daeq/errors.hpp"

namespace daeq {

std::string_view phase_name(Phase phase) {
  switch (phase) {
    case Phase::kDeal: return "deal";
    case Phase::kComplain: return "complain";
    case Phase::kVerify: return "verify";
    case Phase::kFeldman: return "feldman";
    case Phase::kAssemble: return "assemble";
    case Phase::kDownload: return "download";
    case Phase::kUpload: return "upload";
    case Phase::kDecrypt: return "decrypt";
    case Phase::kEvaluate: return "evaluate";
  }
  return "unknown";
}

Envelope::Envelope(Phase phase, std::string type, ClientIndex from, ClientIndex to, Bytes payload,
                   bool sealed, std::uint32_t elements)
    : phase_(phase),
      type_(std::move(type)),
      from_(from),
      to_(to),
      origin_(from),
      payload_(std::move(payload)),
      sealed_(sealed),
      elements_(elements) {}

const Bytes& Envelope::open(ClientIndex reader) const {
  if (sealed_ && reader != to_) {
    throw AccessViolation("endpoint " + std::to_string(reader) + " tried to open a sealed '" + type_ +
                          "' payload addressed to " + std::to_string(to_));
  }
  return payload_;
}

Envelope Envelope::relayed_to(ClientIndex to) const {
  Envelope copy = *this;
  copy.from_ = kServer;
  copy.to_ = to;
  return copy;
}

void MessageBus::send(Envelope envelope) {
  log_.push_back(MessageRecord{round_, envelope.phase(), envelope.type(), envelope.from(), envelope.to(),
                               envelope.origin(), envelope.size(), envelope.elements(), envelope.sealed()});
  const ClientIndex to = envelope.to();
  inboxes_[to].push_back(std::move(envelope));
}

void MessageBus::broadcast(const Envelope& from_client, const std::vector<ClientIndex>& recipients) {
  send(from_client);
  for (ClientIndex r : recipients) {
    if (r == from_client.origin()) continue;
    send(from_client.relayed_to(r));
  }
}

std::vector<Envelope> MessageBus::drain(ClientIndex endpoint) {
  auto it = inboxes_.find(endpoint);
  if (it == inboxes_.end()) return {};
  std::vector<Envelope> out = std::move(it->second);
  inboxes_.erase(it);
  return out;
}

void MessageBus::discard_pending() { inboxes_.clear(); }

std::string MessageBus::transcript_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& m : log_) {
    arr.push_back({{"round", m.round},
                   {"phase", phase_name(m.phase)},
                   {"type", m.type},
                   {"from", m.from},
                   {"to", m.to},
                   {"origin", m.origin},
                   {"bytes", m.bytes},
                   {"elements", m.elements},
                   {"sealed", m.sealed}});
  }
  return arr.dump(1);
}

}  // namespace daeq
