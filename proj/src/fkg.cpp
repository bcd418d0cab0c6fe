#include "daeq/fkg.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

#include "daeq/errors.hpp"

namespace daeq {
namespace {

Bytes encode_index(ClientIndex i) {
  ByteWriter w;
  w.u32(i);
  return std::move(w).take();
}

ClientIndex decode_index(const Bytes& b) {
  ByteReader r(b);
  ClientIndex i = r.u32();
  if (!r.done()) throw ParseError("trailing bytes after index");
  return i;
}

Bytes encode_indices(const std::vector<ClientIndex>& ids) {
  ByteWriter w;
  w.u32(static_cast<std::uint32_t>(ids.size()));
  for (auto i : ids) w.u32(i);
  return std::move(w).take();
}

std::vector<ClientIndex> decode_indices(const Bytes& b) {
  ByteReader r(b);
  std::vector<ClientIndex> ids(r.u32());
  for (auto& i : ids) i = r.u32();
  return ids;
}

Bytes encode_shares(const std::vector<ShareBundle>& shares) {
  ByteWriter w;
  w.u32(static_cast<std::uint32_t>(shares.size()));
  for (const auto& s : shares) {
    Bytes one = serialize(s);
    w.u32(static_cast<std::uint32_t>(one.size()));
    w.raw(one);
  }
  return std::move(w).take();
}

std::vector<ShareBundle> decode_shares(const Bytes& b) {
  ByteReader r(b);
  std::vector<ShareBundle> out(r.u32());
  for (auto& s : out) s = parse_share(r.raw(r.u32()));
  return out;
}

Bytes encode_key_parts(const std::map<ClientIndex, GroupElement>& parts) {
  ByteWriter w;
  w.u32(static_cast<std::uint32_t>(parts.size()));
  for (const auto& [i, h] : parts) {
    w.u32(i);
    w.bigint(h.value);
  }
  return std::move(w).take();
}

std::map<ClientIndex, GroupElement> decode_key_parts(const Bytes& b) {
  ByteReader r(b);
  std::map<ClientIndex, GroupElement> out;
  for (std::uint32_t k = r.u32(); k > 0; --k) {
    ClientIndex i = r.u32();
    out[i] = GroupElement(r.bigint());
  }
  return out;
}

// Server side of key generation. It only ever reads its own inbox, which
// never contains sealed payloads.
class Coordinator {
 public:
  Coordinator(std::vector<ClientIndex> participants, std::size_t threshold, const GroupParams& params,
              MessageBus& bus)
      : params_(params), bus_(bus), everyone_(std::move(participants)) {
    transcript_.round = bus.round();
    transcript_.n = everyone_.size();
    transcript_.threshold = threshold;
  }

  void collect_complaints() {
    for (const auto& env : bus_.drain(kServer)) {
      const Bytes& payload = env.open(kServer);
      if (env.type() == "pedersen_commit") {
        pedersen_[env.from()] = parse_pedersen(payload);
      } else if (env.type() == "complaint") {
        ClientIndex accused = decode_index(payload);
        if (std::ranges::binary_search(everyone_, accused) && accused != env.from()) {
          transcript_.complaints[accused].insert(env.from());
        }
      }
    }
  }

  void request_disputed_shares() {
    for (ClientIndex i : everyone_) {
      auto it = transcript_.complaints.find(i);
      const std::size_t cpt = it == transcript_.complaints.end() ? 0 : it->second.size();
      if (cpt > transcript_.threshold || !pedersen_.contains(i)) {
        transcript_.disqualified.insert(i);
      } else if (cpt > 0) {
        std::vector<ClientIndex> complainers(it->second.begin(), it->second.end());
        bus_.send(Envelope(Phase::kVerify, "dispute_request", kServer, i, encode_indices(complainers)));
      }
    }
  }

  void resolve_disputes() {
    std::map<ClientIndex, std::vector<ShareBundle>> uploaded;
    for (const auto& env : bus_.drain(kServer)) {
      if (env.type() == "dispute_shares") uploaded[env.from()] = decode_shares(env.open(kServer));
    }
    for (const auto& [accused, complainers] : transcript_.complaints) {
      if (transcript_.disqualified.contains(accused)) continue;
      std::vector<ShareBundle> verified;
      bool ok = true;
      for (ClientIndex j : complainers) {
        const auto& list = uploaded[accused];
        auto share = std::find_if(list.begin(), list.end(), [&](const ShareBundle& s) {
          return s.dealer == accused && s.recipient == j;
        });
        if (share == list.end() || !pedersen_verify(*share, pedersen_.at(accused), params_)) {
          ok = false;
          break;
        }
        verified.push_back(*share);
      }
      if (!ok) {
        transcript_.disqualified.insert(accused);
        continue;
      }
      for (const auto& share : verified) {
        bus_.send(Envelope(Phase::kVerify, "resolved_share", kServer, share.recipient, serialize(share)));
      }
    }
    for (ClientIndex i : everyone_) {
      if (!transcript_.disqualified.contains(i)) transcript_.qual.insert(i);
    }
    const std::vector<ClientIndex> qual(transcript_.qual.begin(), transcript_.qual.end());
    for (ClientIndex i : everyone_) {
      bus_.send(Envelope(Phase::kVerify, "qual", kServer, i, encode_indices(qual)));
    }
    if (transcript_.qual.size() < transcript_.threshold) {
      throw AbortInsufficientQual("only " + std::to_string(qual.size()) + " qualified clients, threshold " +
                                  std::to_string(transcript_.threshold));
    }
  }

  void collect_feldman() {
    for (const auto& env : bus_.drain(kServer)) {
      const Bytes& payload = env.open(kServer);
      if (env.type() == "feldman_commit") {
        if (transcript_.qual.contains(env.from())) feldman_[env.from()] = parse_feldman(payload);
      } else if (env.type() == "feldman_complaint") {
        ClientIndex accused = decode_index(payload);
        if (transcript_.qual.contains(accused) && transcript_.qual.contains(env.from()) && accused != env.from()) {
          transcript_.feldman_complaints[accused].insert(env.from());
        }
      }
    }
    for (ClientIndex i : transcript_.qual) {
      if (!feldman_.contains(i) || feldman_.at(i).a.empty()) transcript_.feldman_complaints[i];
    }
    for (const auto& [accused, _] : transcript_.feldman_complaints) {
      disputes_[accused] = Dispute{};
    }
  }

  // Asks the next candidates (ascending QUAL order, skipping the accused) for
  // their share of each unresolved dealer. Returns false once nothing is pending.
  bool request_reveals() {
    bool any = false;
    for (auto& [dealer, d] : disputes_) {
      if (d.done) continue;
      const std::size_t missing = transcript_.threshold - d.points.size();
      std::size_t asked = 0;
      for (ClientIndex j : transcript_.qual) {
        if (asked == missing) break;
        if (j == dealer || j <= d.last_asked) continue;
        bus_.send(Envelope(Phase::kFeldman, "reveal_request", kServer, j, encode_index(dealer)));
        d.last_asked = j;
        ++asked;
      }
      if (asked == 0) {
        throw AbortDisputeUnresolvable("could not gather " + std::to_string(transcript_.threshold) +
                                       " verified shares for dealer " + std::to_string(dealer));
      }
      any = true;
    }
    return any;
  }

  void absorb_reveals() {
    for (const auto& env : bus_.drain(kServer)) {
      if (env.type() != "revealed_share") continue;
      ShareBundle share = parse_share(env.open(kServer));
      auto it = disputes_.find(share.dealer);
      if (it == disputes_.end() || it->second.done || share.recipient != env.from()) continue;
      // The uploaded share must open the dealer's Pedersen commitment.
      if (!pedersen_verify(share, pedersen_.at(share.dealer), params_)) continue;
      it->second.points.emplace_back(share.recipient, share.s);
    }
    for (auto& [dealer, d] : disputes_) {
      if (d.done || d.points.size() < transcript_.threshold) continue;
      d.points.resize(transcript_.threshold);
      const Scalar z = reconstruct_at_zero(d.points, params_);
      d.a0 = pow_mod(params_, params_.generator(), z);
      d.done = true;
    }
  }

  FkgTranscript assemble() {
    GroupElement h(1);
    for (ClientIndex i : transcript_.qual) {
      GroupElement part;
      auto dispute = disputes_.find(i);
      if (dispute != disputes_.end()) {
        part = dispute->second.a0;
        transcript_.reconstructed.insert(i);
      } else {
        part = feldman_.at(i).a.front();
      }
      transcript_.h_parts[i] = part;
      h = mul_mod(params_, h, part);
    }
    transcript_.h = h;
    const Bytes parts = encode_key_parts(transcript_.h_parts);
    for (ClientIndex i : transcript_.qual) {
      bus_.send(Envelope(Phase::kAssemble, "key_parts", kServer, i, parts, false,
                         static_cast<std::uint32_t>(transcript_.h_parts.size())));
    }
    return transcript_;
  }

 private:
  struct Dispute {
    std::vector<std::pair<ClientIndex, Scalar>> points;
    ClientIndex last_asked = 0;
    GroupElement a0;
    bool done = false;
  };

  const GroupParams& params_;
  MessageBus& bus_;
  FkgTranscript transcript_;
  std::vector<ClientIndex> everyone_;
  std::map<ClientIndex, PedersenCommitment> pedersen_;
  std::map<ClientIndex, FeldmanCommitment> feldman_;
  std::map<ClientIndex, Dispute> disputes_;
};

}  // namespace

std::size_t default_threshold(std::size_t n) { return n / 2 + 1; }

bool FkgClient::silent(const AdversaryPlan& plan, Phase phase) const {
  return inject_adversary(plan, index(), phase) == Misbehavior::kSilent;
}

void FkgClient::deal(std::span<const ClientIndex> participants, std::size_t threshold, const GroupParams& params,
                     const AdversaryPlan& plan, MessageBus& bus) {
  participants_.assign(participants.begin(), participants.end());
  if (silent(plan, Phase::kDeal)) return;

  const ClientIndex self = index();
  state_.poly = sample_polynomial_pair(threshold, params, rng_);
  state_.z_i = state_.poly.secret();
  const PedersenCommitment commit = pedersen_commit(state_.poly, params);
  state_.received_pedersen[self] = commit;
  state_.received_shares[self] = evaluate(state_.poly, self, self, params);
  dealt_ = true;

  bus.broadcast(Envelope(Phase::kDeal, "pedersen_commit", self, kServer, serialize(commit), false,
                         static_cast<std::uint32_t>(commit.c.size())),
                participants_);

  const AdversaryEntry* adv = plan.find(self);
  const bool corrupt = inject_adversary(plan, self, Phase::kDeal) == Misbehavior::kBadShare;
  for (ClientIndex j : participants_) {
    if (j == self) continue;
    ShareBundle share = evaluate(state_.poly, self, j, params);
    if (corrupt && (adv->targets.empty() || std::ranges::count(adv->targets, j) > 0)) {
      share.s = add(params, share.s, Scalar(1ul));
    }
    sent_shares_[j] = share;
    bus.send(Envelope(Phase::kDeal, "share", self, j, serialize(share), /*sealed=*/true, 2));
  }
}

void FkgClient::check_pedersen(const GroupParams& params, const AdversaryPlan& plan, MessageBus& bus) {
  const ClientIndex self = index();
  for (const auto& env : bus.drain(self)) {
    const Bytes& payload = env.open(self);
    if (env.type() == "pedersen_commit") {
      state_.received_pedersen[env.origin()] = parse_pedersen(payload);
    } else if (env.type() == "share") {
      ShareBundle share = parse_share(payload);
      if (share.dealer == env.from() && share.recipient == self) state_.received_shares[share.dealer] = share;
    }
  }
  if (silent(plan, Phase::kComplain)) return;

  for (ClientIndex dealer : participants_) {
    if (dealer == self) continue;
    auto share = state_.received_shares.find(dealer);
    auto commit = state_.received_pedersen.find(dealer);
    const bool ok = share != state_.received_shares.end() && commit != state_.received_pedersen.end() &&
                    pedersen_verify(share->second, commit->second, params);
    if (!ok) {
      state_.received_shares.erase(dealer);
      bus.send(Envelope(Phase::kComplain, "complaint", self, kServer, encode_index(dealer)));
    }
  }
}

void FkgClient::answer_disputes(const AdversaryPlan& plan, MessageBus& bus) {
  const ClientIndex self = index();
  for (const auto& env : bus.drain(self)) {
    if (env.type() != "dispute_request") continue;
    if (silent(plan, Phase::kVerify) || !dealt_) continue;
    std::vector<ShareBundle> shares;
    for (ClientIndex j : decode_indices(env.open(self))) {
      auto it = sent_shares_.find(j);
      if (it != sent_shares_.end()) shares.push_back(it->second);
    }
    bus.send(Envelope(Phase::kVerify, "dispute_shares", self, kServer, encode_shares(shares), false,
                      static_cast<std::uint32_t>(2 * shares.size())));
  }
}

void FkgClient::broadcast_feldman(const GroupParams& params, const AdversaryPlan& plan, MessageBus& bus) {
  const ClientIndex self = index();
  for (const auto& env : bus.drain(self)) {
    const Bytes& payload = env.open(self);
    if (env.type() == "resolved_share") {
      ShareBundle share = parse_share(payload);
      auto commit = state_.received_pedersen.find(share.dealer);
      if (share.recipient == self && commit != state_.received_pedersen.end() &&
          pedersen_verify(share, commit->second, params)) {
        state_.received_shares[share.dealer] = share;
      }
    } else if (env.type() == "qual") {
      auto ids = decode_indices(payload);
      state_.qual = std::set<ClientIndex>(ids.begin(), ids.end());
    } else if (env.type() == "feldman_commit") {
      state_.received_feldman[env.origin()] = parse_feldman(payload);
    }
  }
  if (!state_.qual.contains(self) || silent(plan, Phase::kFeldman)) return;

  FeldmanCommitment commit = feldman_commit(state_.poly, params);
  state_.received_feldman[self] = commit;
  if (inject_adversary(plan, self, Phase::kFeldman) == Misbehavior::kFakeA0) {
    commit.a.front() = mul_mod(params, commit.a.front(), params.generator());
  }
  const std::vector<ClientIndex> qual(state_.qual.begin(), state_.qual.end());
  bus.broadcast(Envelope(Phase::kFeldman, "feldman_commit", self, kServer, serialize(commit), false,
                         static_cast<std::uint32_t>(commit.a.size())),
                qual);
}

void FkgClient::check_feldman(const GroupParams& params, const AdversaryPlan& plan, MessageBus& bus) {
  const ClientIndex self = index();
  for (const auto& env : bus.drain(self)) {
    if (env.type() == "feldman_commit") state_.received_feldman[env.origin()] = parse_feldman(env.open(self));
  }
  if (!state_.qual.contains(self) || silent(plan, Phase::kFeldman)) return;
  for (ClientIndex dealer : state_.qual) {
    if (dealer == self) continue;
    auto share = state_.received_shares.find(dealer);
    auto commit = state_.received_feldman.find(dealer);
    const bool ok = share != state_.received_shares.end() && commit != state_.received_feldman.end() &&
                    feldman_verify(share->second, commit->second, params);
    if (!ok) bus.send(Envelope(Phase::kFeldman, "feldman_complaint", self, kServer, encode_index(dealer)));
  }
}

void FkgClient::answer_reveals(const AdversaryPlan& plan, MessageBus& bus) {
  const ClientIndex self = index();
  for (const auto& env : bus.drain(self)) {
    if (env.type() != "reveal_request" || silent(plan, Phase::kFeldman)) continue;
    auto it = state_.received_shares.find(decode_index(env.open(self)));
    if (it == state_.received_shares.end()) continue;
    bus.send(Envelope(Phase::kFeldman, "revealed_share", self, kServer, serialize(it->second), false, 2));
  }
}

void FkgClient::assemble(const GroupParams& params, MessageBus& bus) {
  const ClientIndex self = index();
  for (const auto& env : bus.drain(self)) {
    if (env.type() != "key_parts") continue;
    GroupElement h(1);
    for (const auto& [i, part] : decode_key_parts(env.open(self))) h = mul_mod(params, h, part);
    state_.public_key = h;
  }
  if (state_.qual.contains(self) && state_.public_key) {
    state_.x_i = compute_private_share(state_, state_.qual, params);
  }
}

Scalar compute_private_share(const FkgClientState& state, const std::set<ClientIndex>& qual,
                             const GroupParams& params) {
  if (qual.empty()) throw MissingShare("qual set is empty");
  Scalar acc(0ul);
  for (ClientIndex dealer : qual) {
    auto it = state.received_shares.find(dealer);
    if (it == state.received_shares.end()) {
      throw MissingShare("client " + std::to_string(state.index) + " has no share from dealer " +
                         std::to_string(dealer));
    }
    acc = add(params, acc, it->second.s);
  }
  return acc;
}

FkgTranscript run_fkg(std::vector<FkgClient>& clients, std::size_t threshold, const GroupParams& params,
                      const AdversaryPlan& plan, MessageBus& bus) {
  const std::size_t n = clients.size();
  if (n < 2) throw Error("key generation needs at least 2 clients");
  if (threshold * 2 <= n || threshold > n) {
    throw Error("threshold must satisfy n/2 < T <= n (n=" + std::to_string(n) + ", T=" +
                std::to_string(threshold) + ")");
  }
  std::vector<ClientIndex> ids;
  for (const auto& c : clients) {
    if (c.index() == kServer || (!ids.empty() && c.index() <= ids.back())) {
      throw Error("client indices must be nonzero and strictly increasing");
    }
    ids.push_back(c.index());
  }
  validate_plan(plan, ids, threshold);

  Coordinator server(ids, threshold, params, bus);
  for (auto& c : clients) c.deal(ids, threshold, params, plan, bus);
  for (auto& c : clients) c.check_pedersen(params, plan, bus);
  server.collect_complaints();
  server.request_disputed_shares();
  for (auto& c : clients) c.answer_disputes(plan, bus);
  server.resolve_disputes();
  for (auto& c : clients) c.broadcast_feldman(params, plan, bus);
  for (auto& c : clients) c.check_feldman(params, plan, bus);
  server.collect_feldman();
  while (server.request_reveals()) {
    for (auto& c : clients) c.answer_reveals(plan, bus);
    server.absorb_reveals();
  }
  FkgTranscript transcript = server.assemble();
  for (auto& c : clients) c.assemble(params, bus);
  return transcript;
}

std::string FkgTranscript::to_json() const {
  auto id_map = [](const std::map<ClientIndex, std::set<ClientIndex>>& m) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, v] : m) j[std::to_string(k)] = v;
    return j;
  };
  nlohmann::json parts = nlohmann::json::object();
  for (const auto& [i, h_i] : h_parts) parts[std::to_string(i)] = to_hex(h_i.value);
  nlohmann::json j = {{"round", round},
                      {"n", n},
                      {"T", threshold},
                      {"complaints", id_map(complaints)},
                      {"feldman_complaints", id_map(feldman_complaints)},
                      {"qual", qual},
                      {"disqualified", disqualified},
                      {"reconstructed", reconstructed},
                      {"h", to_hex(h.value)},
                      {"h_parts", parts}};
  return j.dump(1);
}

}  // namespace daeq
