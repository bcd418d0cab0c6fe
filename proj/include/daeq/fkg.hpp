#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "daeq/adversary.hpp"
#include "daeq/bus.hpp"
#include "daeq/sharing.hpp"

namespace daeq {

/// Private state of one key-generation participant.
struct FkgClientState {
  ClientIndex index = 0;
  SecretPolynomialPair poly;
  std::map<ClientIndex, ShareBundle> received_shares;
  std::map<ClientIndex, PedersenCommitment> received_pedersen;
  std::map<ClientIndex, FeldmanCommitment> received_feldman;
  std::set<ClientIndex> qual;
  std::optional<GroupElement> public_key;
  Scalar x_i;  // private key share, set after assembly
  Scalar z_i;  // own contributed secret, f_i(0)
};

/// Server-side record of one key-generation run. Contains no secret material.
struct FkgTranscript {
  std::uint32_t round = 0;
  std::size_t n = 0;
  std::size_t threshold = 0;
  std::map<ClientIndex, std::set<ClientIndex>> complaints;          // Pedersen phase: accused -> complainers
  std::map<ClientIndex, std::set<ClientIndex>> feldman_complaints;  // Feldman phase
  std::set<ClientIndex> qual;
  std::set<ClientIndex> disqualified;
  std::set<ClientIndex> reconstructed;  // dealers whose A_0 the server rebuilt by interpolation
  GroupElement h;
  std::map<ClientIndex, GroupElement> h_parts;

  std::string to_json() const;
};

/// Smallest T with T > n/2.
std::size_t default_threshold(std::size_t n);

/// One key-generation participant driven through the protocol phases.
class FkgClient {
 public:
  FkgClient(ClientIndex index, Rng rng) : rng_(std::move(rng)) { state_.index = index; }

  ClientIndex index() const { return state_.index; }
  const FkgClientState& state() const { return state_; }

  // Phase entry points, called by run_fkg in lockstep.
  void deal(std::span<const ClientIndex> participants, std::size_t threshold, const GroupParams& params,
            const AdversaryPlan& plan, MessageBus& bus);
  void check_pedersen(const GroupParams& params, const AdversaryPlan& plan, MessageBus& bus);
  void answer_disputes(const AdversaryPlan& plan, MessageBus& bus);
  void broadcast_feldman(const GroupParams& params, const AdversaryPlan& plan, MessageBus& bus);
  void check_feldman(const GroupParams& params, const AdversaryPlan& plan, MessageBus& bus);
  void answer_reveals(const AdversaryPlan& plan, MessageBus& bus);
  void assemble(const GroupParams& params, MessageBus& bus);

  /// Test-oracle access to the contributed secret z_i. Never used by protocol code.
  const Scalar& secret_for_testing() const { return state_.z_i; }

 private:
  bool silent(const AdversaryPlan& plan, Phase phase) const;

  FkgClientState state_;
  Rng rng_;
  std::vector<ClientIndex> participants_;
  std::map<ClientIndex, ShareBundle> sent_shares_;
  bool dealt_ = false;
};

/// Runs the full key generation over `clients`, ordered by strictly increasing index.
/// Throws AbortInsufficientQual / AbortDisputeUnresolvable.
FkgTranscript run_fkg(std::vector<FkgClient>& clients, std::size_t threshold, const GroupParams& params,
                      const AdversaryPlan& plan, MessageBus& bus);

/// x_i = sum_{j in qual} s_ji mod q. Throws MissingShare when a qual dealer's share is absent.
Scalar compute_private_share(const FkgClientState& state, const std::set<ClientIndex>& qual,
                             const GroupParams& params);

}  // namespace daeq
