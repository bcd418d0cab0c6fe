#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "daeq/bus.hpp"

namespace daeq {

enum class Misbehavior {
  kBadShare,  // corrupted Pedersen shares to the targets (default: everyone)
  kFakeA0,    // consistent shares, but a forged Feldman A_0
  kDropout,   // honest until the decryption phase, then never answers
  kSilent,    // sends nothing from the deal phase on
};

std::string_view misbehavior_name(Misbehavior m);
Misbehavior parse_misbehavior(std::string_view name);

struct AdversaryEntry {
  ClientIndex client = 0;
  Misbehavior behavior = Misbehavior::kBadShare;
  std::vector<ClientIndex> targets;  // bad_share only; empty = all recipients
};

struct AdversaryPlan {
  std::vector<AdversaryEntry> entries;

  bool empty() const { return entries.empty(); }
  const AdversaryEntry* find(ClientIndex client) const;
  /// Distinct clients named by the plan.
  std::size_t adversary_count() const;
};

/// Throws PlanViolatesHonestMajority unless at least T of the n clients (indexed 1..n) are honest.
void validate_plan(const AdversaryPlan& plan, std::size_t n, std::size_t threshold);
/// Same check restricted to the adversaries among `participants`.
void validate_plan(const AdversaryPlan& plan, std::span<const ClientIndex> participants, std::size_t threshold);

/// Behaviour override for `client` at `phase`, if the plan has one that applies there.
std::optional<Misbehavior> inject_adversary(const AdversaryPlan& plan, ClientIndex client, Phase phase);

}  // namespace daeq
