#include "daeq/adversary.hpp"

#include <set>

#include "daeq/errors.hpp"

namespace daeq {

std::string_view misbehavior_name(Misbehavior m) {
  switch (m) {
    case Misbehavior::kBadShare: return "bad_share";
    case Misbehavior::kFakeA0: return "fake_A0";
    case Misbehavior::kDropout: return "dropout";
    case Misbehavior::kSilent: return "silent";
  }
  return "unknown";
}

Misbehavior parse_misbehavior(std::string_view name) {
  for (auto m : {Misbehavior::kBadShare, Misbehavior::kFakeA0, Misbehavior::kDropout, Misbehavior::kSilent}) {
    if (misbehavior_name(m) == name) return m;
  }
  throw ConfigError("unknown misbehavior '" + std::string(name) + "'");
}

const AdversaryEntry* AdversaryPlan::find(ClientIndex client) const {
  for (const auto& e : entries) {
    if (e.client == client) return &e;
  }
  return nullptr;
}

std::size_t AdversaryPlan::adversary_count() const {
  std::set<ClientIndex> ids;
  for (const auto& e : entries) ids.insert(e.client);
  return ids.size();
}

void validate_plan(const AdversaryPlan& plan, std::span<const ClientIndex> participants, std::size_t threshold) {
  std::set<ClientIndex> ids;
  for (const auto& e : plan.entries) {
    if (!ids.insert(e.client).second) {
      throw PlanViolatesHonestMajority("client " + std::to_string(e.client) + " named twice");
    }
  }
  std::size_t active = 0;
  for (ClientIndex i : participants) active += ids.contains(i) ? 1 : 0;
  const std::size_t n = participants.size();
  if (n - active < threshold) {
    throw PlanViolatesHonestMajority(std::to_string(active) + " adversaries leave fewer than T=" +
                                     std::to_string(threshold) + " honest clients out of " + std::to_string(n));
  }
}

void validate_plan(const AdversaryPlan& plan, std::size_t n, std::size_t threshold) {
  for (const auto& e : plan.entries) {
    if (e.client < 1 || e.client > n) {
      throw PlanViolatesHonestMajority("adversary index " + std::to_string(e.client) + " outside 1.." +
                                       std::to_string(n));
    }
  }
  std::vector<ClientIndex> all(n);
  for (std::size_t k = 0; k < n; ++k) all[k] = static_cast<ClientIndex>(k + 1);
  validate_plan(plan, all, threshold);
}

std::optional<Misbehavior> inject_adversary(const AdversaryPlan& plan, ClientIndex client, Phase phase) {
  const AdversaryEntry* e = plan.find(client);
  if (e == nullptr) return std::nullopt;
  switch (e->behavior) {
    case Misbehavior::kBadShare:
      if (phase == Phase::kDeal || phase == Phase::kVerify) return e->behavior;
      break;
    case Misbehavior::kFakeA0:
      if (phase == Phase::kFeldman) return e->behavior;
      break;
    case Misbehavior::kDropout:
      if (phase == Phase::kDecrypt) return e->behavior;
      break;
    case Misbehavior::kSilent:
      return e->behavior;
  }
  return std::nullopt;
}

}  // namespace daeq
