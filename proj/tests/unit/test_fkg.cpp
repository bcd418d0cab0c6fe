#include <gtest/gtest.h>

#include <functional>

#include "daeq/errors.hpp"
#include "daeq/fkg.hpp"

using namespace daeq;

namespace {

std::vector<FkgClient> make_clients(std::vector<ClientIndex> ids, const std::string& seed) {
  const Rng rng = Rng::from_seed(seed);
  std::vector<FkgClient> clients;
  for (ClientIndex i : ids) clients.emplace_back(i, rng.child("client", i));
  return clients;
}

std::vector<ClientIndex> iota(std::size_t n) {
  std::vector<ClientIndex> v(n);
  for (std::size_t k = 0; k < n; ++k) v[k] = static_cast<ClientIndex>(k + 1);
  return v;
}

const FkgClient& by_index(const std::vector<FkgClient>& clients, ClientIndex i) {
  for (const auto& c : clients) {
    if (c.index() == i) return c;
  }
  throw std::out_of_range("no client");
}

// Test-only oracle: g^(sum of the QUAL secrets).
GroupElement oracle_key(const std::vector<FkgClient>& clients, const FkgTranscript& tr, const GroupParams& p) {
  Scalar z(0ul);
  for (ClientIndex i : tr.qual) z = add(p, z, by_index(clients, i).secret_for_testing());
  return pow_mod(p, p.generator(), z);
}

void for_each_subset(const std::vector<ClientIndex>& ids, std::size_t k,
                     const std::function<void(const std::vector<ClientIndex>&)>& fn) {
  std::vector<ClientIndex> cur;
  std::function<void(std::size_t)> rec = [&](std::size_t start) {
    if (cur.size() == k) {
      fn(cur);
      return;
    }
    for (std::size_t i = start; i < ids.size(); ++i) {
      cur.push_back(ids[i]);
      rec(i + 1);
      cur.pop_back();
    }
  };
  rec(0);
}

void expect_threshold_identity(const std::vector<FkgClient>& clients, const FkgTranscript& tr,
                               const std::vector<ClientIndex>& honest, const GroupParams& p) {
  for_each_subset(honest, tr.threshold, [&](const std::vector<ClientIndex>& s) {
    Scalar acc(0ul);
    for (ClientIndex i : s) acc = add(p, acc, mul(p, lagrange_coefficient(i, s, p), by_index(clients, i).state().x_i));
    EXPECT_EQ(pow_mod(p, p.generator(), acc), tr.h);
  });
}

struct Scenario {
  std::string name;
  std::size_t n;
  std::size_t t;
  AdversaryPlan plan;
  std::set<ClientIndex> disqualified;
  std::set<ClientIndex> reconstructed;
};

void PrintTo(const Scenario& sc, std::ostream* os) { *os << sc.name; }

class FkgScenario : public ::testing::TestWithParam<Scenario> {};

}  // namespace

TEST_P(FkgScenario, KeyMatchesOracleAndThresholdIdentityHolds) {
  const Scenario& sc = GetParam();
  for (const GroupParams& p : {toy_params(), generate_params(64, 256, "fkg-unit")}) {
    MessageBus bus;
    auto clients = make_clients(iota(sc.n), "fkg-" + sc.name);
    const FkgTranscript tr = run_fkg(clients, sc.t, p, sc.plan, bus);
    EXPECT_EQ(tr.disqualified, sc.disqualified);
    EXPECT_EQ(tr.reconstructed, sc.reconstructed);
    EXPECT_EQ(oracle_key(clients, tr, p), tr.h);
    std::vector<ClientIndex> honest;
    for (ClientIndex i : tr.qual) {
      if (!sc.plan.find(i)) honest.push_back(i);
    }
    for (ClientIndex i : honest) {
      ASSERT_TRUE(by_index(clients, i).state().public_key.has_value());
      EXPECT_EQ(*by_index(clients, i).state().public_key, tr.h);
      EXPECT_EQ(compute_private_share(by_index(clients, i).state(), tr.qual, p), by_index(clients, i).state().x_i);
    }
    expect_threshold_identity(clients, tr, honest, p);
  }
}

INSTANTIATE_TEST_SUITE_P(
    Plans, FkgScenario,
    ::testing::Values(Scenario{"none", 5, 3, {}, {}, {}},
                      Scenario{"bad_share", 5, 3, AdversaryPlan{{{2, Misbehavior::kBadShare, {}}}}, {2}, {}},
                      Scenario{"bad_share_targeted", 5, 3, AdversaryPlan{{{3, Misbehavior::kBadShare, {1}}}}, {3}, {}},
                      Scenario{"fake_A0", 5, 3, AdversaryPlan{{{4, Misbehavior::kFakeA0, {}}}}, {}, {4}},
                      Scenario{"silent", 4, 3, AdversaryPlan{{{1, Misbehavior::kSilent, {}}}}, {1}, {}},
                      Scenario{"mixed", 7, 4,
                               AdversaryPlan{{{1, Misbehavior::kBadShare, {3, 5}},
                                              {6, Misbehavior::kFakeA0, {}},
                                              {7, Misbehavior::kSilent, {}}}},
                               {1, 7},
                               {6}}),
    [](const auto& info) { return info.param.name; });

TEST(Fkg, NonContiguousParticipants) {
  const GroupParams p = generate_params(32, 128, "sparse");
  MessageBus bus;
  auto clients = make_clients({2, 5, 9, 11}, "sparse");
  const AdversaryPlan plan{{{9, Misbehavior::kBadShare, {}}, {20, Misbehavior::kSilent, {}}}};
  const FkgTranscript tr = run_fkg(clients, 3, p, plan, bus);
  EXPECT_EQ(tr.qual, (std::set<ClientIndex>{2, 5, 11}));
  EXPECT_EQ(oracle_key(clients, tr, p), tr.h);
  expect_threshold_identity(clients, tr, {2, 5, 11}, p);
}

TEST(Fkg, RejectsBadThresholdsAndPlans) {
  const GroupParams p = toy_params();
  MessageBus bus;
  auto clients = make_clients(iota(4), "bad");
  EXPECT_THROW(run_fkg(clients, 2, p, {}, bus), Error);
  EXPECT_THROW(run_fkg(clients, 5, p, {}, bus), Error);
  const AdversaryPlan too_many{{{1, Misbehavior::kSilent, {}}, {2, Misbehavior::kBadShare, {}}}};
  EXPECT_THROW(run_fkg(clients, 3, p, too_many, bus), PlanViolatesHonestMajority);
  auto unordered = make_clients({2, 1, 3}, "bad");
  EXPECT_THROW(run_fkg(unordered, 2, p, {}, bus), Error);
}

TEST(Fkg, DefaultThresholdIsSmallestMajority) {
  EXPECT_EQ(default_threshold(2), 2u);
  EXPECT_EQ(default_threshold(3), 2u);
  EXPECT_EQ(default_threshold(4), 3u);
  EXPECT_EQ(default_threshold(8), 5u);
  for (std::size_t n = 2; n < 50; ++n) {
    EXPECT_GT(2 * default_threshold(n), n);
    EXPECT_LE(2 * (default_threshold(n) - 1), n);
  }
}

TEST(Fkg, ServerNeverSeesSharesInTheClear) {
  const GroupParams p = generate_params(32, 128, "blind");
  MessageBus bus;
  auto clients = make_clients(iota(5), "blind");
  const AdversaryPlan plan{{{2, Misbehavior::kBadShare, {}}}};
  run_fkg(clients, 3, p, plan, bus);
  std::size_t sealed = 0;
  for (const auto& r : bus.log()) {
    if (r.type == "share") {
      EXPECT_TRUE(r.sealed);
      EXPECT_NE(r.to, kServer);
      ++sealed;
    }
    EXPECT_FALSE(r.sealed && r.to == kServer);
  }
  EXPECT_EQ(sealed, 5u * 4u);
}

TEST(Fkg, TranscriptJsonHasNoSecrets) {
  const GroupParams p = toy_params();
  MessageBus bus;
  auto clients = make_clients(iota(3), "json");
  const FkgTranscript tr = run_fkg(clients, 2, p, {}, bus);
  const std::string j = tr.to_json();
  EXPECT_NE(j.find("\"qual\""), std::string::npos);
  EXPECT_EQ(j.find("x_i"), std::string::npos);
}

TEST(Fkg, MissingShareIsReported) {
  FkgClientState st;
  st.index = 1;
  EXPECT_THROW(compute_private_share(st, {}, toy_params()), MissingShare);
  EXPECT_THROW(compute_private_share(st, {1, 2}, toy_params()), MissingShare);
}
