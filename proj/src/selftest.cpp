#include "daeq/selftest.hpp"

#include <functional>
#include <numeric>

#include "daeq/ahe.hpp"
#include "daeq/errors.hpp"
#include "daeq/fkg.hpp"

namespace daeq {

namespace {

// Calls fn on every k-subset of {1..n}.
void for_each_subset(std::size_t n, std::size_t k, const std::function<void(const std::vector<ClientIndex>&)>& fn) {
  std::vector<ClientIndex> cur;
  std::function<void(ClientIndex)> rec = [&](ClientIndex next) {
    if (cur.size() == k) {
      fn(cur);
      return;
    }
    for (ClientIndex i = next; i <= n; ++i) {
      cur.push_back(i);
      rec(i + 1);
      cur.pop_back();
    }
  };
  rec(1);
}

std::vector<FkgClient> make_clients(std::size_t n, const Rng& rng) {
  std::vector<FkgClient> clients;
  for (ClientIndex i = 1; i <= n; ++i) clients.emplace_back(i, rng.child("client", i));
  return clients;
}

CheckResult check(std::string name, const std::function<std::string()>& body) {
  try {
    std::string failure = body();
    return {std::move(name), failure.empty(), failure.empty() ? "ok" : failure};
  } catch (const std::exception& e) {
    return {std::move(name), false, std::string("exception: ") + e.what()};
  }
}

}  // namespace

std::vector<CheckResult> run_selftest(bool mutate) {
  const GroupParams params = toy_params();
  const BigInt p = params.p;
  const unsigned long q = params.q.get_ui();
  const BigInt reference_g = mutate ? params.g + 1 : params.g;
  std::vector<CheckResult> out;

  out.push_back(check("group.pow_mod_exhaustive", [&]() -> std::string {
    for (unsigned long base = 1; base < p.get_ui(); ++base) {
      BigInt naive = 1;
      for (unsigned long e = 0; e < q; ++e) {
        if (pow_mod(params, GroupElement(BigInt(base)), Scalar(e)).value != naive) {
          return "mismatch at base " + std::to_string(base) + " exponent " + std::to_string(e);
        }
        naive = naive * base % p;
      }
    }
    return "";
  }));

  out.push_back(check("group.toy_params_valid", [&]() -> std::string {
    validate_params(params);
    if (pow_mod_raw(params, GroupElement(reference_g), params.q).value != 1) return "g does not have order q";
    return "";
  }));

  out.push_back(check("sharing.pedersen_completeness", [&]() -> std::string {
    Rng rng = Rng::from_seed("selftest-pedersen");
    for (int trial = 0; trial < 20; ++trial) {
      const auto poly = sample_polynomial_pair(3, params, rng);
      const auto c = pedersen_commit(poly, params);
      for (ClientIndex j = 1; j <= 5; ++j) {
        if (!pedersen_verify(evaluate(poly, 1, j, params), c, params)) return "honest share rejected";
      }
    }
    return "";
  }));

  out.push_back(check("sharing.pedersen_binding_count", [&]() -> std::string {
    // Every target value of the commitment product is hit by exactly q pairs (s, s').
    for (unsigned long target = 0; target < q; ++target) {
      const GroupElement want = pow_mod(params, GroupElement(reference_g), Scalar(target));
      std::size_t hits = 0;
      for (unsigned long s = 0; s < q; ++s) {
        for (unsigned long sp = 0; sp < q; ++sp) {
          const GroupElement lhs = mul_mod(params, pow_mod(params, params.generator(), Scalar(s)),
                                           pow_mod(params, params.pedersen_base(), Scalar(sp)));
          hits += lhs == want ? 1 : 0;
        }
      }
      if (hits != q) return "target " + std::to_string(target) + " has " + std::to_string(hits) + " openings";
    }
    return "";
  }));

  out.push_back(check("sharing.feldman_unique_opening", [&]() -> std::string {
    Rng rng = Rng::from_seed("selftest-feldman");
    for (int trial = 0; trial < 10; ++trial) {
      const auto poly = sample_polynomial_pair(3, params, rng);
      const auto a = feldman_commit(poly, params);
      for (ClientIndex j = 1; j <= 5; ++j) {
        const ShareBundle honest = evaluate(poly, 1, j, params);
        std::size_t accepted = 0;
        for (unsigned long s = 0; s < q; ++s) {
          ShareBundle forged = honest;
          forged.s = Scalar(s);
          if (feldman_verify(forged, a, params)) {
            ++accepted;
            if (!(forged.s == honest.s)) return "forged share accepted";
          }
        }
        if (accepted != 1) return "expected exactly one accepting share";
      }
    }
    return "";
  }));

  out.push_back(check("sharing.lagrange_all_subsets", [&]() -> std::string {
    Rng rng = Rng::from_seed("selftest-lagrange");
    for (std::size_t t = 1; t <= 5; ++t) {
      const auto poly = sample_polynomial_pair(t, params, rng);
      std::string failure;
      for_each_subset(5, t, [&](const std::vector<ClientIndex>& subset) {
        std::vector<std::pair<ClientIndex, Scalar>> pts;
        for (ClientIndex i : subset) pts.emplace_back(i, evaluate(poly, 1, i, params).s);
        if (!(reconstruct_at_zero(pts, params) == poly.secret())) failure = "reconstruction failed";
      });
      if (!failure.empty()) return failure;
    }
    return "";
  }));

  out.push_back(check("ahe.threshold_decrypt_exhaustive", [&]() -> std::string {
    const std::vector<std::pair<std::size_t, std::size_t>> cases = {{3, 2}, {4, 3}, {5, 3}};
    for (auto [n, t] : cases) {
      MessageBus bus;
      auto clients = make_clients(n, Rng::from_seed("selftest-ahe").child("n", n));
      const auto tr = run_fkg(clients, t, params, {}, bus);
      Rng rng = Rng::from_seed("selftest-ahe-msg").child("n", n);
      // All message vectors with T * sum < q, so the result is unique in the toy group.
      const unsigned long max_sum = (q - 1) / t;
      std::vector<unsigned long> m(n, 0);
      std::string failure;
      std::function<void(std::size_t, unsigned long)> rec = [&](std::size_t k, unsigned long left) {
        if (!failure.empty()) return;
        if (k == n) {
          std::vector<Ciphertext> cts;
          for (auto v : m) cts.push_back(encrypt(BigInt(v), tr.h, params, rng));
          const Ciphertext agg = aggregate(cts, params);
          const unsigned long sum = std::accumulate(m.begin(), m.end(), 0ul);
          for_each_subset(n, t, [&](const std::vector<ClientIndex>& subset) {
            std::vector<PartialDecryption> pds;
            for (ClientIndex i : subset) {
              pds.push_back(partial_decrypt(agg, i, clients[i - 1].state().x_i,
                                            lagrange_coefficient(i, subset, params), t, params));
            }
            const auto got = decrypt_aggregate(agg, pds, t, RecoveryMode::kBruteForce, q, params);
            const unsigned long want = mutate ? t * sum + 1 : t * sum;
            if (got != want) failure = "recovered " + std::to_string(got) + ", expected " + std::to_string(want);
          });
          return;
        }
        for (unsigned long v = 0; v <= left; ++v) {
          m[k] = v;
          rec(k + 1, left - v);
        }
        m[k] = 0;
      };
      rec(0, max_sum);
      if (!failure.empty()) return "(n=" + std::to_string(n) + ", T=" + std::to_string(t) + ") " + failure;
    }
    return "";
  }));

  auto fkg_case = [&](const std::string& label, std::size_t n, std::size_t t, AdversaryPlan plan,
                      const std::vector<ClientIndex>& expect_disqualified,
                      const std::vector<ClientIndex>& expect_reconstructed) {
    return check("fkg." + label, [&, plan, n, t]() -> std::string {
      MessageBus bus;
      auto clients = make_clients(n, Rng::from_seed("selftest-fkg-" + label));
      const auto tr = run_fkg(clients, t, params, plan, bus);
      for (ClientIndex d : expect_disqualified) {
        if (!tr.disqualified.contains(d)) return "client " + std::to_string(d) + " not disqualified";
      }
      if (tr.disqualified.size() != expect_disqualified.size()) return "honest client disqualified";
      if (std::vector<ClientIndex>(tr.reconstructed.begin(), tr.reconstructed.end()) != expect_reconstructed) {
        return "unexpected set of reconstructed public key parts";
      }
      Scalar z(0ul);
      for (ClientIndex i : tr.qual) z = add(params, z, clients[i - 1].secret_for_testing());
      const GroupElement oracle = pow_mod(params, GroupElement(reference_g), z);
      if (!(oracle == tr.h)) return "public key differs from the oracle";
      std::string failure;
      std::vector<ClientIndex> honest;
      for (ClientIndex i : tr.qual) {
        if (plan.find(i) == nullptr) honest.push_back(i);
      }
      for (const auto& c : clients) {
        if (tr.qual.contains(c.index()) && plan.find(c.index()) == nullptr && !(c.state().public_key == tr.h)) {
          failure = "client " + std::to_string(c.index()) + " assembled a different key";
        }
      }
      for_each_subset(honest.size(), t, [&](const std::vector<ClientIndex>& pos) {
        Scalar acc(0ul);
        std::vector<ClientIndex> subset;
        for (ClientIndex k : pos) subset.push_back(honest[k - 1]);
        for (ClientIndex i : subset) {
          acc = add(params, acc, mul(params, lagrange_coefficient(i, subset, params), clients[i - 1].state().x_i));
        }
        if (!(pow_mod(params, params.generator(), acc) == tr.h)) failure = "Lagrange-weighted key shares miss h";
      });
      return failure;
    });
  };
  out.push_back(fkg_case("honest", 5, 3, {}, {}, {}));
  out.push_back(fkg_case("bad_share", 5, 3, AdversaryPlan{{{2, Misbehavior::kBadShare, {}}}}, {2}, {}));
  out.push_back(fkg_case("fake_A0", 5, 3, AdversaryPlan{{{4, Misbehavior::kFakeA0, {}}}}, {}, {4}));
  out.push_back(fkg_case("mixed", 7, 4,
                         AdversaryPlan{{{1, Misbehavior::kBadShare, {3, 5}}, {6, Misbehavior::kFakeA0, {}},
                                        {7, Misbehavior::kSilent, {}}}},
                         {1, 7}, {6}));
  return out;
}

}  // namespace daeq
