#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>

#include "daeq/ahe.hpp"
#include "daeq/codec.hpp"
#include "daeq/errors.hpp"
#include "daeq/fkg.hpp"
#include "daeq/simulator.hpp"

using namespace daeq;

namespace {

struct Verdict {
  bool ok = true;
  std::string detail;
};

int g_failures = 0;

void report(int id, const std::string& title, const std::function<Verdict()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!v.ok) ++g_failures;
  std::cout << (v.ok ? "PASS" : "FAIL") << " [" << id << "] " << title << ": " << v.detail << " ("
            << std::fixed << std::setprecision(1) << secs << " s)" << std::endl;
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

std::vector<ClientIndex> iota_ids(std::size_t n) {
  std::vector<ClientIndex> v(n);
  std::iota(v.begin(), v.end(), 1u);
  return v;
}

std::vector<FkgClient> make_clients(std::size_t n, const Rng& rng) {
  std::vector<FkgClient> clients;
  for (ClientIndex i = 1; i <= n; ++i) clients.emplace_back(i, rng.child("client", i));
  return clients;
}

GroupParams large_group() {
  std::ifstream in(DAEQ_CONFIG_DIR "/group_3072.txt");
  if (!in) throw Error("missing configs/group_3072.txt");
  std::stringstream ss;
  ss << in.rdbuf();
  GroupParams p = parse_params(ss.str());
  validate_params(p);
  return p;
}

std::uint64_t threshold_decrypt(const std::vector<FkgClient>& clients, const Ciphertext& agg,
                                const std::vector<ClientIndex>& subset, std::size_t t, const GroupParams& p) {
  std::vector<PartialDecryption> pds;
  for (ClientIndex i : subset) {
    pds.push_back(partial_decrypt(agg, i, clients[i - 1].state().x_i, lagrange_coefficient(i, subset, p), t, p));
  }
  return decrypt_aggregate(agg, pds, t, RecoveryMode::kBruteForce, 1ull << 24, p);
}

ExperimentConfig toy_config(std::uint64_t seed, Pipeline pipeline) {
  ExperimentConfig cfg;
  cfg.seed = seed;
  cfg.total_clients = 8;
  cfg.fraction = 1.0;
  cfg.rounds = 30;
  cfg.encoding_bits = 10;
  cfg.pipeline = pipeline;
  return cfg;
}

double final_accuracy(const ExperimentConfig& cfg) {
  Simulator sim(cfg);
  return sim.run().back().test_accuracy;
}

std::string pct(double x) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(2) << 100.0 * x << "%";
  return s.str();
}

// Criterion 1
Verdict threshold_decryption() {
  const GroupParams toy = toy_params();
  std::size_t toy_checks = 0;
  for (auto [n, t] : std::vector<std::pair<std::size_t, std::size_t>>{{3, 2}, {4, 3}, {5, 3}}) {
    MessageBus bus;
    auto clients = make_clients(n, Rng::from_seed("acc1-toy").child("n", n));
    const auto tr = run_fkg(clients, t, toy, {}, bus);
    Rng rng = Rng::from_seed("acc1-toy-msg").child("n", n);
    // Every message vector with T * sum < q, so the toy result is unique.
    const unsigned long limit = (toy.q.get_ui() - 1) / t;
    std::vector<unsigned long> m(n, 0);
    std::function<bool(std::size_t, unsigned long)> rec = [&](std::size_t k, unsigned long left) -> bool {
      if (k == n) {
        std::vector<Ciphertext> cts;
        for (auto v : m) cts.push_back(encrypt(BigInt(v), tr.h, toy, rng));
        const Ciphertext agg = aggregate(cts, toy);
        const unsigned long expect = t * std::accumulate(m.begin(), m.end(), 0ul);
        bool ok = true;
        for_each_subset(iota_ids(n), t, [&](const std::vector<ClientIndex>& s) {
          ok = ok && threshold_decrypt(clients, agg, s, t, toy) == expect;
          ++toy_checks;
        });
        return ok;
      }
      for (unsigned long v = 0; v <= left; ++v) {
        m[k] = v;
        if (!rec(k + 1, left - v)) return false;
      }
      m[k] = 0;
      return true;
    };
    if (!rec(0, limit)) return {false, "toy group mismatch at (n=" + std::to_string(n) + ", T=" + std::to_string(t) + ")"};
  }

  const GroupParams big = large_group();
  const std::size_t n = 5, t = 3;
  MessageBus bus;
  auto clients = make_clients(n, Rng::from_seed("acc1-big"));
  const auto tr = run_fkg(clients, t, big, {}, bus);
  Rng rng = Rng::from_seed("acc1-big-msg");
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Ciphertext> cts;
    std::uint64_t sum = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::uint64_t v = rng.uniform_below(BigInt(1024ul)).get_ui();
      sum += v;
      cts.push_back(encrypt(BigInt(static_cast<unsigned long>(v)), tr.h, big, rng));
    }
    std::vector<ClientIndex> ids = iota_ids(n);
    shuffle(std::span<ClientIndex>(ids), rng);
    std::vector<ClientIndex> subset(ids.begin(), ids.begin() + t);
    std::sort(subset.begin(), subset.end());
    const std::uint64_t got = threshold_decrypt(clients, aggregate(cts, big), subset, t, big);
    if (got != t * sum) {
      return {false, "3072-bit trial " + std::to_string(trial) + " recovered " + std::to_string(got) + ", expected " +
                         std::to_string(t * sum)};
    }
  }
  return {true, std::to_string(toy_checks) + " toy subset decryptions and 100 random 3072-bit trials exact"};
}

// Criterion 2
Verdict fkg_robustness() {
  const GroupParams p = toy_params();
  struct Case {
    std::string name;
    std::size_t n, t;
    AdversaryPlan plan;
  };
  const std::vector<Case> cases = {
      {"none", 5, 3, {}},
      {"bad_share", 5, 3, AdversaryPlan{{{2, Misbehavior::kBadShare, {}}}}},
      {"fake_A0", 5, 3, AdversaryPlan{{{4, Misbehavior::kFakeA0, {}}}}},
      {"mixed", 7, 4,
       AdversaryPlan{{{1, Misbehavior::kBadShare, {}}, {5, Misbehavior::kFakeA0, {}}, {7, Misbehavior::kSilent, {}}}}},
  };
  std::size_t identities = 0;
  for (const auto& c : cases) {
    MessageBus bus;
    auto clients = make_clients(c.n, Rng::from_seed("acc2-" + c.name));
    const auto tr = run_fkg(clients, c.t, p, c.plan, bus);
    // Oracle: g to the sum of the QUAL dealers' secrets.
    Scalar z(0ul);
    for (ClientIndex i : tr.qual) z = add(p, z, clients[i - 1].secret_for_testing());
    if (!(pow_mod(p, p.generator(), z) == tr.h)) return {false, c.name + ": h differs from oracle"};
    std::vector<ClientIndex> honest;
    for (ClientIndex i : tr.qual) {
      if (!c.plan.find(i)) honest.push_back(i);
    }
    bool ok = true;
    for_each_subset(honest, c.t, [&](const std::vector<ClientIndex>& s) {
      Scalar acc(0ul);
      for (ClientIndex i : s) acc = add(p, acc, mul(p, lagrange_coefficient(i, s, p), clients[i - 1].state().x_i));
      ok = ok && pow_mod(p, p.generator(), acc) == tr.h;
      ++identities;
    });
    if (!ok) return {false, c.name + ": Lagrange-weighted key shares do not reproduce h"};
  }
  return {true, "4 plans, h equals oracle, " + std::to_string(identities) + " T-subset identities hold"};
}

// Criterion 3
Verdict vss_verification() {
  const GroupParams p = toy_params();
  const unsigned long q = p.q.get_ui();
  unsigned long w = 0;  // oracle discrete log of y, found by search
  while (!(pow_mod(p, p.generator(), Scalar(w)) == p.pedersen_base())) ++w;
  Rng rng = Rng::from_seed("acc3");
  std::size_t honest = 0, honest_ok = 0, forged_accept = 0, oracle_collisions = 0, feldman_forged = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto poly = sample_polynomial_pair(3, p, rng);
    const auto pc = pedersen_commit(poly, p);
    const auto fc = feldman_commit(poly, p);
    for (ClientIndex j = 1; j <= 5; ++j) {
      const ShareBundle share = evaluate(poly, 1, j, p);
      ++honest;
      honest_ok += pedersen_verify(share, pc, p) && feldman_verify(share, fc, p) ? 1 : 0;
      const unsigned long target = (share.s.value.get_ui() + w * share.s_prime.value.get_ui()) % q;
      for (unsigned long s = 0; s < q; ++s) {
        for (unsigned long sp = 0; sp < q; ++sp) {
          if (s == share.s.value.get_ui() && sp == share.s_prime.value.get_ui()) continue;
          ShareBundle forged = share;
          forged.s = Scalar(s);
          forged.s_prime = Scalar(sp);
          const bool accepted = pedersen_verify(forged, pc, p);
          const bool collision = (s + w * sp) % q == target;
          forged_accept += accepted ? 1 : 0;
          oracle_collisions += collision ? 1 : 0;
          if (accepted != collision) return {false, "Pedersen acceptance outside oracle collisions"};
        }
        if (s != share.s.value.get_ui()) {
          ShareBundle forged = share;
          forged.s = Scalar(s);
          feldman_forged += feldman_verify(forged, fc, p) ? 1 : 0;
        }
      }
    }
  }
  if (honest_ok != honest) return {false, std::to_string(honest - honest_ok) + " honest shares rejected"};
  if (feldman_forged != 0) return {false, "Feldman accepted a forged share"};
  return {true, std::to_string(honest) + "/" + std::to_string(honest) + " honest shares verify; " +
                    std::to_string(forged_accept) + " forged Pedersen acceptances = " +
                    std::to_string(oracle_collisions) + " oracle collisions; 0 forged Feldman acceptances"};
}

// Criterion 4
Verdict codec_round_trip() {
  const GroupParams p = large_group();
  Rng rng = Rng::from_seed("acc4");
  double worst_ratio = 0.0;
  for (int b = kMinEncodingBits; b <= kMaxEncodingBits; ++b) {
    const auto cfg = EncodingConfig::make(b, p.q);
    const double bound = std::ldexp(1.0, -(b + 1));
    for (int i = 0; i < 10000; ++i) {
      const double x = (2.0 * rng.uniform01() - 1.0) * 1000.0;
      const double err = std::abs(decode(encode(x, cfg), cfg) - x);
      if (err > bound) return {false, "b=" + std::to_string(b) + " error " + std::to_string(err)};
      worst_ratio = std::max(worst_ratio, err / bound);
    }
    int dead = 0;
    for (const BigInt& m : {BigInt(cfg.int_max + 1), BigInt(p.q / 2), BigInt(p.q - cfg.int_max)}) {
      try {
        decode(Scalar(m), cfg);
      } catch (const DecodeDeadZone&) {
        ++dead;
      }
    }
    if (dead != 3) return {false, "dead-zone value decoded at b=" + std::to_string(b)};
  }
  std::ostringstream s;
  s << "14 x 10^4 values within 2^-(b+1) (worst " << std::setprecision(3) << worst_ratio
    << " of bound); dead-zone inputs raise";
  return {true, s.str()};
}

// Criterion 5
Verdict terngrad_unbiased() {
  Rng rng = Rng::from_seed("acc5");
  const int draws = 100000;
  const std::size_t dim = 40;
  double worst_pass = 1.0;
  for (int v = 0; v < 20; ++v) {
    GradientTensor g{{dim}, std::vector<double>(dim)};
    for (double& x : g.values) x = rng.normal() * 0.1;
    std::vector<double> sum(dim, 0.0);
    double s = 0.0;
    for (int d = 0; d < draws; ++d) {
      const TernaryGradient t = ternarize(g, rng);
      s = t.s;
      for (std::size_t k = 0; k < dim; ++k) sum[k] += t.dirs[k];
    }
    const double tol = 4.0 * s / std::sqrt(static_cast<double>(draws));
    std::size_t pass = 0;
    for (std::size_t k = 0; k < dim; ++k) pass += std::abs(s * sum[k] / draws - g.values[k]) <= tol ? 1 : 0;
    const double frac = static_cast<double>(pass) / dim;
    worst_pass = std::min(worst_pass, frac);
    if (frac < 0.95) return {false, "vector " + std::to_string(v) + " only " + pct(frac) + " of components pass"};
  }
  return {true, "20 vectors x 10^5 draws, worst vector " + pct(worst_pass) + " of components within 4s/sqrt(N)"};
}

// Criterion 6
Verdict ciphertext_accounting() {
  const GroupParams big = large_group();
  std::ostringstream detail;
  for (const auto& [hidden, L] : std::vector<std::pair<std::vector<std::size_t>, std::uint64_t>>{
           {{}, 2}, {{24, 16, 8}, 8}}) {
    ExperimentConfig cfg = toy_config(5, Pipeline::kFullEncrypted);
    cfg.total_clients = 4;
    cfg.rounds = 1;
    cfg.hidden = hidden;
    Simulator sim(cfg, big);
    const RoundMetrics m = sim.run_round();
    if (sim.model().tensor_count() != L) return {false, "model has wrong tensor count"};
    const std::string label = std::to_string(m.enc_ciphertexts) + "+" + std::to_string(m.dec_ciphertexts);
    if (m.enc_ciphertexts != 2 * L || m.dec_ciphertexts != 3 * L) return {false, "L=" + std::to_string(L) + " gave " + label};
    if (m.bytes_enc_upload != L * 2 * 384) return {false, "upload bytes " + std::to_string(m.bytes_enc_upload)};
    if (L == 8 && label != "16+24") return {false, "L=8 reported " + label};
    detail << "L=" << L << " -> " << label << " (" << m.bytes_enc_upload << " B upload)";
    if (L == 2) detail << ", ";
  }
  return {true, detail.str()};
}

// Criterion 7
Verdict learning_parity(const std::vector<std::uint64_t>& seeds, const AdversaryPlan& plan, double* gap_out) {
  double plain = 0.0, full = 0.0;
  for (auto seed : seeds) {
    plain += final_accuracy(toy_config(seed, Pipeline::kPlain));
    ExperimentConfig cfg = toy_config(seed, Pipeline::kFullEncrypted);
    cfg.adversaries = plan;
    full += final_accuracy(cfg);
  }
  plain /= seeds.size();
  full /= seeds.size();
  const double gap = std::abs(plain - full);
  if (gap_out) *gap_out = gap;
  return {gap <= 0.02, "plain " + pct(plain) + ", full_encrypted " + pct(full) + ", gap " + pct(gap) + " (limit 2%)"};
}

// Criterion 8
Verdict recovery_and_trend() {
  const GroupParams p = large_group();
  std::size_t agree = 0;
  for (unsigned long m = 0; m < p.group_bits(); m += 7) {
    const GroupElement target = pow_mod_raw(p, p.encoding_base(), BigInt(m));
    if (recover_log(target, p) != m || recover_bruteforce(target, 1u << 14, p) != m) {
      return {false, "log and brute force disagree at " + std::to_string(m)};
    }
    ++agree;
  }
  const std::vector<int> bits{10, 8, 6, 4, 2};
  std::vector<double> mean(bits.size(), 0.0);
  for (std::size_t k = 0; k < bits.size(); ++k) {
    for (std::uint64_t seed : {1, 2, 3}) {
      ExperimentConfig cfg = toy_config(seed, Pipeline::kFullEncrypted);
      cfg.encoding_bits = bits[k];
      mean[k] += final_accuracy(cfg) / 3.0;
    }
  }
  std::ostringstream s;
  s << agree << " exponents agree; mean accuracy by b:";
  bool monotone = true;
  for (std::size_t k = 0; k < bits.size(); ++k) {
    s << " " << bits[k] << "->" << pct(mean[k]);
    if (k > 0 && mean[k] > mean[k - 1]) monotone = false;
  }
  return {monotone, s.str()};
}

// Criterion 9
Verdict dropout_robustness() {
  const std::size_t n = 8, t = default_threshold(n);
  ExperimentConfig base = toy_config(1, Pipeline::kFullEncrypted);
  base.rounds = 2;
  Simulator reference(base);
  reference.run();
  std::size_t plans = 0;
  bool identical = true;
  for_each_subset(iota_ids(n), n - t, [&](const std::vector<ClientIndex>& dropped) {
    ExperimentConfig cfg = base;
    for (ClientIndex i : dropped) cfg.adversaries.entries.push_back({i, Misbehavior::kDropout, {}});
    Simulator sim(cfg);
    sim.run();
    identical = identical && sim.parameters().size() == reference.parameters().size();
    for (std::size_t l = 0; identical && l < sim.parameters().size(); ++l) {
      identical = sim.parameters()[l].values == reference.parameters()[l].values;
    }
    ++plans;
  });
  if (!identical) return {false, "a dropout plan changed the aggregated update"};
  AdversaryPlan plan{{{2, Misbehavior::kDropout, {}}, {4, Misbehavior::kDropout, {}}, {7, Misbehavior::kDropout, {}}}};
  Verdict parity = learning_parity({1, 2, 3}, plan, nullptr);
  parity.detail = std::to_string(plans) + " dropout sets of size n-T=" + std::to_string(n - t) +
                  " complete with identical updates; 30-round parity with 3 dropouts: " + parity.detail;
  return parity;
}

// Criterion 10
Verdict determinism() {
  namespace fs = std::filesystem;
  std::size_t configs = 0;
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(DAEQ_CONFIG_DIR)) {
    if (e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& path : files) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    ExperimentConfig cfg = config_from_json(ss.str());
    if (!cfg.params_file.empty()) cfg.params_file = (path.parent_path() / cfg.params_file).string();
    std::string first;
    for (std::size_t workers : {1, 3}) {
      cfg.workers = workers;
      Simulator sim(cfg);
      sim.run();
      const std::string csv = metrics_csv(sim.history());
      if (first.empty()) {
        first = csv;
      } else if (csv != first) {
        return {false, path.filename().string() + " produced different metrics.csv"};
      }
    }
    ++configs;
  }
  for (Pipeline p : {Pipeline::kPlain, Pipeline::kQuantOnly, Pipeline::kQuantApprox, Pipeline::kFullEncrypted}) {
    ExperimentConfig cfg = toy_config(9, p);
    cfg.rounds = 5;
    Simulator a(cfg);
    Simulator b(cfg);
    a.run();
    b.run();
    if (metrics_csv(a.history()) != metrics_csv(b.history())) {
      return {false, std::string(pipeline_name(p)) + " produced different metrics.csv"};
    }
    ++configs;
  }
  return {true, std::to_string(configs) + " configs produce byte-identical metrics.csv on repeat runs"};
}

}  // namespace

int main() {
  report(1, "threshold decryption correctness", threshold_decryption);
  report(2, "key generation correctness and robustness", fkg_robustness);
  report(3, "VSS completeness and soundness", vss_verification);
  report(4, "codec round trip", codec_round_trip);
  report(5, "ternary quantization unbiasedness", terngrad_unbiased);
  report(6, "ciphertext count accounting", ciphertext_accounting);
  report(7, "end-to-end learning parity", [] { return learning_parity({1, 2, 3}, {}, nullptr); });
  report(8, "recovery-mode equivalence and encoding-length trend", recovery_and_trend);
  report(9, "decryption dropout robustness", dropout_robustness);
  report(10, "determinism", determinism);
  std::cout << (g_failures == 0 ? "all criteria passed" : std::to_string(g_failures) + " criteria failed") << std::endl;
  return g_failures == 0 ? 0 : 1;
}
