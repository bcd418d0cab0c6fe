#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "daeq/ahe.hpp"
#include "daeq/codec.hpp"
#include "daeq/errors.hpp"
#include "daeq/fkg.hpp"
#include "daeq/selftest.hpp"
#include "daeq/simulator.hpp"

namespace fs = std::filesystem;
using namespace daeq;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitAbort = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
}

ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides,
                             std::optional<std::uint64_t> seed, const std::string& recovery) {
  std::string text = path.empty() ? std::string("{}") : read_file(path);
  try {
    for (const auto& o : overrides) text = apply_override(text, o);
    if (seed) text = apply_override(text, "seed=" + std::to_string(*seed));
    if (!recovery.empty()) text = apply_override(text, "recovery.mode=\"" + recovery + "\"");
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  ExperimentConfig cfg = config_from_json(text);
  if (!cfg.params_file.empty() && !path.empty() && fs::path(cfg.params_file).is_relative() &&
      !fs::exists(cfg.params_file)) {
    cfg.params_file = (fs::path(path).parent_path() / cfg.params_file).string();
  }
  return cfg;
}

int cmd_run(const std::string& config, const std::string& out_dir, const std::vector<std::string>& overrides,
            std::optional<std::uint64_t> seed, bool transcript, const std::string& recovery, int verbosity) {
  const ExperimentConfig cfg = load_config(config, overrides, seed, recovery);
  Simulator sim(cfg, transcript);
  fs::create_directories(out_dir);
  while (sim.rounds_done() < cfg.rounds) {
    const RoundMetrics m = sim.run_round();
    if (verbosity > 0) {
      std::cerr << "round " << m.round << " accuracy " << m.test_accuracy << " loss " << m.train_loss << "\n";
    }
  }
  write_file(fs::path(out_dir) / "metrics.csv", metrics_csv(sim.history()));
  write_file(fs::path(out_dir) / "timings.csv", timings_csv(sim.history()));
  write_file(fs::path(out_dir) / "summary.json", sim.summary_json());
  if (transcript) write_file(fs::path(out_dir) / "transcript.json", sim.transcript_json());
  std::cout << "final test accuracy " << sim.history().back().test_accuracy << " after " << sim.rounds_done()
            << " rounds; outputs in " << out_dir << "\n";
  return 0;
}

GroupParams demo_group(bool toy, int key_bits, int group_bits, const std::string& params_file) {
  if (!params_file.empty()) {
    ExperimentConfig cfg;
    cfg.params_file = params_file;
    return load_group(cfg);
  }
  if (toy) return toy_params();
  return generate_params(key_bits, group_bits, "daeq-fl");
}

int cmd_keygen_demo(std::size_t n, std::size_t threshold, const std::vector<ClientIndex>& bad_share,
                    const std::vector<ClientIndex>& fake_a0, const std::vector<ClientIndex>& silent,
                    const GroupParams& params, std::uint64_t seed) {
  AdversaryPlan plan;
  for (auto i : bad_share) plan.entries.push_back({i, Misbehavior::kBadShare, {}});
  for (auto i : fake_a0) plan.entries.push_back({i, Misbehavior::kFakeA0, {}});
  for (auto i : silent) plan.entries.push_back({i, Misbehavior::kSilent, {}});
  if (threshold == 0) threshold = default_threshold(n);
  const Rng rng = Rng::from_seed(seed).child("keygen-demo");
  std::vector<FkgClient> clients;
  for (ClientIndex i = 1; i <= n; ++i) clients.emplace_back(i, rng.child("client", i));
  MessageBus bus;
  const FkgTranscript tr = run_fkg(clients, threshold, params, plan, bus);
  std::size_t agree = 0;
  for (const auto& c : clients) agree += c.state().public_key && *c.state().public_key == tr.h ? 1 : 0;
  nlohmann::json j = nlohmann::json::parse(tr.to_json());
  j["clients_agreeing_on_h"] = agree;
  j["messages"] = bus.log().size();
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_bench_recovery(const std::vector<int>& bits_list, std::size_t trials, std::size_t n, std::size_t threshold,
                       const GroupParams& params, std::uint64_t seed, const std::string& out_path) {
  if (threshold == 0) threshold = default_threshold(n);
  Rng rng = Rng::from_seed(seed).child("bench-recovery");
  std::ostringstream csv;
  csv << "bits,mode,trial,tm,steps,seconds,recovered\n";
  for (int b : bits_list) {
    const EncodingConfig enc = EncodingConfig::make(b, params.q);
    for (std::size_t trial = 0; trial < trials; ++trial) {
      // n clients with scalars in [0, 1), equally weighted.
      BigInt m = 0;
      for (std::size_t i = 0; i < n; ++i) m += scale_and_encode(rng.uniform01(), 1, n, enc).value;
      const BigInt tm = m * static_cast<unsigned long>(threshold);
      const GroupElement target = pow_mod_raw(params, params.encoding_base(), tm);
      for (RecoveryMode mode : {RecoveryMode::kBruteForce, RecoveryMode::kLog}) {
        std::uint64_t steps = 0;
        std::uint64_t got = 0;
        bool ok = true;
        const auto t0 = std::chrono::steady_clock::now();
        try {
          got = recover(target, mode, tm.get_ui() + 1, params, &steps);
        } catch (const NotPowerOfBase&) {
          ok = false;
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        ok = ok && BigInt(static_cast<unsigned long>(got)) == tm;
        csv << b << ',' << recovery_mode_name(mode) << ',' << trial << ',' << tm.get_str() << ',' << steps << ','
            << secs << ',' << (ok ? 1 : 0) << '\n';
      }
    }
  }
  if (out_path.empty()) {
    std::cout << csv.str();
  } else {
    write_file(out_path, csv.str());
  }
  return 0;
}

int cmd_selftest() {
  const char* env = std::getenv("DAEQ_SELFTEST_MUTATE");
  const bool mutate = env != nullptr && std::string(env) == "1";
  const auto t0 = std::chrono::steady_clock::now();
  bool all = true;
  for (const auto& r : run_selftest(mutate)) {
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.name;
    if (!r.passed) std::cout << ": " << r.detail;
    std::cout << "\n";
    all = all && r.passed;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::cout << (all ? "selftest passed" : "selftest FAILED") << " in " << secs << " s\n";
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Federated learning with threshold additively homomorphic encryption and ternary quantization"};
  app.require_subcommand(1);
  int verbosity = 0;
  app.add_flag("-v,--verbose", verbosity, "Print progress to stderr");

  std::string config;
  std::string out_dir = "out";
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  bool transcript = false;
  std::string recovery;
  auto* run = app.add_subcommand("run", "Run an experiment and write metrics.csv, timings.csv and summary.json");
  run->add_option("--config", config, "JSON config file")->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory");
  run->add_option("--seed", seed, "Override the config seed");
  run->add_option("--set", overrides, "Dotted override key=value, repeatable");
  run->add_flag("--transcript", transcript, "Also write transcript.json");
  run->add_option("--recovery", recovery, "Recovery mode")->check(CLI::IsMember({"log", "bruteforce", "auto", "bsgs"}));

  std::size_t n = 5;
  std::size_t threshold = 0;
  std::vector<ClientIndex> bad_share;
  std::vector<ClientIndex> fake_a0;
  std::vector<ClientIndex> silent;
  bool toy = false;
  int key_bits = 64;
  int group_bits = 512;
  std::string params_file;
  std::uint64_t demo_seed = 1;
  auto* keygen = app.add_subcommand("keygen-demo", "Run one distributed key generation and print its transcript");
  keygen->add_option("--n", n, "Number of clients")->check(CLI::Range(2, 1000));
  keygen->add_option("--threshold", threshold, "Threshold T (default n/2 + 1)");
  keygen->add_option("--bad-share", bad_share, "Clients sending corrupted shares");
  keygen->add_option("--fake-a0", fake_a0, "Clients forging their public key part");
  keygen->add_option("--silent", silent, "Clients that never send");
  keygen->add_flag("--toy", toy, "Use the p=23 toy group");
  keygen->add_option("--key-bits", key_bits, "Bits of q");
  keygen->add_option("--group-bits", group_bits, "Bits of p");
  keygen->add_option("--params", params_file, "Group params file")->check(CLI::ExistingFile);
  keygen->add_option("--seed", demo_seed, "Seed");

  std::vector<int> bits_list{2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15};
  std::size_t trials = 5;
  std::string bench_out;
  std::size_t bench_n = 8;
  std::size_t bench_t = 0;
  auto* bench = app.add_subcommand("bench-recovery", "Measure discrete-log recovery cost per encoding bit length");
  bench->add_option("--bits", bits_list, "Encoding bit lengths")->check(CLI::Range(kMinEncodingBits, kMaxEncodingBits));
  bench->add_option("--trials", trials, "Random messages per bit length");
  bench->add_option("--clients", bench_n, "Summed client messages");
  bench->add_option("--threshold", bench_t, "Threshold T (default n/2 + 1)");
  bench->add_option("--key-bits", key_bits, "Bits of q");
  bench->add_option("--group-bits", group_bits, "Bits of p");
  bench->add_option("--params", params_file, "Group params file")->check(CLI::ExistingFile);
  bench->add_option("--seed", demo_seed, "Seed");
  bench->add_option("--out", bench_out, "CSV path (default stdout)");

  auto* selftest = app.add_subcommand("selftest", "Run the exhaustive toy-group checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) return cmd_run(config, out_dir, overrides, seed, transcript, recovery, verbosity);
    if (*keygen) {
      return cmd_keygen_demo(n, threshold, bad_share, fake_a0, silent,
                             demo_group(toy, key_bits, group_bits, params_file), demo_seed);
    }
    if (*bench) {
      return cmd_bench_recovery(bits_list, trials, bench_n, bench_t, demo_group(false, key_bits, group_bits, params_file),
                                demo_seed, bench_out);
    }
    if (*selftest) return cmd_selftest();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const PlanViolatesHonestMajority& e) {
    std::cerr << "invalid adversary plan: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InfeasiblePartition& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const AbortInsufficientQual& e) {
    std::cerr << "protocol abort: " << e.what() << "\n";
    return kExitAbort;
  } catch (const AbortDisputeUnresolvable& e) {
    std::cerr << "protocol abort: " << e.what() << "\n";
    return kExitAbort;
  } catch (const AbortInsufficientDecryptors& e) {
    std::cerr << "protocol abort: " << e.what() << "\n";
    return kExitAbort;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
