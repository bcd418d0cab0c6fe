#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "daeq/bus.hpp"
#include "daeq/config.hpp"
#include "daeq/fkg.hpp"
#include "daeq/model.hpp"

namespace daeq {

/// One row of metrics.csv. Per-client quantities are the maximum over the
/// clients of the round, which equals the common value in honest rounds.
struct RoundMetrics {
  std::uint32_t round = 0;
  std::size_t participants = 0;
  std::size_t threshold = 0;
  std::size_t qual = 0;
  std::size_t contributors = 0;
  std::size_t decryptors_replaced = 0;
  std::size_t fkg_attempts = 0;
  double learning_rate = 0.0;
  double train_loss = 0.0;
  std::uint64_t test_correct = 0;
  std::uint64_t test_total = 0;
  double test_accuracy = 0.0;
  std::uint64_t enc_ciphertexts = 0;       // group elements uploaded per contributing client
  std::uint64_t dec_ciphertexts = 0;       // group elements downloaded plus uploaded per decryptor
  std::uint64_t bytes_enc_upload = 0;      // per contributing client
  std::uint64_t bytes_ternary_upload = 0;  // per contributing client
  std::uint64_t bytes_dec_download = 0;    // per decryptor
  std::uint64_t bytes_dec_upload = 0;      // per decryptor
  std::uint64_t bytes_total = 0;           // every message of the round
  std::uint64_t recovery_steps = 0;        // summed over tensors

  // Wall-clock seconds. Written to timings.csv only, so metrics.csv stays reproducible.
  double time_train = 0.0;
  double time_encrypt = 0.0;
  double time_decrypt = 0.0;
  double time_recover = 0.0;
};

/// Column order of metrics.csv.
const std::vector<std::string>& metrics_columns();
std::string metrics_csv(const std::vector<RoundMetrics>& rows);
std::vector<RoundMetrics> parse_metrics_csv(std::string_view text);
std::string timings_csv(const std::vector<RoundMetrics>& rows);

/// Pool size: `configured` when nonzero, else DAEQ_WORKERS, else 1.
std::size_t resolve_workers(std::size_t configured);

/// Runs fn(0..count-1) on up to `workers` threads. The first exception is rethrown.
template <typename F>
void parallel_for(std::size_t count, std::size_t workers, F&& fn) {
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto body = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::jthread> threads;
  for (std::size_t w = 0; w < std::min(workers, count); ++w) threads.emplace_back(body);
  threads.clear();
  if (error) std::rethrow_exception(error);
}

/// Deterministic in-process federated training run.
class Simulator {
 public:
  explicit Simulator(ExperimentConfig cfg, bool keep_transcript = false);
  /// Uses `params` instead of loading or generating a group.
  Simulator(ExperimentConfig cfg, GroupParams params, bool keep_transcript = false);

  RoundMetrics run_round();
  /// Runs the remaining rounds.
  std::vector<RoundMetrics> run();

  const ExperimentConfig& config() const { return cfg_; }
  const Mlp& model() const { return model_; }
  const ModelParams& parameters() const { return theta_; }
  const ToyDataset& data() const { return data_; }
  const std::optional<GroupParams>& group() const { return params_; }
  const MessageBus& bus() const { return bus_; }
  const std::vector<FkgTranscript>& fkg_transcripts() const { return transcripts_; }
  const std::vector<RoundMetrics>& history() const { return history_; }
  std::uint32_t rounds_done() const { return round_; }

  /// Global parameters after each completed round, when recording is on.
  void record_trajectory(bool on) { record_ = on; }
  const std::vector<ModelParams>& trajectory() const { return trajectory_; }

  /// Accuracy of the current parameters on every client's test shard.
  double test_accuracy() const;

  std::string summary_json() const;
  /// Bus log plus key-generation transcripts. Needs keep_transcript.
  std::string transcript_json() const;

 private:
  struct KeyState {
    std::vector<ClientIndex> participants;
    std::vector<FkgClient> clients;
    FkgTranscript transcript;
    std::size_t attempts = 0;
  };

  void setup();
  std::vector<ClientIndex> select_participants();
  KeyState& ensure_key(const std::vector<ClientIndex>& participants, std::size_t threshold);

  ExperimentConfig cfg_;
  std::optional<GroupParams> params_;
  std::optional<EncodingConfig> encoding_;
  bool keep_transcript_;
  bool record_ = false;
  std::size_t workers_ = 1;
  Rng root_;
  ToyDataset data_;
  Mlp model_;
  ModelParams theta_;
  MessageBus bus_;
  std::optional<KeyState> key_;
  std::vector<FkgTranscript> transcripts_;
  std::vector<RoundMetrics> history_;
  std::vector<ModelParams> trajectory_;
  std::uint32_t round_ = 0;
};

/// Loads cfg.params_file when set, otherwise generates from the configured sizes and seed.
GroupParams load_group(const ExperimentConfig& cfg);

}  // namespace daeq
