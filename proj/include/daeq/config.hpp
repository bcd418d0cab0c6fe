#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "daeq/adversary.hpp"
#include "daeq/ahe.hpp"
#include "daeq/data.hpp"

namespace daeq {

enum class Pipeline { kPlain, kQuantOnly, kQuantApprox, kFullEncrypted };

std::string_view pipeline_name(Pipeline p);
Pipeline parse_pipeline(std::string_view name);

struct ExperimentConfig {
  std::uint64_t seed = 1;

  // Clients
  std::size_t total_clients = 8;  // N
  double fraction = 1.0;          // C
  std::size_t threshold = 0;      // 0 = smallest T > n/2

  // Training
  std::size_t rounds = 30;
  std::size_t epochs = 2;  // E
  std::size_t batch_size = 20;
  double lr = 0.1;
  double lr_decay = 0.995;
  /// Divide the summed ternary directions by the number of contributing clients.
  bool normalize_ternary = true;

  std::vector<std::size_t> hidden{48};
  BlobSpec blobs{};
  std::size_t classes_per_client = 2;
  double test_fraction = 0.1;

  // Encryption
  int encoding_bits = 10;
  RecoveryMode recovery = RecoveryMode::kAuto;
  std::uint64_t recovery_max_steps = 1ull << 26;
  Pipeline pipeline = Pipeline::kFullEncrypted;
  int key_bits = 64;
  int group_bits = 512;
  std::string group_seed = "daeq-fl";
  std::string params_file;  // overrides key_bits/group_bits when set
  bool fkg_per_round = true;
  std::size_t fkg_max_attempts = 3;

  AdversaryPlan adversaries;
  std::size_t workers = 0;  // 0 = DAEQ_WORKERS env or 1

  std::size_t participants() const;
  std::size_t threshold_for(std::size_t n) const;
  /// Throws ConfigError on the first invalid field.
  void validate() const;
};

/// Nested JSON document; unknown keys are rejected.
ExperimentConfig config_from_json(std::string_view text);
std::string config_to_json(const ExperimentConfig& cfg);

/// Applies "a.b.c=value" on the JSON form. The value is parsed as JSON when
/// possible and kept as a string otherwise.
std::string apply_override(std::string_view json_text, std::string_view assignment);

}  // namespace daeq
