#include <gtest/gtest.h>

#include "daeq/config.hpp"
#include "daeq/errors.hpp"

using namespace daeq;

TEST(Config, DefaultsAreValid) {
  const ExperimentConfig cfg = config_from_json("{}");
  EXPECT_EQ(cfg.total_clients, 8u);
  EXPECT_EQ(cfg.participants(), 8u);
  EXPECT_EQ(cfg.threshold_for(8), 5u);
  EXPECT_EQ(cfg.encoding_bits, 10);
  EXPECT_DOUBLE_EQ(cfg.lr, 0.1);
  EXPECT_DOUBLE_EQ(cfg.lr_decay, 0.995);
  EXPECT_DOUBLE_EQ(cfg.test_fraction, 0.1);
  EXPECT_EQ(cfg.pipeline, Pipeline::kFullEncrypted);
}

TEST(Config, NestedKeysParse) {
  const ExperimentConfig cfg = config_from_json(R"({
    "seed": 9, "clients": {"N": 10, "C": 0.5, "threshold": 4}, "rounds": 3,
    "training": {"epochs": 1, "batch_size": 8, "lr": 0.05},
    "encoding": {"bits": 12}, "recovery": {"mode": "bruteforce", "max_steps": 1000},
    "pipeline": "quant_approx",
    "adversaries": [{"client": 3, "behavior": "bad_share", "targets": [1, 2]}]
  })");
  EXPECT_EQ(cfg.seed, 9u);
  EXPECT_EQ(cfg.participants(), 5u);
  EXPECT_EQ(cfg.threshold_for(5), 4u);
  EXPECT_EQ(cfg.encoding_bits, 12);
  EXPECT_EQ(cfg.recovery, RecoveryMode::kBruteForce);
  EXPECT_EQ(cfg.pipeline, Pipeline::kQuantApprox);
  ASSERT_EQ(cfg.adversaries.entries.size(), 1u);
  EXPECT_EQ(cfg.adversaries.entries[0].targets, (std::vector<ClientIndex>{1, 2}));
}

TEST(Config, RoundTripThroughJson) {
  const ExperimentConfig a = config_from_json(R"({"seed": 4, "pipeline": "plain", "model": {"hidden": [16, 8]}})");
  const ExperimentConfig b = config_from_json(config_to_json(a));
  EXPECT_EQ(config_to_json(a), config_to_json(b));
  EXPECT_EQ(b.hidden, (std::vector<std::size_t>{16, 8}));
}

TEST(Config, ValidationErrors) {
  EXPECT_THROW(config_from_json(R"({"encoding": {"bits": 16}})"), ConfigError);
  EXPECT_THROW(config_from_json(R"({"encoding": {"bits": 1}})"), ConfigError);
  EXPECT_THROW(config_from_json(R"({"clients": {"N": 1}})"), ConfigError);
  EXPECT_THROW(config_from_json(R"({"clients": {"C": 0}})"), ConfigError);
  EXPECT_THROW(config_from_json(R"({"clients": {"N": 4, "C": 0.25}})"), ConfigError);
  EXPECT_THROW(config_from_json(R"({"clients": {"threshold": 4}})"), ConfigError);
  EXPECT_THROW(config_from_json(R"({"pipeline": "fast"})"), ConfigError);
  EXPECT_THROW(config_from_json(R"({"colour": 1})"), ConfigError);
  EXPECT_THROW(config_from_json(R"({"training": {"speed": 1}})"), ConfigError);
  EXPECT_THROW(config_from_json("not json"), ConfigError);
  EXPECT_THROW(config_from_json(R"({"adversaries": [{"client": 99, "behavior": "silent"}]})"), ConfigError);
}

TEST(Config, DottedOverrides) {
  std::string text = "{}";
  text = apply_override(text, "encoding.bits=6");
  text = apply_override(text, "pipeline=plain");
  text = apply_override(text, "clients.C=0.5");
  const ExperimentConfig cfg = config_from_json(text);
  EXPECT_EQ(cfg.encoding_bits, 6);
  EXPECT_EQ(cfg.pipeline, Pipeline::kPlain);
  EXPECT_DOUBLE_EQ(cfg.fraction, 0.5);
  EXPECT_THROW(config_from_json(apply_override("{}", "encoding.bits=16")), ConfigError);
  EXPECT_THROW(apply_override("{}", "novalue"), ConfigError);
}

TEST(Config, PipelineNames) {
  for (auto p : {Pipeline::kPlain, Pipeline::kQuantOnly, Pipeline::kQuantApprox, Pipeline::kFullEncrypted}) {
    EXPECT_EQ(parse_pipeline(pipeline_name(p)), p);
  }
}
