#include "daeq/config.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "daeq/codec.hpp"
#include "daeq/errors.hpp"
#include "daeq/fkg.hpp"

namespace daeq {

using nlohmann::json;

std::string_view pipeline_name(Pipeline p) {
  switch (p) {
    case Pipeline::kPlain: return "plain";
    case Pipeline::kQuantOnly: return "quant_only";
    case Pipeline::kQuantApprox: return "quant_approx";
    case Pipeline::kFullEncrypted: return "full_encrypted";
  }
  return "unknown";
}

Pipeline parse_pipeline(std::string_view name) {
  for (auto p : {Pipeline::kPlain, Pipeline::kQuantOnly, Pipeline::kQuantApprox, Pipeline::kFullEncrypted}) {
    if (pipeline_name(p) == name) return p;
  }
  throw ConfigError("unknown pipeline '" + std::string(name) + "'");
}

std::size_t ExperimentConfig::participants() const {
  return static_cast<std::size_t>(std::llround(fraction * static_cast<double>(total_clients)));
}

std::size_t ExperimentConfig::threshold_for(std::size_t n) const {
  return threshold == 0 ? default_threshold(n) : threshold;
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& m) { throw ConfigError(m); };
  if (total_clients < 2) fail("clients.N must be at least 2");
  if (!(fraction > 0.0 && fraction <= 1.0)) fail("clients.C must lie in (0, 1]");
  const std::size_t n = participants();
  if (n < 2) fail("C * N must be at least 2");
  const std::size_t t = threshold_for(n);
  if (t * 2 <= n || t > n) fail("threshold must satisfy n/2 < T <= n");
  if (rounds < 1) fail("rounds must be positive");
  if (batch_size < 1) fail("training.batch_size must be positive");
  if (!(lr > 0.0) || !(lr_decay > 0.0)) fail("learning rate and decay must be positive");
  if (encoding_bits < kMinEncodingBits || encoding_bits > kMaxEncodingBits) {
    fail("encoding.bits must lie in [" + std::to_string(kMinEncodingBits) + ", " + std::to_string(kMaxEncodingBits) +
         "], got " + std::to_string(encoding_bits));
  }
  if (classes_per_client < 1) fail("data.classes_per_client must be positive");
  if (test_fraction < 0.0 || test_fraction >= 1.0) fail("data.test_fraction must lie in [0, 1)");
  if (params_file.empty() && (key_bits < 8 || group_bits <= key_bits)) fail("group bit sizes invalid");
  if (fkg_max_attempts < 1) fail("fkg.max_attempts must be positive");
  for (const auto& e : adversaries.entries) {
    if (e.client < 1 || e.client > total_clients) fail("adversary client index outside 1..N");
  }
}

namespace {

template <typename T>
void take(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

void reject_unknown(const json& obj, std::initializer_list<const char*> known, const std::string& where) {
  for (const auto& [k, _] : obj.items()) {
    bool ok = false;
    for (const char* name : known) ok = ok || k == name;
    if (!ok) throw ConfigError("unknown key '" + where + k + "'");
  }
}

}  // namespace

ExperimentConfig config_from_json(std::string_view text) {
  ExperimentConfig cfg;
  try {
    const json doc = json::parse(text);
    if (!doc.is_object()) throw ConfigError("config root must be an object");
    reject_unknown(doc, {"seed", "clients", "rounds", "training", "model", "data", "encoding", "recovery", "pipeline",
                         "group", "fkg", "adversaries", "workers"},
                   "");
    take(doc, "seed", cfg.seed);
    take(doc, "rounds", cfg.rounds);
    take(doc, "workers", cfg.workers);
    if (doc.contains("pipeline")) cfg.pipeline = parse_pipeline(doc.at("pipeline").get<std::string>());
    if (doc.contains("clients")) {
      const auto& c = doc.at("clients");
      reject_unknown(c, {"N", "C", "threshold"}, "clients.");
      take(c, "N", cfg.total_clients);
      take(c, "C", cfg.fraction);
      take(c, "threshold", cfg.threshold);
    }
    if (doc.contains("training")) {
      const auto& t = doc.at("training");
      reject_unknown(t, {"epochs", "batch_size", "lr", "lr_decay", "normalize_ternary"},
                     "training.");
      take(t, "epochs", cfg.epochs);
      take(t, "batch_size", cfg.batch_size);
      take(t, "lr", cfg.lr);
      take(t, "lr_decay", cfg.lr_decay);
      take(t, "normalize_ternary", cfg.normalize_ternary);
    }
    if (doc.contains("model")) {
      const auto& m = doc.at("model");
      reject_unknown(m, {"hidden"}, "model.");
      take(m, "hidden", cfg.hidden);
    }
    if (doc.contains("data")) {
      const auto& d = doc.at("data");
      reject_unknown(d, {"classes", "dim", "samples_per_class", "separation", "noise", "classes_per_client",
                         "test_fraction"},
                     "data.");
      take(d, "classes", cfg.blobs.classes);
      take(d, "dim", cfg.blobs.dim);
      take(d, "samples_per_class", cfg.blobs.samples_per_class);
      take(d, "separation", cfg.blobs.separation);
      take(d, "noise", cfg.blobs.noise);
      take(d, "classes_per_client", cfg.classes_per_client);
      take(d, "test_fraction", cfg.test_fraction);
    }
    if (doc.contains("encoding")) {
      const auto& e = doc.at("encoding");
      reject_unknown(e, {"bits"}, "encoding.");
      take(e, "bits", cfg.encoding_bits);
    }
    if (doc.contains("recovery")) {
      const auto& r = doc.at("recovery");
      reject_unknown(r, {"mode", "max_steps"}, "recovery.");
      if (r.contains("mode")) cfg.recovery = parse_recovery_mode(r.at("mode").get<std::string>());
      take(r, "max_steps", cfg.recovery_max_steps);
    }
    if (doc.contains("group")) {
      const auto& g = doc.at("group");
      reject_unknown(g, {"key_bits", "group_bits", "seed", "params_file"}, "group.");
      take(g, "key_bits", cfg.key_bits);
      take(g, "group_bits", cfg.group_bits);
      take(g, "seed", cfg.group_seed);
      take(g, "params_file", cfg.params_file);
    }
    if (doc.contains("fkg")) {
      const auto& f = doc.at("fkg");
      reject_unknown(f, {"per_round", "max_attempts"}, "fkg.");
      take(f, "per_round", cfg.fkg_per_round);
      take(f, "max_attempts", cfg.fkg_max_attempts);
    }
    if (doc.contains("adversaries")) {
      for (const auto& a : doc.at("adversaries")) {
        reject_unknown(a, {"client", "behavior", "targets"}, "adversaries[].");
        AdversaryEntry e;
        e.client = a.at("client").get<ClientIndex>();
        e.behavior = parse_misbehavior(a.at("behavior").get<std::string>());
        take(a, "targets", e.targets);
        cfg.adversaries.entries.push_back(std::move(e));
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

std::string config_to_json(const ExperimentConfig& cfg) {
  json adv = json::array();
  for (const auto& e : cfg.adversaries.entries) {
    adv.push_back({{"client", e.client}, {"behavior", misbehavior_name(e.behavior)}, {"targets", e.targets}});
  }
  json doc = {
      {"seed", cfg.seed},
      {"clients", {{"N", cfg.total_clients}, {"C", cfg.fraction}, {"threshold", cfg.threshold}}},
      {"rounds", cfg.rounds},
      {"training",
       {{"epochs", cfg.epochs},
        {"batch_size", cfg.batch_size},
        {"lr", cfg.lr},
        {"lr_decay", cfg.lr_decay},
        {"normalize_ternary", cfg.normalize_ternary}}},
      {"model", {{"hidden", cfg.hidden}}},
      {"data",
       {{"classes", cfg.blobs.classes},
        {"dim", cfg.blobs.dim},
        {"samples_per_class", cfg.blobs.samples_per_class},
        {"separation", cfg.blobs.separation},
        {"noise", cfg.blobs.noise},
        {"classes_per_client", cfg.classes_per_client},
        {"test_fraction", cfg.test_fraction}}},
      {"encoding", {{"bits", cfg.encoding_bits}}},
      {"recovery", {{"mode", recovery_mode_name(cfg.recovery)}, {"max_steps", cfg.recovery_max_steps}}},
      {"pipeline", pipeline_name(cfg.pipeline)},
      {"group",
       {{"key_bits", cfg.key_bits},
        {"group_bits", cfg.group_bits},
        {"seed", cfg.group_seed},
        {"params_file", cfg.params_file}}},
      {"fkg", {{"per_round", cfg.fkg_per_round}, {"max_attempts", cfg.fkg_max_attempts}}},
      {"adversaries", adv},
      {"workers", cfg.workers},
  };
  return doc.dump(2);
}

std::string apply_override(std::string_view json_text, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw ConfigError("override must look like key=value, got '" + std::string(assignment) + "'");
  }
  const std::string key(assignment.substr(0, eq));
  const std::string raw(assignment.substr(eq + 1));
  json doc = json::parse(json_text);
  json value = json::parse(raw, nullptr, /*allow_exceptions=*/false);
  if (value.is_discarded()) value = raw;
  std::string pointer = "/";
  for (char c : key) pointer += c == '.' ? '/' : c;
  doc[json::json_pointer(pointer)] = value;
  return doc.dump();
}

}  // namespace daeq
