#include "daeq/simulator.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "daeq/ahe.hpp"
#include "daeq/errors.hpp"

namespace daeq {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void put_double(ByteWriter& w, double v) { w.u64(std::bit_cast<std::uint64_t>(v)); }
double get_double(ByteReader& r) { return std::bit_cast<double>(r.u64()); }

Bytes encode_doubles(std::span<const double> values) {
  ByteWriter w;
  w.u32(static_cast<std::uint32_t>(values.size()));
  for (double v : values) put_double(w, v);
  return std::move(w).take();
}

std::vector<double> decode_doubles(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  std::vector<double> out(r.u32());
  for (double& v : out) v = get_double(r);
  return out;
}

Bytes encode_u64s(std::initializer_list<std::uint64_t> values) {
  ByteWriter w;
  for (auto v : values) w.u64(v);
  return std::move(w).take();
}

Bytes encode_indices(std::span<const ClientIndex> ids) {
  ByteWriter w;
  w.u32(static_cast<std::uint32_t>(ids.size()));
  for (auto i : ids) w.u32(i);
  return std::move(w).take();
}

std::vector<ClientIndex> decode_indices(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  std::vector<ClientIndex> out(r.u32());
  for (auto& i : out) i = r.u32();
  return out;
}

// What one client computes locally in a round.
struct ClientUpload {
  ClientIndex id = 0;
  std::uint64_t samples = 0;
  double loss = 0.0;
  ModelParams delta;
  std::vector<TernaryGradient> ternary;
  std::vector<Ciphertext> cts;
};

bool contains(std::span<const ClientIndex> ids, ClientIndex i) { return std::ranges::binary_search(ids, i); }

}  // namespace

const std::vector<std::string>& metrics_columns() {
  static const std::vector<std::string> cols = {
      "round",           "participants",     "threshold",       "qual",
      "contributors",    "decryptors_replaced", "fkg_attempts",  "learning_rate",
      "train_loss",      "test_correct",     "test_total",      "test_accuracy",
      "enc_ciphertexts", "dec_ciphertexts",  "bytes_enc_upload", "bytes_ternary_upload",
      "bytes_dec_download", "bytes_dec_upload", "bytes_total",   "recovery_steps"};
  return cols;
}

namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string metrics_csv(const std::vector<RoundMetrics>& rows) {
  std::ostringstream out;
  const auto& cols = metrics_columns();
  for (std::size_t k = 0; k < cols.size(); ++k) out << (k ? "," : "") << cols[k];
  out << '\n';
  for (const auto& m : rows) {
    out << m.round << ',' << m.participants << ',' << m.threshold << ',' << m.qual << ',' << m.contributors << ','
        << m.decryptors_replaced << ',' << m.fkg_attempts << ',' << fmt_double(m.learning_rate) << ','
        << fmt_double(m.train_loss) << ',' << m.test_correct << ',' << m.test_total << ','
        << fmt_double(m.test_accuracy) << ',' << m.enc_ciphertexts << ',' << m.dec_ciphertexts << ','
        << m.bytes_enc_upload << ',' << m.bytes_ternary_upload << ',' << m.bytes_dec_download << ','
        << m.bytes_dec_upload << ',' << m.bytes_total << ',' << m.recovery_steps << '\n';
  }
  return out.str();
}

std::vector<RoundMetrics> parse_metrics_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line)) throw ParseError("metrics csv is empty");
  {
    std::vector<std::string> header;
    std::istringstream hs(line);
    for (std::string cell; std::getline(hs, cell, ',');) header.push_back(cell);
    if (header != metrics_columns()) throw ParseError("unexpected metrics csv header");
  }
  std::vector<RoundMetrics> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::istringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) f.push_back(cell);
    if (f.size() != metrics_columns().size()) throw ParseError("metrics row has " + std::to_string(f.size()) + " fields");
    try {
      RoundMetrics m;
      std::size_t k = 0;
      auto u = [&] { return std::stoull(f[k++]); };
      auto d = [&] { return std::stod(f[k++]); };
      m.round = static_cast<std::uint32_t>(u());
      m.participants = u();
      m.threshold = u();
      m.qual = u();
      m.contributors = u();
      m.decryptors_replaced = u();
      m.fkg_attempts = u();
      m.learning_rate = d();
      m.train_loss = d();
      m.test_correct = u();
      m.test_total = u();
      m.test_accuracy = d();
      m.enc_ciphertexts = u();
      m.dec_ciphertexts = u();
      m.bytes_enc_upload = u();
      m.bytes_ternary_upload = u();
      m.bytes_dec_download = u();
      m.bytes_dec_upload = u();
      m.bytes_total = u();
      m.recovery_steps = u();
      rows.push_back(m);
    } catch (const std::logic_error& e) {
      throw ParseError(std::string("bad metrics field: ") + e.what());
    }
  }
  return rows;
}

std::string timings_csv(const std::vector<RoundMetrics>& rows) {
  std::ostringstream out;
  out << "round,time_train,time_encrypt,time_decrypt,time_recover\n";
  for (const auto& m : rows) {
    out << m.round << ',' << fmt_double(m.time_train) << ',' << fmt_double(m.time_encrypt) << ','
        << fmt_double(m.time_decrypt) << ',' << fmt_double(m.time_recover) << '\n';
  }
  return out.str();
}

std::size_t resolve_workers(std::size_t configured) {
  if (configured > 0) return configured;
  if (const char* env = std::getenv("DAEQ_WORKERS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (const std::logic_error&) {
    }
    throw ConfigError("DAEQ_WORKERS must be a positive integer, got '" + std::string(env) + "'");
  }
  return 1;
}

GroupParams load_group(const ExperimentConfig& cfg) {
  if (!cfg.params_file.empty()) {
    std::ifstream in(cfg.params_file);
    if (!in) throw ConfigError("cannot open group params file '" + cfg.params_file + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    GroupParams params = parse_params(ss.str());
    validate_params(params);
    return params;
  }
  return generate_params(cfg.key_bits, cfg.group_bits, cfg.group_seed);
}

Simulator::Simulator(ExperimentConfig cfg, bool keep_transcript)
    : cfg_(std::move(cfg)),
      keep_transcript_(keep_transcript),
      root_(Rng::from_seed(cfg_.seed)),
      model_(cfg_.blobs.dim, cfg_.hidden, cfg_.blobs.classes) {
  cfg_.validate();
  if (cfg_.pipeline == Pipeline::kFullEncrypted) params_ = load_group(cfg_);
  setup();
}

Simulator::Simulator(ExperimentConfig cfg, GroupParams params, bool keep_transcript)
    : cfg_(std::move(cfg)),
      params_(std::move(params)),
      keep_transcript_(keep_transcript),
      root_(Rng::from_seed(cfg_.seed)),
      model_(cfg_.blobs.dim, cfg_.hidden, cfg_.blobs.classes) {
  cfg_.validate();
  setup();
}

void Simulator::setup() {
  workers_ = resolve_workers(cfg_.workers);
  if (params_) encoding_ = EncodingConfig::make(cfg_.encoding_bits, params_->q);
  Rng data_rng = root_.child("data");
  data_ = make_blobs(cfg_.blobs, data_rng);
  Rng part_rng = root_.child("partition");
  partition_noniid(data_, cfg_.total_clients, cfg_.classes_per_client, part_rng);
  Rng split_rng = root_.child("split");
  split_train_test(data_, cfg_.test_fraction, split_rng);
  for (std::size_t k = 0; k < cfg_.total_clients; ++k) {
    if (data_.train[k].empty()) throw InfeasiblePartition("client " + std::to_string(k + 1) + " has no training data");
  }
  Rng init_rng = root_.child("init");
  theta_ = model_.init(init_rng);
}

std::vector<ClientIndex> Simulator::select_participants() {
  std::vector<ClientIndex> ids(cfg_.total_clients);
  for (std::size_t k = 0; k < ids.size(); ++k) ids[k] = static_cast<ClientIndex>(k + 1);
  const std::size_t n = cfg_.participants();
  if (n < ids.size()) {
    Rng rng = root_.child("select", round_);
    shuffle(std::span<ClientIndex>(ids), rng);
    ids.resize(n);
    std::ranges::sort(ids);
  }
  return ids;
}

Simulator::KeyState& Simulator::ensure_key(const std::vector<ClientIndex>& participants, std::size_t threshold) {
  if (!cfg_.fkg_per_round && key_ && key_->participants == participants) {
    key_->attempts = 0;
    return *key_;
  }
  validate_plan(cfg_.adversaries, participants, threshold);
  for (std::size_t attempt = 0;; ++attempt) {
    KeyState ks;
    ks.participants = participants;
    const Rng base = root_.child("fkg", round_, attempt);
    for (ClientIndex id : participants) ks.clients.emplace_back(id, base.child("client", id));
    try {
      ks.transcript = run_fkg(ks.clients, threshold, *params_, cfg_.adversaries, bus_);
      ks.attempts = attempt + 1;
      transcripts_.push_back(ks.transcript);
      key_ = std::move(ks);
      return *key_;
    } catch (const AbortInsufficientQual&) {
      bus_.discard_pending();
      if (attempt + 1 >= cfg_.fkg_max_attempts) throw;
    } catch (const AbortDisputeUnresolvable&) {
      bus_.discard_pending();
      if (attempt + 1 >= cfg_.fkg_max_attempts) throw;
    }
  }
}

RoundMetrics Simulator::run_round() {
  if (round_ >= cfg_.rounds) throw Error("all configured rounds already ran");
  RoundMetrics m;
  m.round = round_ + 1;
  bus_.set_round(m.round);
  const std::size_t log_start = bus_.log().size();
  const double eta = cfg_.lr * std::pow(cfg_.lr_decay, static_cast<double>(round_));
  m.learning_rate = eta;

  const std::vector<ClientIndex> participants = select_participants();
  const std::size_t n = participants.size();
  const std::size_t threshold = cfg_.threshold_for(n);
  m.participants = n;
  m.threshold = threshold;
  const bool encrypted = cfg_.pipeline == Pipeline::kFullEncrypted;
  const std::size_t L = theta_.size();

  // Key generation and public-key download.
  KeyState* key = nullptr;
  std::vector<ClientIndex> qual;
  GroupElement pk;
  if (encrypted) {
    key = &ensure_key(participants, threshold);
    m.fkg_attempts = key->attempts;
    qual.assign(key->transcript.qual.begin(), key->transcript.qual.end());
    pk = key->transcript.h;
  }
  m.qual = encrypted ? qual.size() : n;

  std::vector<ClientIndex> contributors;
  for (ClientIndex id : participants) {
    if (inject_adversary(cfg_.adversaries, id, Phase::kUpload) == Misbehavior::kSilent) continue;
    if (encrypted && !contains(qual, id)) continue;
    contributors.push_back(id);
  }
  if (contributors.empty()) throw Error("no client contributed an update");
  m.contributors = contributors.size();

  std::vector<double> flat_theta;
  for (const auto& t : theta_) flat_theta.insert(flat_theta.end(), t.values.begin(), t.values.end());
  const Bytes model_payload = encode_doubles(flat_theta);
  for (ClientIndex id : contributors) {
    bus_.send(Envelope(Phase::kDownload, "model", kServer, id, model_payload));
  }

  // Local training, quantisation and encryption, one pre-assigned stream per client.
  std::uint64_t total_samples = 0;
  for (ClientIndex id : contributors) total_samples += data_.train[id - 1].size();
  std::vector<ClientUpload> uploads(contributors.size());
  auto t0 = Clock::now();
  parallel_for(contributors.size(), workers_, [&](std::size_t k) {
    ClientUpload& u = uploads[k];
    u.id = contributors[k];
    const auto& shard = data_.train[u.id - 1];
    u.samples = shard.size();
    Rng rng = root_.child("train", round_, u.id);
    LocalTrainResult res = local_train(model_, theta_, data_, shard, cfg_.epochs, cfg_.batch_size, eta, rng);
    u.loss = res.last_epoch_loss;
    u.delta = std::move(res.delta);
  });
  m.time_train = seconds_since(t0);

  t0 = Clock::now();
  if (cfg_.pipeline != Pipeline::kPlain) {
    parallel_for(uploads.size(), workers_, [&](std::size_t k) {
      ClientUpload& u = uploads[k];
      Rng trng = root_.child("ternary", round_, u.id);
      Rng erng = root_.child("encrypt", round_, u.id);
      for (const auto& d : u.delta) {
        GradientTensor g{d.shape, d.values};
        for (double& v : g.values) v = -v;
        u.ternary.push_back(ternarize(g, trng));
        if (encrypted) {
          const Scalar enc = scale_and_encode(u.ternary.back().s, u.samples, total_samples, *encoding_);
          u.cts.push_back(encrypt(enc.value, pk, *params_, erng));
        }
      }
    });
  }
  m.time_encrypt = seconds_since(t0);

  double loss_sum = 0.0;
  for (const auto& u : uploads) loss_sum += u.loss;
  m.train_loss = loss_sum / static_cast<double>(uploads.size());

  for (const auto& u : uploads) {
    if (cfg_.pipeline == Pipeline::kPlain) {
      std::vector<double> flat;
      for (const auto& d : u.delta) flat.insert(flat.end(), d.values.begin(), d.values.end());
      ByteWriter w;
      w.u64(u.samples);
      w.raw(encode_doubles(flat));
      bus_.send(Envelope(Phase::kUpload, "plain_update", u.id, kServer, std::move(w).take()));
      continue;
    }
    for (std::size_t l = 0; l < L; ++l) {
      const auto& tg = u.ternary[l];
      bus_.send(Envelope(Phase::kUpload, "ternary", u.id, kServer, pack_ternary(tg.dirs)));
      if (encrypted) {
        bus_.send(Envelope(Phase::kUpload, "ciphertext", u.id, kServer, serialize(u.cts[l], *params_), false, 2));
      } else {
        ByteWriter w;
        w.u32(static_cast<std::uint32_t>(l));
        put_double(w, tg.s);
        w.u64(u.samples);
        bus_.send(Envelope(Phase::kUpload, "scalar", u.id, kServer, std::move(w).take()));
      }
    }
  }

  // Server aggregation from what arrived on the bus.
  std::vector<std::vector<std::vector<std::int8_t>>> dirs(L);
  std::vector<std::vector<Ciphertext>> cts(L);
  std::vector<std::vector<double>> scalars(L);
  std::vector<std::vector<std::uint64_t>> sizes(L);
  std::vector<std::uint64_t> plain_sizes;
  std::vector<std::vector<double>> plain_deltas;
  std::map<ClientIndex, std::size_t> next_tensor;
  std::map<ClientIndex, std::size_t> next_ct;
  for (const auto& env : bus_.drain(kServer)) {
    const Bytes& payload = env.open(kServer);
    if (env.type() == "plain_update") {
      ByteReader r(payload);
      plain_sizes.push_back(r.u64());
      plain_deltas.push_back(decode_doubles(std::span(payload).subspan(8)));
    } else if (env.type() == "ternary") {
      const std::size_t l = next_tensor[env.from()]++;
      dirs.at(l).push_back(unpack_ternary(payload, theta_[l].size()));
    } else if (env.type() == "ciphertext") {
      const std::size_t l = next_ct[env.from()]++;
      cts.at(l).push_back(parse_ciphertext(payload, *params_));
    } else if (env.type() == "scalar") {
      ByteReader r(payload);
      const std::size_t l = r.u32();
      scalars.at(l).push_back(get_double(r));
      sizes.at(l).push_back(r.u64());
    }
  }

  UpdateOptions opts;
  opts.ternary_divisor = cfg_.normalize_ternary ? contributors.size() : 1;
  if (cfg_.pipeline == Pipeline::kPlain) {
    std::uint64_t total = 0;
    for (auto s : plain_sizes) total += s;
    for (std::size_t c = 0; c < plain_deltas.size(); ++c) {
      const double w = static_cast<double>(plain_sizes[c]) / static_cast<double>(total);
      std::size_t off = 0;
      for (auto& t : theta_) {
        for (double& v : t.values) v += w * plain_deltas[c][off++];
      }
    }
  } else if (cfg_.pipeline == Pipeline::kQuantOnly) {
    for (std::size_t l = 0; l < L; ++l) {
      std::vector<TernaryGradient> grads(dirs[l].size());
      for (std::size_t c = 0; c < grads.size(); ++c) grads[c] = {scalars[l][c], dirs[l][c]};
      const std::vector<double> agg = exact_ternary_aggregate(grads, sizes[l]);
      for (std::size_t k = 0; k < agg.size(); ++k) theta_[l].values[k] -= agg[k];
    }
  } else if (cfg_.pipeline == Pipeline::kQuantApprox) {
    for (std::size_t l = 0; l < L; ++l) {
      const double s_global = weighted_scalar_sum(scalars[l], sizes[l]);
      apply_scaled_directions(theta_[l].values, aggregate_ternary(dirs[l]), s_global, opts);
    }
  } else {
    std::vector<Ciphertext> agg(L);
    std::vector<std::vector<std::int32_t>> summed(L);
    for (std::size_t l = 0; l < L; ++l) {
      agg[l] = aggregate(cts[l], *params_);
      summed[l] = aggregate_ternary(dirs[l]);
    }

    // Threshold decryption with replacement of decryptors that do not answer.
    t0 = Clock::now();
    std::vector<ClientIndex> order = qual;
    Rng pick = root_.child("decryptors", round_);
    shuffle(std::span<ClientIndex>(order), pick);
    if (order.size() < threshold) throw AbortInsufficientDecryptors("QUAL smaller than T");
    std::vector<ClientIndex> subset(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(threshold));
    std::size_t next_candidate = threshold;
    std::set<ClientIndex> downloaded;
    std::map<ClientIndex, std::vector<PartialDecryption>> partials;
    std::map<ClientIndex, const FkgClient*> by_id;
    for (const auto& c : key->clients) by_id[c.index()] = &c;
    while (true) {
      std::vector<ClientIndex> sorted = subset;
      std::ranges::sort(sorted);
      for (ClientIndex d : sorted) {
        bus_.send(Envelope(Phase::kDecrypt, "decrypt_request", kServer, d, encode_indices(sorted)));
        if (downloaded.insert(d).second) {
          for (std::size_t l = 0; l < L; ++l) {
            bus_.send(Envelope(Phase::kDecrypt, "aggregate", kServer, d, serialize(agg[l], *params_), false, 2));
          }
        }
      }
      // Decryptors answer in parallel; messages are sent afterwards in index order.
      std::vector<std::vector<PartialDecryption>> answers(sorted.size());
      std::vector<std::vector<Envelope>> inboxes(sorted.size());
      for (std::size_t k = 0; k < sorted.size(); ++k) inboxes[k] = bus_.drain(sorted[k]);
      parallel_for(sorted.size(), workers_, [&](std::size_t k) {
        const ClientIndex d = sorted[k];
        const auto behavior = inject_adversary(cfg_.adversaries, d, Phase::kDecrypt);
        if (behavior == Misbehavior::kDropout || behavior == Misbehavior::kSilent) return;
        std::vector<ClientIndex> request;
        for (const auto& env : inboxes[k]) {
          if (env.type() == "decrypt_request") request = decode_indices(env.open(d));
        }
        const FkgClientState& st = by_id.at(d)->state();
        const Scalar lambda = lagrange_coefficient(d, request, *params_);
        for (std::size_t l = 0; l < L; ++l) {
          answers[k].push_back(partial_decrypt(agg[l], d, st.x_i, lambda, threshold, *params_));
        }
      });
      for (std::size_t k = 0; k < sorted.size(); ++k) {
        for (const auto& pd : answers[k]) {
          ByteWriter w;
          w.fixed(pd.pd.value, params_->element_bytes());
          bus_.send(Envelope(Phase::kDecrypt, "partial", sorted[k], kServer, std::move(w).take(), false, 1));
        }
      }
      partials.clear();
      for (const auto& env : bus_.drain(kServer)) {
        if (env.type() != "partial") continue;
        ByteReader r(env.open(kServer));
        partials[env.from()].push_back({env.from(), GroupElement(r.fixed(params_->element_bytes()))});
      }
      std::vector<ClientIndex> missing;
      for (ClientIndex d : subset) {
        if (!partials.contains(d) || partials.at(d).size() != L) missing.push_back(d);
      }
      if (missing.empty()) break;
      for (ClientIndex d : missing) {
        if (next_candidate >= order.size()) {
          throw AbortInsufficientDecryptors("fewer than T=" + std::to_string(threshold) +
                                            " QUAL clients answered the decryption request");
        }
        std::ranges::replace(subset, d, order[next_candidate++]);
        ++m.decryptors_replaced;
      }
    }
    m.time_decrypt = seconds_since(t0);

    t0 = Clock::now();
    std::vector<std::uint64_t> tm(L);
    std::vector<std::uint64_t> steps(L, 0);
    parallel_for(L, workers_, [&](std::size_t l) {
      std::vector<PartialDecryption> pds;
      for (ClientIndex d : subset) pds.push_back(partials.at(d)[l]);
      tm[l] = decrypt_aggregate(agg[l], pds, threshold, cfg_.recovery, cfg_.recovery_max_steps, *params_, &steps[l]);
    });
    m.time_recover = seconds_since(t0);
    for (std::size_t l = 0; l < L; ++l) {
      m.recovery_steps += steps[l];
      apply_global_update(theta_[l].values, summed[l], BigInt(static_cast<unsigned long>(tm[l])), threshold,
                          *encoding_, opts);
    }
  }

  // Client-side evaluation; only the counts reach the server.
  std::vector<std::size_t> correct(cfg_.total_clients);
  parallel_for(cfg_.total_clients, workers_,
               [&](std::size_t k) { correct[k] = model_.correct(theta_, data_, data_.test[k]); });
  for (std::size_t k = 0; k < cfg_.total_clients; ++k) {
    bus_.send(Envelope(Phase::kEvaluate, "eval_counts", static_cast<ClientIndex>(k + 1), kServer,
                       encode_u64s({correct[k], data_.test[k].size()})));
  }
  for (const auto& env : bus_.drain(kServer)) {
    ByteReader r(env.open(kServer));
    m.test_correct += r.u64();
    m.test_total += r.u64();
  }
  m.test_accuracy = m.test_total ? static_cast<double>(m.test_correct) / static_cast<double>(m.test_total) : 0.0;

  // Communication accounting from the bus log.
  std::map<ClientIndex, std::uint64_t> enc_elems, enc_bytes, tern_bytes, dec_elems, dec_down, dec_up;
  for (std::size_t k = log_start; k < bus_.log().size(); ++k) {
    const MessageRecord& r = bus_.log()[k];
    m.bytes_total += r.bytes;
    if (r.phase == Phase::kUpload && r.type == "ciphertext") {
      enc_elems[r.from] += r.elements;
      enc_bytes[r.from] += r.bytes;
    } else if (r.phase == Phase::kUpload && r.type == "ternary") {
      tern_bytes[r.from] += r.bytes;
    } else if (r.phase == Phase::kDecrypt && r.type == "aggregate") {
      dec_elems[r.to] += r.elements;
      dec_down[r.to] += r.bytes;
    } else if (r.phase == Phase::kDecrypt && r.type == "partial") {
      dec_elems[r.from] += r.elements;
      dec_up[r.from] += r.bytes;
    }
  }
  auto max_of = [](const std::map<ClientIndex, std::uint64_t>& v) {
    std::uint64_t best = 0;
    for (const auto& [_, x] : v) best = std::max(best, x);
    return best;
  };
  m.enc_ciphertexts = max_of(enc_elems);
  m.bytes_enc_upload = max_of(enc_bytes);
  m.bytes_ternary_upload = max_of(tern_bytes);
  m.dec_ciphertexts = max_of(dec_elems);
  m.bytes_dec_download = max_of(dec_down);
  m.bytes_dec_upload = max_of(dec_up);
  if (!keep_transcript_) bus_.clear_log();

  ++round_;
  history_.push_back(m);
  if (record_) trajectory_.push_back(theta_);
  return m;
}

std::vector<RoundMetrics> Simulator::run() {
  while (round_ < cfg_.rounds) run_round();
  return history_;
}

double Simulator::test_accuracy() const {
  std::size_t correct = 0;
  std::size_t total = 0;
  for (std::size_t k = 0; k < cfg_.total_clients; ++k) {
    correct += model_.correct(theta_, data_, data_.test[k]);
    total += data_.test[k].size();
  }
  return total ? static_cast<double>(correct) / static_cast<double>(total) : 0.0;
}

std::string Simulator::summary_json() const {
  nlohmann::json j;
  j["config"] = nlohmann::json::parse(config_to_json(cfg_));
  j["rounds_completed"] = round_;
  j["parameter_count"] = model_.parameter_count();
  j["tensor_count"] = model_.tensor_count();
  j["final_test_accuracy"] = history_.empty() ? 0.0 : history_.back().test_accuracy;
  if (params_) {
    j["group"] = {{"group_bits", params_->group_bits()},
                  {"key_bits", params_->key_bits()},
                  {"element_bytes", params_->element_bytes()},
                  {"encoding_base_in_subgroup", params_->encoding_base_in_subgroup()}};
  }
  nlohmann::json disq = nlohmann::json::array();
  for (const auto& t : transcripts_) {
    disq.push_back({{"round", t.round}, {"qual", t.qual}, {"disqualified", t.disqualified},
                    {"reconstructed", t.reconstructed}});
  }
  j["key_generation"] = disq;
  std::uint64_t recovery_steps = 0;
  std::size_t replaced = 0;
  for (const auto& m : history_) {
    recovery_steps += m.recovery_steps;
    replaced += m.decryptors_replaced;
  }
  j["total_recovery_steps"] = recovery_steps;
  j["total_decryptors_replaced"] = replaced;
  return j.dump(2) + "\n";
}

std::string Simulator::transcript_json() const {
  nlohmann::json j;
  j["messages"] = nlohmann::json::parse(bus_.transcript_json());
  nlohmann::json keys = nlohmann::json::array();
  for (const auto& t : transcripts_) keys.push_back(nlohmann::json::parse(t.to_json()));
  j["key_generation"] = keys;
  return j.dump(2) + "\n";
}

}  // namespace daeq
