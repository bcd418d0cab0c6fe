#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "daeq/ahe.hpp"
#include "daeq/codec.hpp"
#include "daeq/config.hpp"
#include "daeq/errors.hpp"
#include "daeq/fkg.hpp"
#include "daeq/quant.hpp"
#include "daeq/selftest.hpp"
#include "daeq/simulator.hpp"

namespace py = pybind11;
using namespace daeq;

namespace {

py::int_ to_py(const BigInt& v) {
  const std::string hex = v.get_str(16);
  return py::reinterpret_steal<py::int_>(PyLong_FromString(hex.c_str(), nullptr, 16));
}

BigInt from_py(const py::int_& v) {
  const auto text = py::reinterpret_steal<py::str>(PyNumber_ToBase(v.ptr(), 16)).cast<std::string>();
  return BigInt(text, 0);
}

Ciphertext to_ct(const std::pair<py::int_, py::int_>& c) {
  return {GroupElement(from_py(c.first)), GroupElement(from_py(c.second))};
}

std::pair<py::int_, py::int_> from_ct(const Ciphertext& c) { return {to_py(c.c1.value), to_py(c.c2.value)}; }

AdversaryPlan make_plan(const std::vector<std::pair<ClientIndex, std::string>>& entries) {
  AdversaryPlan plan;
  for (const auto& [client, behavior] : entries) plan.entries.push_back({client, parse_misbehavior(behavior), {}});
  return plan;
}

struct KeySet {
  GroupParams params;
  std::size_t threshold = 0;
  BigInt h;
  std::vector<ClientIndex> qual;
  std::vector<ClientIndex> disqualified;
  std::vector<ClientIndex> reconstructed;
  std::map<ClientIndex, BigInt> shares;
  std::string transcript;
};

KeySet keygen(const GroupParams& params, std::size_t n, std::size_t threshold, const std::string& seed,
              const std::vector<std::pair<ClientIndex, std::string>>& adversaries) {
  const Rng root = Rng::from_seed(seed);
  std::vector<FkgClient> clients;
  for (ClientIndex i = 1; i <= n; ++i) clients.emplace_back(i, root.child("client", i));
  const AdversaryPlan plan = make_plan(adversaries);
  MessageBus bus;
  const FkgTranscript tr = run_fkg(clients, threshold, params, plan, bus);
  KeySet ks{params, threshold, tr.h.value, {tr.qual.begin(), tr.qual.end()},
            {tr.disqualified.begin(), tr.disqualified.end()},
            {tr.reconstructed.begin(), tr.reconstructed.end()}, {}, tr.to_json()};
  for (ClientIndex i : tr.qual) ks.shares[i] = clients[i - 1].state().x_i.value;
  return ks;
}

py::dict metrics_dict(const RoundMetrics& m) {
  py::dict d;
  d["round"] = m.round;
  d["participants"] = m.participants;
  d["threshold"] = m.threshold;
  d["qual"] = m.qual;
  d["contributors"] = m.contributors;
  d["decryptors_replaced"] = m.decryptors_replaced;
  d["fkg_attempts"] = m.fkg_attempts;
  d["learning_rate"] = m.learning_rate;
  d["train_loss"] = m.train_loss;
  d["test_correct"] = m.test_correct;
  d["test_total"] = m.test_total;
  d["test_accuracy"] = m.test_accuracy;
  d["enc_ciphertexts"] = m.enc_ciphertexts;
  d["dec_ciphertexts"] = m.dec_ciphertexts;
  d["bytes_enc_upload"] = m.bytes_enc_upload;
  d["bytes_ternary_upload"] = m.bytes_ternary_upload;
  d["bytes_dec_download"] = m.bytes_dec_download;
  d["bytes_dec_upload"] = m.bytes_dec_upload;
  d["bytes_total"] = m.bytes_total;
  d["recovery_steps"] = m.recovery_steps;
  return d;
}

}  // namespace

PYBIND11_MODULE(_daeq, m) {
  m.doc() = "Threshold-encrypted federated averaging with ternary gradients";
  m.attr("__version__") = "0.1.0";

  py::register_exception<Error>(m, "DaeqError");

  py::class_<GroupParams>(m, "GroupParams")
      .def_property_readonly("p", [](const GroupParams& g) { return to_py(g.p); })
      .def_property_readonly("q", [](const GroupParams& g) { return to_py(g.q); })
      .def_property_readonly("g", [](const GroupParams& g) { return to_py(g.g); })
      .def_property_readonly("y", [](const GroupParams& g) { return to_py(g.y); })
      .def_property_readonly("g0", [](const GroupParams& g) { return to_py(g.g0); })
      .def_property_readonly("group_bits", &GroupParams::group_bits)
      .def_property_readonly("key_bits", &GroupParams::key_bits)
      .def_property_readonly("element_bytes", &GroupParams::element_bytes)
      .def("validate", [](const GroupParams& g) { validate_params(g); })
      .def("serialize", &serialize_params);

  m.def("toy_params", &toy_params, "Tiny group for exhaustive checks (p=23, q=11).");
  m.def("generate_params", &generate_params, py::arg("key_bits"), py::arg("group_bits"), py::arg("seed") = "daeq-fl");
  m.def("parse_params", [](const std::string& text) { return parse_params(text); });

  py::class_<KeySet>(m, "KeySet")
      .def_readonly("params", &KeySet::params)
      .def_readonly("threshold", &KeySet::threshold)
      .def_property_readonly("h", [](const KeySet& k) { return to_py(k.h); })
      .def_readonly("qual", &KeySet::qual)
      .def_readonly("disqualified", &KeySet::disqualified)
      .def_readonly("reconstructed", &KeySet::reconstructed)
      .def_property_readonly("shares",
                             [](const KeySet& k) {
                               py::dict d;
                               for (const auto& [i, x] : k.shares) d[py::int_(i)] = to_py(x);
                               return d;
                             })
      .def_readonly("transcript", &KeySet::transcript);

  m.def("keygen", &keygen, py::arg("params"), py::arg("n"), py::arg("threshold"), py::arg("seed") = "daeq",
        py::arg("adversaries") = std::vector<std::pair<ClientIndex, std::string>>{},
        "Distributed key generation among clients 1..n; adversaries are (client, behavior) pairs.");

  m.def("lagrange_coefficient",
        [](const GroupParams& p, ClientIndex i, const std::vector<ClientIndex>& subset) {
          return to_py(lagrange_coefficient(i, subset, p).value);
        });

  m.def(
      "encrypt",
      [](const GroupParams& p, const py::int_& message, const py::int_& h, const std::string& seed) {
        Rng rng = Rng::from_seed(seed);
        return from_ct(encrypt(from_py(message), GroupElement(from_py(h)), p, rng));
      },
      py::arg("params"), py::arg("message"), py::arg("public_key"), py::arg("seed"));

  m.def("aggregate", [](const GroupParams& p, const std::vector<std::pair<py::int_, py::int_>>& cts) {
    std::vector<Ciphertext> v;
    for (const auto& c : cts) v.push_back(to_ct(c));
    return from_ct(aggregate(v, p));
  });

  m.def(
      "partial_decrypt",
      [](const KeySet& keys, const std::pair<py::int_, py::int_>& ct, ClientIndex client,
         const std::vector<ClientIndex>& subset) {
        const auto it = keys.shares.find(client);
        if (it == keys.shares.end()) throw NotFound("client has no key share");
        const Scalar lambda = lagrange_coefficient(client, subset, keys.params);
        return to_py(partial_decrypt(to_ct(ct), client, Scalar(it->second), lambda, keys.threshold, keys.params).pd.value);
      },
      py::arg("keys"), py::arg("ciphertext"), py::arg("client"), py::arg("subset"));

  m.def(
      "decrypt_aggregate",
      [](const GroupParams& p, const std::pair<py::int_, py::int_>& ct, const std::map<ClientIndex, py::int_>& partials,
         std::size_t threshold, const std::string& mode, std::uint64_t max_steps) {
        std::vector<PartialDecryption> pds;
        for (const auto& [i, v] : partials) pds.push_back({i, GroupElement(from_py(v))});
        return decrypt_aggregate(to_ct(ct), pds, threshold, parse_recovery_mode(mode), max_steps, p);
      },
      py::arg("params"), py::arg("ciphertext"), py::arg("partials"), py::arg("threshold"), py::arg("mode") = "auto",
      py::arg("max_steps") = 1ull << 26, "Returns T times the plaintext sum.");

  m.def("encode", [](const GroupParams& p, double x, int b) {
    return to_py(encode(x, EncodingConfig::make(b, p.q)).value);
  });
  m.def("decode", [](const GroupParams& p, const py::int_& v, int b) {
    return decode_integer(from_py(v), EncodingConfig::make(b, p.q));
  });

  m.def(
      "ternarize",
      [](const std::vector<double>& values, const std::string& seed) {
        Rng rng = Rng::from_seed(seed);
        const TernaryGradient t = ternarize(GradientTensor{{values.size()}, values}, rng);
        return std::make_pair(t.s, std::vector<int>(t.dirs.begin(), t.dirs.end()));
      },
      py::arg("values"), py::arg("seed"));

  m.def(
      "run_experiment",
      [](const std::string& config_json, const std::vector<std::string>& overrides) {
        std::string text = config_json.empty() ? config_to_json(ExperimentConfig{}) : config_json;
        for (const auto& o : overrides) text = apply_override(text, o);
        const ExperimentConfig cfg = config_from_json(text);
        std::vector<RoundMetrics> rows;
        std::string summary;
        {
          py::gil_scoped_release release;
          Simulator sim(cfg);
          rows = sim.run();
          summary = sim.summary_json();
        }
        py::list out;
        for (const auto& r : rows) out.append(metrics_dict(r));
        return py::make_tuple(out, summary, metrics_csv(rows));
      },
      py::arg("config_json") = "", py::arg("overrides") = std::vector<std::string>{},
      "Runs a full experiment; returns (per-round metrics, summary JSON, metrics.csv text).");

  m.def(
      "selftest",
      [](bool mutate) {
        std::vector<std::tuple<std::string, bool, std::string>> out;
        for (const auto& r : run_selftest(mutate)) out.emplace_back(r.name, r.passed, r.detail);
        return out;
      },
      py::arg("mutate") = false);
}
