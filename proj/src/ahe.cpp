#include "daeq/ahe.hpp"

#include <cmath>
#include <set>
#include <string>
#include <unordered_map>

#include "daeq/errors.hpp"

namespace daeq {

std::string_view recovery_mode_name(RecoveryMode mode) {
  switch (mode) {
    case RecoveryMode::kLog: return "log";
    case RecoveryMode::kBruteForce: return "bruteforce";
    case RecoveryMode::kAuto: return "auto";
    case RecoveryMode::kBabyGiant: return "bsgs";
  }
  return "unknown";
}

RecoveryMode parse_recovery_mode(std::string_view name) {
  for (auto m : {RecoveryMode::kLog, RecoveryMode::kBruteForce, RecoveryMode::kAuto, RecoveryMode::kBabyGiant}) {
    if (recovery_mode_name(m) == name) return m;
  }
  throw ConfigError("unknown recovery mode '" + std::string(name) + "'");
}

Ciphertext encrypt(const BigInt& m, const GroupElement& public_key, const GroupParams& params, Rng& rng) {
  return encrypt_with(m, public_key, random_nonzero_scalar(params, rng), params);
}

Ciphertext encrypt_with(const BigInt& m, const GroupElement& public_key, const Scalar& r,
                        const GroupParams& params) {
  if (sgn(m) < 0 || m >= params.q) throw MessageOutOfRange("message must lie in [0, q)");
  Ciphertext ct;
  ct.c1 = pow_mod(params, params.generator(), r);
  ct.c2 = mul_mod(params, pow_mod_raw(params, params.encoding_base(), m), pow_mod(params, public_key, r));
  return ct;
}

Ciphertext aggregate(std::span<const Ciphertext> cts, const GroupParams& params) {
  if (cts.empty()) throw Error("aggregate: no ciphertexts");
  Ciphertext acc = cts.front();
  for (const auto& ct : cts.subspan(1)) {
    acc.c1 = mul_mod(params, acc.c1, ct.c1);
    acc.c2 = mul_mod(params, acc.c2, ct.c2);
  }
  return acc;
}

PartialDecryption partial_decrypt(const Ciphertext& ct, ClientIndex client, const Scalar& x_i,
                                  const Scalar& lambda_i, std::size_t threshold, const GroupParams& params) {
  const Scalar e = mul(params, mul(params, lambda_i, x_i), make_scalar(params, BigInt(threshold)));
  const GroupElement mask = pow_mod(params, ct.c1, e);
  return PartialDecryption{client, mul_mod(params, ct.c2, inverse_mod(params, mask))};
}

GroupElement combine(std::span<const PartialDecryption> partials, std::size_t threshold, const GroupParams& params) {
  if (partials.size() != threshold) {
    throw WrongCount("expected " + std::to_string(threshold) + " partial decryptions, got " +
                     std::to_string(partials.size()));
  }
  std::set<ClientIndex> seen;
  GroupElement acc(1);
  for (const auto& pd : partials) {
    if (!seen.insert(pd.client).second) {
      throw DuplicateIndex("duplicate partial decryption from client " + std::to_string(pd.client));
    }
    acc = mul_mod(params, acc, pd.pd);
  }
  return acc;
}

std::uint64_t recover_bruteforce(const GroupElement& target, std::uint64_t max_m, const GroupParams& params,
                                 std::uint64_t* steps) {
  GroupElement acc(1);
  const GroupElement base = params.encoding_base();
  for (std::uint64_t j = 0;; ++j) {
    if (acc == target) {
      if (steps) *steps = j + 1;
      return j;
    }
    if (j == max_m) break;
    acc = mul_mod(params, acc, base);
  }
  if (steps) *steps = max_m + 1;
  throw NotFound("no exponent in [0, " + std::to_string(max_m) + "] matches");
}

std::uint64_t recover_log(const GroupElement& target, const GroupParams& params) {
  if (params.g0 != 2) throw NotPowerOfBase("log recovery requires g0 = 2");
  const BigInt& v = target.value;
  if (v <= 0 || v >= params.p || mpz_popcount(v.get_mpz_t()) != 1) {
    throw NotPowerOfBase("target is not an exact power of two below p");
  }
  return mpz_scan1(v.get_mpz_t(), 0);
}

std::uint64_t recover_bsgs(const GroupElement& target, std::uint64_t max_m, const GroupParams& params) {
  const auto m = static_cast<std::uint64_t>(std::ceil(std::sqrt(static_cast<double>(max_m) + 1.0)));
  std::unordered_map<std::string, std::uint64_t> baby;
  GroupElement acc(1);
  for (std::uint64_t j = 0; j < m; ++j) {
    baby.emplace(acc.value.get_str(16), j);
    acc = mul_mod(params, acc, params.encoding_base());
  }
  // acc == g0^m; giant step multiplies by g0^-m.
  const GroupElement giant = inverse_mod(params, acc);
  GroupElement gamma = target;
  for (std::uint64_t i = 0; i <= m; ++i) {
    auto it = baby.find(gamma.value.get_str(16));
    if (it != baby.end()) {
      const std::uint64_t found = i * m + it->second;
      if (found <= max_m) return found;
    }
    gamma = mul_mod(params, gamma, giant);
  }
  throw NotFound("no exponent in [0, " + std::to_string(max_m) + "] matches");
}

std::uint64_t recover(const GroupElement& target, RecoveryMode mode, std::uint64_t max_m, const GroupParams& params,
                      std::uint64_t* steps) {
  switch (mode) {
    case RecoveryMode::kLog:
      if (steps) *steps = 0;
      return recover_log(target, params);
    case RecoveryMode::kBruteForce:
      return recover_bruteforce(target, max_m, params, steps);
    case RecoveryMode::kAuto:
      try {
        if (steps) *steps = 0;
        return recover_log(target, params);
      } catch (const NotPowerOfBase&) {
        return recover_bruteforce(target, max_m, params, steps);
      }
    case RecoveryMode::kBabyGiant:
      if (steps) *steps = 0;
      return recover_bsgs(target, max_m, params);
  }
  throw Error("unknown recovery mode");
}

std::uint64_t decrypt_aggregate([[maybe_unused]] const Ciphertext& ct, std::span<const PartialDecryption> partials,
                                std::size_t threshold, RecoveryMode mode, std::uint64_t max_m,
                                const GroupParams& params, std::uint64_t* steps) {
  return recover(combine(partials, threshold, params), mode, max_m, params, steps);
}

Bytes serialize(const Ciphertext& ct, const GroupParams& params) {
  ByteWriter w;
  w.fixed(ct.c1.value, params.element_bytes());
  w.fixed(ct.c2.value, params.element_bytes());
  return std::move(w).take();
}

Ciphertext parse_ciphertext(std::span<const std::uint8_t> bytes, const GroupParams& params) {
  if (bytes.size() != 2 * params.element_bytes()) throw ParseError("ciphertext has wrong length");
  ByteReader r(bytes);
  Ciphertext ct;
  ct.c1.value = r.fixed(params.element_bytes());
  ct.c2.value = r.fixed(params.element_bytes());
  return ct;
}

}  // namespace daeq
