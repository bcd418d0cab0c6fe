#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "daeq/group.hpp"
#include "daeq/sharing.hpp"

namespace daeq {

/// Exponential ElGamal ciphertext (g^r, g0^m h^r). Component-wise products
/// add the plaintexts.
struct Ciphertext {
  GroupElement c1;
  GroupElement c2;

  friend bool operator==(const Ciphertext&, const Ciphertext&) = default;
};

struct PartialDecryption {
  ClientIndex client = 0;
  GroupElement pd;
};

enum class RecoveryMode { kLog, kBruteForce, kAuto, kBabyGiant };

std::string_view recovery_mode_name(RecoveryMode mode);
RecoveryMode parse_recovery_mode(std::string_view name);

Ciphertext encrypt(const BigInt& m, const GroupElement& public_key, const GroupParams& params, Rng& rng);
/// Same as encrypt with a caller-chosen ephemeral exponent r.
Ciphertext encrypt_with(const BigInt& m, const GroupElement& public_key, const Scalar& r,
                        const GroupParams& params);

Ciphertext aggregate(std::span<const Ciphertext> cts, const GroupParams& params);

/// pd = c2 / c1^{lambda_i * x_i * T mod q}.
PartialDecryption partial_decrypt(const Ciphertext& ct, ClientIndex client, const Scalar& x_i,
                                  const Scalar& lambda_i, std::size_t threshold, const GroupParams& params);

/// Product of exactly T partials from distinct clients; equals g0^{T m}.
GroupElement combine(std::span<const PartialDecryption> partials, std::size_t threshold, const GroupParams& params);

/// Linear search j = 0..max_m with one multiplication per step. When `steps`
/// is given it receives the number of candidates tried (m + 1 on success).
std::uint64_t recover_bruteforce(const GroupElement& target, std::uint64_t max_m, const GroupParams& params,
                                 std::uint64_t* steps = nullptr);

/// Reads m off the single set bit of target = 2^m (no modular wrap).
/// Throws NotPowerOfBase otherwise.
std::uint64_t recover_log(const GroupElement& target, const GroupParams& params);

/// Baby-step giant-step over [0, max_m]. Extension, not used by default.
std::uint64_t recover_bsgs(const GroupElement& target, std::uint64_t max_m, const GroupParams& params);

/// Dispatches on `mode`; kAuto tries log first and falls back to brute force.
std::uint64_t recover(const GroupElement& target, RecoveryMode mode, std::uint64_t max_m, const GroupParams& params,
                      std::uint64_t* steps = nullptr);

/// Combines the partials and recovers T*m. Division by T happens after decoding.
std::uint64_t decrypt_aggregate(const Ciphertext& ct, std::span<const PartialDecryption> partials,
                                std::size_t threshold, RecoveryMode mode, std::uint64_t max_m,
                                const GroupParams& params, std::uint64_t* steps = nullptr);

/// Two fixed-width big-endian components of params.element_bytes() each.
Bytes serialize(const Ciphertext& ct, const GroupParams& params);
Ciphertext parse_ciphertext(std::span<const std::uint8_t> bytes, const GroupParams& params);

}  // namespace daeq
