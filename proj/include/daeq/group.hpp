#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

#include "daeq/bytes.hpp"
#include "daeq/rng.hpp"

namespace daeq {

/// Exponent or share value, always reduced into [0, q).
struct Scalar {
  BigInt value;

  Scalar() = default;
  explicit Scalar(BigInt v) : value(std::move(v)) {}
  explicit Scalar(unsigned long v) : value(v) {}

  friend bool operator==(const Scalar& a, const Scalar& b) { return a.value == b.value; }
};

/// Element of Z_p^*. Key-side values (g^r, h, commitments) lie in the order-q
/// subgroup; values built on the encoding base g0 may not, see
/// GroupParams::encoding_base_in_subgroup.
struct GroupElement {
  BigInt value{1};

  GroupElement() = default;
  explicit GroupElement(BigInt v) : value(std::move(v)) {}

  friend bool operator==(const GroupElement& a, const GroupElement& b) { return a.value == b.value; }
};

/// Public group description: p = r*q + 1, generators g and y of the order-q
/// subgroup with unknown relative discrete log, and the message base g0 = 2.
struct GroupParams {
  BigInt p;
  BigInt q;
  BigInt g;
  BigInt y;
  BigInt g0{2};

  /// Bytes of one fixed-width serialized element: ceil(bits(p) / 8).
  std::size_t element_bytes() const { return byte_length(p); }
  std::size_t group_bits() const { return bit_length(p); }
  std::size_t key_bits() const { return bit_length(q); }
  bool encoding_base_in_subgroup() const;

  GroupElement generator() const { return GroupElement(g); }
  GroupElement pedersen_base() const { return GroupElement(y); }
  GroupElement encoding_base() const { return GroupElement(g0); }

  friend bool operator==(const GroupParams&, const GroupParams&) = default;
};

inline constexpr int kMillerRabinRounds = 64;

bool is_probable_prime(const BigInt& n);

/// Deterministic Schnorr-group search. q is drawn first from a SHA-256 stream
/// over `seed`, then p = r*q + 1 is searched over even cofactors r. g and y are
/// h^((p-1)/q) for successive hash-derived h, so nobody knows log_g(y).
GroupParams generate_params(int key_bits, int group_bits, std::string_view seed);

/// p = 23, q = 11, g = 2, y derived from the hash stream. Small enough for
/// exhaustive tests; 2 has order q here.
GroupParams toy_params();

/// Throws ParamGenerationError describing the first violated invariant.
void validate_params(const GroupParams& params);

/// One field per line in the order p, q, g, y, g0, written as 0x-hex.
std::string serialize_params(const GroupParams& params);
/// Accepts hex (0x...) or decimal lines; blank lines and '#' comments are ignored.
GroupParams parse_params(std::string_view text);

GroupElement pow_mod(const GroupParams& params, const GroupElement& base, const Scalar& exp);
/// Exponent taken as a plain nonnegative integer, not reduced mod q.
GroupElement pow_mod_raw(const GroupParams& params, const GroupElement& base, const BigInt& exp);
GroupElement mul_mod(const GroupParams& params, const GroupElement& a, const GroupElement& b);
GroupElement inverse_mod(const GroupParams& params, const GroupElement& a);
bool in_subgroup(const GroupParams& params, const GroupElement& a);

Scalar make_scalar(const GroupParams& params, const BigInt& v);
Scalar add(const GroupParams& params, const Scalar& a, const Scalar& b);
Scalar sub(const GroupParams& params, const Scalar& a, const Scalar& b);
Scalar mul(const GroupParams& params, const Scalar& a, const Scalar& b);
/// Modular inverse via extended Euclid; throws for zero.
BigInt inverse_mod_prime(const BigInt& a, const BigInt& modulus);

/// Uniform over [0, q-1].
Scalar random_scalar(const GroupParams& params, Rng& rng);
/// Uniform over [1, q-1].
Scalar random_nonzero_scalar(const GroupParams& params, Rng& rng);

std::ostream& operator<<(std::ostream& os, const Scalar& s);
std::ostream& operator<<(std::ostream& os, const GroupElement& e);

}  // namespace daeq
