#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "daeq/group.hpp"

namespace daeq {

/// 1-based client index; doubles as the share evaluation point.
using ClientIndex = std::uint32_t;

/// Dealer polynomials f and f' of degree T-1 over Z_q. f(0) is the dealer's
/// contributed secret z_i.
struct SecretPolynomialPair {
  std::vector<Scalar> f;
  std::vector<Scalar> f_prime;

  std::size_t threshold() const { return f.size(); }
  const Scalar& secret() const { return f.front(); }
};

struct ShareBundle {
  ClientIndex dealer = 0;
  ClientIndex recipient = 0;
  Scalar s;
  Scalar s_prime;

  friend bool operator==(const ShareBundle&, const ShareBundle&) = default;
};

/// C_k = g^{a_k} y^{b_k}.
struct PedersenCommitment {
  std::vector<GroupElement> c;
  friend bool operator==(const PedersenCommitment&, const PedersenCommitment&) = default;
};

/// A_k = g^{a_k}; A_0 is the dealer's public key share.
struct FeldmanCommitment {
  std::vector<GroupElement> a;
  friend bool operator==(const FeldmanCommitment&, const FeldmanCommitment&) = default;
};

SecretPolynomialPair sample_polynomial_pair(std::size_t threshold, const GroupParams& params, Rng& rng);

/// Horner evaluation of a coefficient list at x, mod q.
Scalar evaluate_polynomial(std::span<const Scalar> coeffs, const BigInt& x, const GroupParams& params);

/// Shares f(j), f'(j) for recipient j >= 1.
ShareBundle evaluate(const SecretPolynomialPair& poly, ClientIndex dealer, ClientIndex recipient,
                     const GroupParams& params);

PedersenCommitment pedersen_commit(const SecretPolynomialPair& poly, const GroupParams& params);
FeldmanCommitment feldman_commit(const SecretPolynomialPair& poly, const GroupParams& params);

/// g^s y^s' == prod_k C_k^{j^k}, exponents j^k reduced mod q.
bool pedersen_verify(const ShareBundle& share, const PedersenCommitment& commit, const GroupParams& params);
/// g^s == prod_k A_k^{j^k}.
bool feldman_verify(const ShareBundle& share, const FeldmanCommitment& commit, const GroupParams& params);

/// Lagrange basis coefficient for `i` over `subset`, evaluated at zero:
/// prod_{j != i} j / (j - i) mod q.
Scalar lagrange_coefficient(ClientIndex i, std::span<const ClientIndex> subset, const GroupParams& params);

/// f(0) from (index, f(index)) points. Duplicate indices throw DuplicateIndex.
Scalar reconstruct_at_zero(std::span<const std::pair<ClientIndex, Scalar>> points, const GroupParams& params);

// Wire formats: u32 count followed by length-prefixed big integers.
Bytes serialize(const ShareBundle& share);
ShareBundle parse_share(std::span<const std::uint8_t> bytes);
Bytes serialize(const PedersenCommitment& commit);
PedersenCommitment parse_pedersen(std::span<const std::uint8_t> bytes);
Bytes serialize(const FeldmanCommitment& commit);
FeldmanCommitment parse_feldman(std::span<const std::uint8_t> bytes);

}  // namespace daeq
