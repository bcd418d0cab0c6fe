#include "daeq/sharing.hpp"

#include <algorithm>
#include <set>

#include "daeq/errors.hpp"

namespace daeq {
namespace {

// prod_k base_k^{x^k mod q} mod p
GroupElement commitment_product(std::span<const GroupElement> bases, ClientIndex x, const GroupParams& params) {
  GroupElement acc(1);
  Scalar power(1ul);
  const Scalar xs = make_scalar(params, BigInt(x));
  for (const auto& base : bases) {
    acc = mul_mod(params, acc, pow_mod(params, base, power));
    power = mul(params, power, xs);
  }
  return acc;
}

void write_elements(ByteWriter& w, std::span<const GroupElement> elems) {
  w.u32(static_cast<std::uint32_t>(elems.size()));
  for (const auto& e : elems) w.bigint(e.value);
}

std::vector<GroupElement> read_elements(ByteReader& r) {
  std::vector<GroupElement> out(r.u32());
  for (auto& e : out) e.value = r.bigint();
  if (!r.done()) throw ParseError("trailing bytes after commitment");
  return out;
}

}  // namespace

SecretPolynomialPair sample_polynomial_pair(std::size_t threshold, const GroupParams& params, Rng& rng) {
  if (threshold < 1) throw Error("threshold must be at least 1");
  SecretPolynomialPair poly;
  poly.f.reserve(threshold);
  poly.f_prime.reserve(threshold);
  for (std::size_t k = 0; k < threshold; ++k) {
    poly.f.push_back(random_scalar(params, rng));
    poly.f_prime.push_back(random_scalar(params, rng));
  }
  return poly;
}

Scalar evaluate_polynomial(std::span<const Scalar> coeffs, const BigInt& x, const GroupParams& params) {
  BigInt acc = 0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
    acc = (acc * x + it->value) % params.q;
  }
  return make_scalar(params, acc);
}

ShareBundle evaluate(const SecretPolynomialPair& poly, ClientIndex dealer, ClientIndex recipient,
                     const GroupParams& params) {
  if (recipient < 1) throw Error("share evaluation point must be >= 1");
  const BigInt x(recipient);
  return ShareBundle{dealer, recipient, evaluate_polynomial(poly.f, x, params),
                     evaluate_polynomial(poly.f_prime, x, params)};
}

PedersenCommitment pedersen_commit(const SecretPolynomialPair& poly, const GroupParams& params) {
  PedersenCommitment out;
  out.c.reserve(poly.threshold());
  for (std::size_t k = 0; k < poly.threshold(); ++k) {
    out.c.push_back(mul_mod(params, pow_mod(params, params.generator(), poly.f[k]),
                            pow_mod(params, params.pedersen_base(), poly.f_prime[k])));
  }
  return out;
}

FeldmanCommitment feldman_commit(const SecretPolynomialPair& poly, const GroupParams& params) {
  FeldmanCommitment out;
  out.a.reserve(poly.threshold());
  for (const auto& coeff : poly.f) out.a.push_back(pow_mod(params, params.generator(), coeff));
  return out;
}

bool pedersen_verify(const ShareBundle& share, const PedersenCommitment& commit, const GroupParams& params) {
  if (commit.c.empty() || share.recipient < 1) return false;
  const GroupElement lhs = mul_mod(params, pow_mod(params, params.generator(), share.s),
                                   pow_mod(params, params.pedersen_base(), share.s_prime));
  return lhs == commitment_product(commit.c, share.recipient, params);
}

bool feldman_verify(const ShareBundle& share, const FeldmanCommitment& commit, const GroupParams& params) {
  if (commit.a.empty() || share.recipient < 1) return false;
  return pow_mod(params, params.generator(), share.s) == commitment_product(commit.a, share.recipient, params);
}

Scalar lagrange_coefficient(ClientIndex i, std::span<const ClientIndex> subset, const GroupParams& params) {
  if (std::find(subset.begin(), subset.end(), i) == subset.end()) {
    throw Error("lagrange_coefficient: index not in subset");
  }
  BigInt num = 1, den = 1;
  for (ClientIndex j : subset) {
    if (j == 0) throw Error("lagrange_coefficient: indices must be >= 1");
    if (j == i) continue;
    num = (num * j) % params.q;
    den = (den * (BigInt(j) - BigInt(i))) % params.q;
  }
  if (den < 0) den += params.q;
  return make_scalar(params, num * inverse_mod_prime(den, params.q));
}

Scalar reconstruct_at_zero(std::span<const std::pair<ClientIndex, Scalar>> points, const GroupParams& params) {
  if (points.empty()) throw Error("reconstruct_at_zero: no points");
  std::vector<ClientIndex> indices;
  std::set<ClientIndex> seen;
  for (const auto& [idx, _] : points) {
    if (!seen.insert(idx).second) throw DuplicateIndex("duplicate interpolation index " + std::to_string(idx));
    indices.push_back(idx);
  }
  Scalar acc(0ul);
  for (const auto& [idx, value] : points) {
    acc = add(params, acc, mul(params, lagrange_coefficient(idx, indices, params), value));
  }
  return acc;
}

Bytes serialize(const ShareBundle& share) {
  ByteWriter w;
  w.u32(share.dealer);
  w.u32(share.recipient);
  w.bigint(share.s.value);
  w.bigint(share.s_prime.value);
  return std::move(w).take();
}

ShareBundle parse_share(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  ShareBundle share;
  share.dealer = r.u32();
  share.recipient = r.u32();
  share.s.value = r.bigint();
  share.s_prime.value = r.bigint();
  if (!r.done()) throw ParseError("trailing bytes after share");
  return share;
}

Bytes serialize(const PedersenCommitment& commit) {
  ByteWriter w;
  write_elements(w, commit.c);
  return std::move(w).take();
}

PedersenCommitment parse_pedersen(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  return PedersenCommitment{read_elements(r)};
}

Bytes serialize(const FeldmanCommitment& commit) {
  ByteWriter w;
  write_elements(w, commit.a);
  return std::move(w).take();
}

FeldmanCommitment parse_feldman(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  return FeldmanCommitment{read_elements(r)};
}

}  // namespace daeq
