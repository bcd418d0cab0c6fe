#include "daeq/group.hpp"

#include <ostream>
#include <sstream>
#include <vector>

#include "daeq/errors.hpp"

namespace daeq {
namespace {

// Hash-expanded integer of exactly `bits` random bits from (seed, label, counter).
BigInt expand(std::string_view seed, std::string_view label, std::uint64_t counter, std::size_t bits) {
  const std::size_t nbytes = (bits + 7) / 8;
  Bytes stream;
  stream.reserve(nbytes + 32);
  for (std::uint32_t block = 0; stream.size() < nbytes; ++block) {
    ByteWriter w;
    w.raw(Bytes{'d', 'a', 'e', 'q', '-', 'g', 'r', 'p'});
    w.u32(static_cast<std::uint32_t>(seed.size()));
    w.raw(std::span(reinterpret_cast<const std::uint8_t*>(seed.data()), seed.size()));
    w.u32(static_cast<std::uint32_t>(label.size()));
    w.raw(std::span(reinterpret_cast<const std::uint8_t*>(label.data()), label.size()));
    w.u64(counter);
    w.u32(block);
    Digest d = sha256(w.bytes());
    stream.insert(stream.end(), d.begin(), d.end());
  }
  stream.resize(nbytes);
  const unsigned excess = static_cast<unsigned>(nbytes * 8 - bits);
  if (!stream.empty()) stream[0] &= static_cast<std::uint8_t>(0xFF >> excess);
  return from_bytes(stream);
}

// Hash-derived element of the order-q subgroup other than 1 and the values in `avoid`.
BigInt derive_subgroup_element(const BigInt& p, const BigInt& q, std::string_view seed,
                               std::string_view label, const std::vector<BigInt>& avoid) {
  const BigInt cofactor = (p - 1) / q;
  const std::size_t bits = bit_length(p) + 64;
  for (std::uint64_t k = 0; k < 10000; ++k) {
    BigInt h = 2 + expand(seed, label, k, bits) % (p - 3);
    BigInt e;
    mpz_powm(e.get_mpz_t(), h.get_mpz_t(), cofactor.get_mpz_t(), p.get_mpz_t());
    if (e == 1) continue;
    bool clash = false;
    for (const auto& a : avoid) clash = clash || (a == e);
    if (!clash) return e;
  }
  throw ParamGenerationError("could not derive a subgroup element for '" + std::string(label) + "'");
}

BigInt powm(const BigInt& base, const BigInt& exp, const BigInt& mod) {
  BigInt out;
  mpz_powm(out.get_mpz_t(), base.get_mpz_t(), exp.get_mpz_t(), mod.get_mpz_t());
  return out;
}

}  // namespace

bool is_probable_prime(const BigInt& n) {
  return mpz_probab_prime_p(n.get_mpz_t(), kMillerRabinRounds) != 0;
}

bool GroupParams::encoding_base_in_subgroup() const {
  return g0 > 1 && g0 < p && powm(g0, q, p) == 1;
}

GroupParams generate_params(int key_bits, int group_bits, std::string_view seed) {
  if (key_bits < 8) throw ParamGenerationError("key_bits must be at least 8");
  if (group_bits <= key_bits) throw ParamGenerationError("group_bits must exceed key_bits");
  if (seed.empty()) throw ParamGenerationError("seed must be nonempty");

  const auto kb = static_cast<std::size_t>(key_bits);
  const auto gb = static_cast<std::size_t>(group_bits);
  const BigInt p_min = BigInt(1) << (gb - 1);
  const BigInt p_max = (BigInt(1) << gb) - 1;
  const std::uint64_t q_attempts = 100 * kb;
  const std::uint64_t p_attempts = 40 * gb + 64;
  constexpr int kMaxQ = 8;

  std::uint64_t q_counter = 0;
  for (int round = 0; round < kMaxQ; ++round) {
    BigInt q;
    bool found_q = false;
    for (std::uint64_t i = 0; i < q_attempts; ++i, ++q_counter) {
      q = expand(seed, "q", q_counter, kb);
      mpz_setbit(q.get_mpz_t(), kb - 1);
      mpz_setbit(q.get_mpz_t(), 0);
      if (is_probable_prime(q)) {
        found_q = true;
        ++q_counter;
        break;
      }
    }
    if (!found_q) break;

    // Even cofactors r with p = r*q + 1 of exactly group_bits bits.
    const BigInt r_lo = (p_min - 1 + q - 1) / q;
    const BigInt r_hi = (p_max - 1) / q;
    if (r_hi < r_lo || r_hi < 2) {
      throw ParamGenerationError("no cofactor fits the requested bit sizes");
    }
    const BigInt span = r_hi - r_lo + 1;
    const std::string p_label = "p/" + q.get_str(16);
    for (std::uint64_t i = 0; i < p_attempts; ++i) {
      BigInt r = r_lo + expand(seed, p_label, i, bit_length(span) + 64) % span;
      if (mpz_odd_p(r.get_mpz_t())) r += 1;
      if (r > r_hi) continue;
      BigInt p = r * q + 1;
      if (!is_probable_prime(p)) continue;

      GroupParams params;
      params.p = p;
      params.q = q;
      params.g = derive_subgroup_element(p, q, seed, "g", {});
      params.y = derive_subgroup_element(p, q, seed, "y", {params.g});
      params.g0 = 2;
      validate_params(params);
      return params;
    }
  }
  throw ParamGenerationError("no (p, q) pair found for key_bits=" + std::to_string(key_bits) +
                             " group_bits=" + std::to_string(group_bits));
}

GroupParams toy_params() {
  GroupParams params;
  params.p = 23;
  params.q = 11;
  params.g = 2;
  params.y = derive_subgroup_element(params.p, params.q, "toy", "y", {params.g});
  params.g0 = 2;
  return params;
}

void validate_params(const GroupParams& params) {
  const auto& [p, q, g, y, g0] = params;
  auto fail = [](const std::string& what) { throw ParamGenerationError("invalid params: " + what); };
  if (p < 5 || !is_probable_prime(p)) fail("p is not prime");
  if (q < 2 || !is_probable_prime(q)) fail("q is not prime");
  if ((p - 1) % q != 0) fail("q does not divide p-1");
  for (const auto* v : {&g, &y}) {
    if (*v < 2 || *v > p - 1) fail("generator out of range");
    if (powm(*v, q, p) != 1) fail("generator not in the order-q subgroup");
  }
  if (g == y) fail("g equals y");
  if (g0 != 2) fail("g0 must be 2");
}

std::string serialize_params(const GroupParams& params) {
  std::ostringstream os;
  for (const auto* v : {&params.p, &params.q, &params.g, &params.y, &params.g0}) {
    os << to_hex(*v) << '\n';
  }
  return os.str();
}

GroupParams parse_params(std::string_view text) {
  std::vector<BigInt> fields;
  std::istringstream is{std::string(text)};
  std::string line;
  while (std::getline(is, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    fields.push_back(parse_bigint(line));
  }
  if (fields.size() != 5) {
    throw ParseError("params need exactly 5 fields (p, q, g, y, g0), got " + std::to_string(fields.size()));
  }
  GroupParams params{fields[0], fields[1], fields[2], fields[3], fields[4]};
  validate_params(params);
  return params;
}

GroupElement pow_mod(const GroupParams& params, const GroupElement& base, const Scalar& exp) {
  return GroupElement(powm(base.value, exp.value, params.p));
}

GroupElement pow_mod_raw(const GroupParams& params, const GroupElement& base, const BigInt& exp) {
  if (sgn(exp) < 0) throw Error("pow_mod_raw: negative exponent");
  return GroupElement(powm(base.value, exp, params.p));
}

GroupElement mul_mod(const GroupParams& params, const GroupElement& a, const GroupElement& b) {
  BigInt out = a.value * b.value;
  mpz_mod(out.get_mpz_t(), out.get_mpz_t(), params.p.get_mpz_t());
  return GroupElement(std::move(out));
}

GroupElement inverse_mod(const GroupParams& params, const GroupElement& a) {
  return GroupElement(inverse_mod_prime(a.value, params.p));
}

bool in_subgroup(const GroupParams& params, const GroupElement& a) {
  return a.value > 0 && a.value < params.p && powm(a.value, params.q, params.p) == 1;
}

Scalar make_scalar(const GroupParams& params, const BigInt& v) {
  BigInt out;
  mpz_mod(out.get_mpz_t(), v.get_mpz_t(), params.q.get_mpz_t());
  return Scalar(std::move(out));
}

Scalar add(const GroupParams& params, const Scalar& a, const Scalar& b) {
  return make_scalar(params, a.value + b.value);
}

Scalar sub(const GroupParams& params, const Scalar& a, const Scalar& b) {
  return make_scalar(params, a.value - b.value);
}

Scalar mul(const GroupParams& params, const Scalar& a, const Scalar& b) {
  return make_scalar(params, a.value * b.value);
}

BigInt inverse_mod_prime(const BigInt& a, const BigInt& modulus) {
  // Extended Euclid on (a mod m, m).
  BigInt r0 = modulus, r1 = a % modulus;
  if (r1 < 0) r1 += modulus;
  if (r1 == 0) throw Error("inverse of zero");
  BigInt t0 = 0, t1 = 1;
  while (r1 != 0) {
    BigInt quot = r0 / r1;
    BigInt r2 = r0 - quot * r1;
    r0 = std::move(r1);
    r1 = std::move(r2);
    BigInt t2 = t0 - quot * t1;
    t0 = std::move(t1);
    t1 = std::move(t2);
  }
  if (r0 != 1) throw Error("value not invertible");
  if (t0 < 0) t0 += modulus;
  return t0;
}

Scalar random_scalar(const GroupParams& params, Rng& rng) {
  return Scalar(rng.uniform_below(params.q));
}

Scalar random_nonzero_scalar(const GroupParams& params, Rng& rng) {
  return Scalar(1 + rng.uniform_below(params.q - 1));
}

std::ostream& operator<<(std::ostream& os, const Scalar& s) { return os << s.value.get_str(); }

std::ostream& operator<<(std::ostream& os, const GroupElement& e) { return os << e.value.get_str(); }

}  // namespace daeq
