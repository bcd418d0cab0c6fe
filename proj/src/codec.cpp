#include "daeq/codec.hpp"

#include <cmath>
#include <string>

#include "daeq/errors.hpp"

namespace daeq {

EncodingConfig EncodingConfig::make(int b, const BigInt& q) {
  if (b < kMinEncodingBits || b > kMaxEncodingBits) {
    throw ConfigError("encoding bits must lie in [" + std::to_string(kMinEncodingBits) + ", " +
                      std::to_string(kMaxEncodingBits) + "], got " + std::to_string(b));
  }
  if (q < 3) throw ConfigError("group order too small for encoding");
  return EncodingConfig{b, q, q / 3};
}

double EncodingConfig::scale() const { return std::ldexp(1.0, b); }

BigInt encode_signed(double grad, const EncodingConfig& cfg) {
  if (!std::isfinite(grad)) throw EncodeOverflow("cannot encode a non-finite value");
  // std::round rounds halfway cases away from zero.
  const double rounded = std::round(grad * cfg.scale());
  BigInt m;
  mpz_set_d(m.get_mpz_t(), rounded);
  if (abs(m) > cfg.int_max) throw EncodeOverflow("|round(x * 2^b)| exceeds int_max");
  return m;
}

Scalar encode(double grad, const EncodingConfig& cfg) {
  BigInt m = encode_signed(grad, cfg);
  if (m < 0) m += cfg.q;
  return Scalar(std::move(m));
}

double decode_integer(const BigInt& m, const EncodingConfig& cfg) {
  BigInt r;
  mpz_mod(r.get_mpz_t(), m.get_mpz_t(), cfg.q.get_mpz_t());
  if (r <= cfg.int_max) return std::ldexp(r.get_d(), -cfg.b);
  if (r > cfg.q - cfg.int_max) return std::ldexp(BigInt(r - cfg.q).get_d(), -cfg.b);
  throw DecodeDeadZone("encoded value falls between int_max and q - int_max");
}

double decode(const Scalar& m, const EncodingConfig& cfg) { return decode_integer(m.value, cfg); }

bool has_headroom(const EncodingConfig& cfg, double max_magnitude, std::size_t n) {
  const double per_item = std::round(std::abs(max_magnitude) * cfg.scale());
  BigInt bound;
  mpz_set_d(bound.get_mpz_t(), per_item);
  return bound * static_cast<unsigned long>(n) <= cfg.int_max;
}

}  // namespace daeq
