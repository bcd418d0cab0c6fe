#pragma once

#include "daeq/group.hpp"

namespace daeq {

inline constexpr int kMinEncodingBits = 2;
inline constexpr int kMaxEncodingBits = 15;
inline constexpr int kDefaultEncodingBits = 10;

/// Fixed-point encoding into Z_q with b fractional bits. Values above
/// int_max = floor(q/3) are positive, values above q - int_max are negative,
/// and the band between is a dead zone that signals overflow.
struct EncodingConfig {
  int b = kDefaultEncodingBits;
  BigInt q;
  BigInt int_max;

  static EncodingConfig make(int b, const BigInt& q);
  double scale() const;
};

Scalar encode(double grad, const EncodingConfig& cfg);
/// Same rounding as encode but returns the signed integer before reduction.
BigInt encode_signed(double grad, const EncodingConfig& cfg);
double decode(const Scalar& m, const EncodingConfig& cfg);
/// decode for an arbitrary integer representative (reduced mod q first).
double decode_integer(const BigInt& m, const EncodingConfig& cfg);

/// True when n summands of magnitude <= max_magnitude cannot leave the
/// decodable range after encoding.
bool has_headroom(const EncodingConfig& cfg, double max_magnitude, std::size_t n);

}  // namespace daeq
