#include <gtest/gtest.h>

#include <cmath>

#include "daeq/codec.hpp"
#include "daeq/errors.hpp"

using namespace daeq;

namespace {
const GroupParams& params() {
  static const GroupParams p = generate_params(64, 256, "codec");
  return p;
}
}  // namespace

TEST(Codec, KnownEncodings) {
  const auto cfg = EncodingConfig::make(10, params().q);
  EXPECT_EQ(encode(0.5, cfg).value, 512);
  EXPECT_EQ(encode(-0.25, cfg).value, params().q - 256);
  EXPECT_EQ(encode(0.0, cfg).value, 0);
  EXPECT_DOUBLE_EQ(decode(Scalar(BigInt(512)), cfg), 0.5);
  EXPECT_DOUBLE_EQ(decode(Scalar(BigInt(params().q - 256)), cfg), -0.25);
  EXPECT_EQ(cfg.int_max, params().q / 3);
}

TEST(Codec, HalfwayRoundsAwayFromZero) {
  const auto cfg = EncodingConfig::make(2, params().q);
  EXPECT_EQ(encode_signed(0.125, cfg), 1);    // 0.5 -> 1
  EXPECT_EQ(encode_signed(-0.125, cfg), -1);  // -0.5 -> -1
  EXPECT_EQ(encode_signed(0.375, cfg), 2);    // 1.5 -> 2
}

TEST(Codec, RoundTripWithinHalfQuantum) {
  Rng rng = Rng::from_seed("codec-rt");
  for (int b = kMinEncodingBits; b <= kMaxEncodingBits; ++b) {
    const auto cfg = EncodingConfig::make(b, params().q);
    const double bound = std::ldexp(1.0, -(b + 1));
    for (int i = 0; i < 10000; ++i) {
      const double x = (rng.uniform01() * 2.0 - 1.0) * 100.0;
      EXPECT_LE(std::abs(decode(encode(x, cfg), cfg) - x), bound) << "b=" << b << " x=" << x;
    }
  }
}

TEST(Codec, SumsDecodeToSumOfRoundedValues) {
  const auto cfg = EncodingConfig::make(10, params().q);
  Rng rng = Rng::from_seed("codec-sum");
  BigInt acc = 0;
  double expect = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double x = rng.uniform01() - 0.5;
    acc += encode(x, cfg).value;
    expect += std::round(x * 1024.0) / 1024.0;
  }
  EXPECT_NEAR(decode_integer(acc, cfg), expect, 1e-9);
}

TEST(Codec, DeadZoneAndOverflow) {
  const auto cfg = EncodingConfig::make(10, params().q);
  EXPECT_NO_THROW(decode(Scalar(cfg.int_max), cfg));
  EXPECT_THROW(decode(Scalar(BigInt(cfg.int_max + 1)), cfg), DecodeDeadZone);
  EXPECT_THROW(decode(Scalar(BigInt(params().q / 2)), cfg), DecodeDeadZone);
  EXPECT_NO_THROW(decode(Scalar(BigInt(params().q - cfg.int_max + 1)), cfg));
  const auto toy = EncodingConfig::make(2, toy_params().q);  // int_max = 3
  EXPECT_THROW(encode(1.0, toy), EncodeOverflow);             // round(4) > 3
  EXPECT_NO_THROW(encode(0.75, toy));
  EXPECT_THROW(encode(std::nan(""), cfg), EncodeOverflow);
}

TEST(Codec, BitBounds) {
  EXPECT_THROW(EncodingConfig::make(1, params().q), ConfigError);
  EXPECT_THROW(EncodingConfig::make(16, params().q), ConfigError);
  EXPECT_NO_THROW(EncodingConfig::make(2, params().q));
  EXPECT_NO_THROW(EncodingConfig::make(15, params().q));
}

TEST(Codec, Headroom) {
  const auto toy = EncodingConfig::make(2, toy_params().q);
  EXPECT_TRUE(has_headroom(toy, 0.25, 3));
  EXPECT_FALSE(has_headroom(toy, 0.25, 4));
  const auto cfg = EncodingConfig::make(10, params().q);
  EXPECT_TRUE(has_headroom(cfg, 1.0, 1000));
}
