#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "daeq/errors.hpp"
#include "daeq/group.hpp"

using namespace daeq;

TEST(Group, ToyParamsShape) {
  const GroupParams p = toy_params();
  EXPECT_EQ(p.p, 23);
  EXPECT_EQ(p.q, 11);
  EXPECT_EQ(p.g, 2);
  EXPECT_EQ(p.g0, 2);
  EXPECT_NO_THROW(validate_params(p));
  EXPECT_NE(p.y, p.g);
  EXPECT_TRUE(in_subgroup(p, p.pedersen_base()));
  EXPECT_TRUE(p.encoding_base_in_subgroup());
}

TEST(Group, PowModExhaustiveAgainstRepeatedMultiplication) {
  const GroupParams p = toy_params();
  for (unsigned long base = 0; base < 23; ++base) {
    BigInt naive = 1;
    for (unsigned long e = 0; e < 11; ++e) {
      EXPECT_EQ(pow_mod(p, GroupElement(BigInt(base)), Scalar(e)).value, naive) << base << "^" << e;
      naive = naive * base % 23;
    }
  }
}

TEST(Group, ExponentReducedModQ) {
  const GroupParams p = toy_params();
  for (unsigned long e = 0; e < 30; ++e) {
    EXPECT_EQ(pow_mod(p, p.generator(), make_scalar(p, BigInt(e))), pow_mod_raw(p, p.generator(), BigInt(e)));
  }
}

TEST(Group, ScalarArithmetic) {
  const GroupParams p = toy_params();
  EXPECT_EQ(add(p, Scalar(7ul), Scalar(8ul)), Scalar(4ul));
  EXPECT_EQ(sub(p, Scalar(3ul), Scalar(5ul)), Scalar(9ul));
  EXPECT_EQ(mul(p, Scalar(4ul), Scalar(6ul)), Scalar(2ul));
  for (unsigned long a = 1; a < 11; ++a) EXPECT_EQ(inverse_mod_prime(BigInt(a), 11) * a % 11, 1);
  EXPECT_THROW(inverse_mod_prime(BigInt(0), 11), Error);
  EXPECT_EQ(make_scalar(p, BigInt(-1)), Scalar(10ul));
}

TEST(Group, InverseAndSubgroup) {
  const GroupParams p = toy_params();
  for (unsigned long a = 1; a < 23; ++a) {
    const GroupElement x{BigInt(a)};
    EXPECT_EQ(mul_mod(p, x, inverse_mod(p, x)).value, 1);
  }
  // Quadratic residues mod 23 form the order-11 subgroup.
  int members = 0;
  for (unsigned long a = 1; a < 23; ++a) members += in_subgroup(p, GroupElement(BigInt(a))) ? 1 : 0;
  EXPECT_EQ(members, 11);
}

TEST(Group, RandomScalarChiSquare) {
  const GroupParams p = toy_params();
  Rng rng = Rng::from_seed("scalar-chi");
  std::array<int, 11> counts{};
  const int draws = 110000;
  for (int i = 0; i < draws; ++i) ++counts[random_scalar(p, rng).value.get_ui()];
  double chi = 0.0;
  for (int c : counts) chi += (c - 10000.0) * (c - 10000.0) / 10000.0;
  EXPECT_LT(chi, 29.59);  // chi^2 with 10 dof, 0.999 quantile
  for (int i = 0; i < 1000; ++i) EXPECT_NE(random_nonzero_scalar(p, rng).value, 0);
}

TEST(Group, GenerateSmallParamsDeterministicAndValid) {
  const GroupParams a = generate_params(16, 64, "unit");
  const GroupParams b = generate_params(16, 64, "unit");
  EXPECT_EQ(a, b);
  EXPECT_NO_THROW(validate_params(a));
  EXPECT_EQ(a.key_bits(), 16u);
  EXPECT_EQ(a.group_bits(), 64u);
  EXPECT_TRUE(is_probable_prime(a.p));
  EXPECT_TRUE(is_probable_prime(a.q));
  EXPECT_EQ((a.p - 1) % a.q, 0);
  EXPECT_NE(generate_params(16, 64, "other").q, a.q);
}

TEST(Group, GenerateRejectsBadSizes) {
  EXPECT_THROW(generate_params(4, 64, "s"), ParamGenerationError);
  EXPECT_THROW(generate_params(64, 64, "s"), ParamGenerationError);
  EXPECT_THROW(generate_params(16, 64, ""), ParamGenerationError);
}

TEST(Group, ValidateRejectsBrokenParams) {
  GroupParams p = toy_params();
  p.g = 5;  // 5 is a non-residue mod 23, order 22
  EXPECT_THROW(validate_params(p), ParamGenerationError);
  p = toy_params();
  p.q = 7;
  EXPECT_THROW(validate_params(p), ParamGenerationError);
  p = toy_params();
  p.y = p.g;
  EXPECT_THROW(validate_params(p), ParamGenerationError);
}

TEST(Group, SerializeParseRoundTrip) {
  const GroupParams a = generate_params(24, 80, "serial");
  const std::string text = serialize_params(a);
  EXPECT_EQ(parse_params(text), a);
  EXPECT_EQ(parse_params("# comment\n\n" + text + "\n"), a);
  EXPECT_THROW(parse_params("0x17\n0xb\n"), ParseError);
  EXPECT_THROW(parse_params("0x17\n0xb\n2\nnonsense\n2\n"), ParseError);
}

TEST(Group, ShippedLargeParams) {
  std::ifstream in(DAEQ_CONFIG_DIR "/group_3072.txt");
  ASSERT_TRUE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  const GroupParams p = parse_params(ss.str());
  EXPECT_NO_THROW(validate_params(p));
  EXPECT_EQ(p.group_bits(), 3072u);
  EXPECT_EQ(p.key_bits(), 256u);
  EXPECT_EQ(p.element_bytes(), 384u);
  EXPECT_EQ(p, generate_params(256, 3072, "daeq-fl"));
}
