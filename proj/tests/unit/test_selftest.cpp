#include <gtest/gtest.h>

#include "daeq/selftest.hpp"

using namespace daeq;

TEST(Selftest, AllChecksPass) {
  const auto results = run_selftest();
  EXPECT_GE(results.size(), 10u);
  for (const auto& r : results) EXPECT_TRUE(r.passed) << r.name << ": " << r.detail;
}

TEST(Selftest, MutationIsDetected) {
  std::size_t failed = 0;
  for (const auto& r : run_selftest(true)) failed += r.passed ? 0 : 1;
  EXPECT_GT(failed, 0u);
}
