#pragma once

#include <string>
#include <vector>

namespace daeq {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Exhaustive toy-group checks of sharing, encryption and key generation.
/// `mutate` corrupts one reference constant so the harness can be shown to fail.
std::vector<CheckResult> run_selftest(bool mutate = false);

}  // namespace daeq
