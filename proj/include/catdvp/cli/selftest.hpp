#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace catdvp::cli {

/// Deliberate defects for checking that the selftest catches them.
enum class Fault { None, ConjugationSign };

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

std::vector<CheckResult> run_selftest(Fault fault = Fault::None);

/// Prints the pass/fail table; returns kExitOk or kExitSelftestFailed.
int cmd_selftest(Fault fault, std::ostream& out);

}  // namespace catdvp::cli
