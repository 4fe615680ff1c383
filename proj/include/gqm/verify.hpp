#pragma once

// Built-in property suites bundled for the command-line tool. Each check
// reports the measured quantity next to the threshold it was held to.

#include <cstdint>
#include <string>
#include <vector>

namespace gqm {

struct CheckResult {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double threshold = 0.0;
  // "<" when measured must stay below threshold, ">=" when it must reach it.
  std::string relation = "<";
};

struct SuiteReport {
  std::string suite;
  std::vector<CheckResult> checks;
  bool passed() const;
};

/// algebra, gauge, pde, path, measurement.
const std::vector<std::string>& suite_names();

/// Runs one suite, or every suite for "all". Throws InvalidArgument for an
/// unknown label.
std::vector<SuiteReport> run_verification(const std::string& suite, std::uint64_t seed = 20240611,
                                          int threads = 1);

}  // namespace gqm
