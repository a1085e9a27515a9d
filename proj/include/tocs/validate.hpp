#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tocs/susy.hpp"

namespace tocs {

enum class CheckStatus { Pass, Fail, Report, Skip };
const char* status_name(CheckStatus s);

struct CheckResult {
  std::string module;
  std::string name;
  CheckStatus status = CheckStatus::Pass;
  double value = 0.0;      // deviation, or the measured quantity for threshold checks
  double tolerance = 0.0;
  std::string detail;
};

struct ValidateOptions {
  int basis = 64;  // truncation for coherent-state sums
  std::optional<std::vector<SeedSolution>> seeds;  // replaces the q = 4 seeds in the potential check
  bool include_entropy = true;
};

// Runs the invariant suite of every module. Checks that need a larger truncation than
// opt.basis come back as Skip; expected discrepancies come back as Report.
std::vector<CheckResult> run_validation(const ValidateOptions& opt = {});

// true when nothing failed (Report and Skip do not count)
bool all_passed(const std::vector<CheckResult>& results);

}  // namespace tocs
