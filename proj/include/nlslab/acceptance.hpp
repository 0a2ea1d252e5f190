#pragma once

// The acceptance suite: eleven criteria, each reduced to pass/fail with a
// one-line summary of what was measured.

#include <functional>
#include <string>
#include <vector>

namespace nlslab {

struct CriterionResult {
  int number = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0;
};

struct AcceptanceOptions {
  unsigned threads = 0;
  std::vector<int> only;  // empty: every criterion
};

/// Runs the criteria in order; `on_result` sees each result as soon as it is known.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options = {},
                                            const std::function<void(const CriterionResult&)>& on_result = {});

/// "[PASS]  3  symmetries ...  (1.2 s)"
std::string format_criterion(const CriterionResult& r);

}  // namespace nlslab
