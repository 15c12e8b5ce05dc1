#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace learnpath {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double threshold = 0.0;
  std::string detail;
  double seconds = 0.0;
};

inline constexpr int kCriterionCount = 12;

// Runs the listed criteria (all when empty) in order. A criterion that throws
// is reported as failed with the error message as its detail.
std::vector<CriterionResult> run_acceptance(std::uint64_t seed, const std::vector<int>& only = {});
CriterionResult run_criterion(int id, std::uint64_t seed);

// "criterion  3 PASS  <name>: <detail> [1.2 s]"
std::string format_criterion(const CriterionResult& r);

}  // namespace learnpath
