#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace lpstab {
namespace verify {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string details;
  double seconds = 0.0;
  /// Serialized failing instance for replay, present only on failure.
  std::optional<std::string> counterexample;
};

/// Criteria 1..10. Deterministic for a fixed seed.
CriterionResult run_criterion(int id, std::uint64_t seed);

/// Suites: structure {1,2}, localization {3}, sequences {4,5},
/// propagation {6}, inverse {7,8,9}, zoo {10}, all {1..10}.
std::vector<int> suite_criteria(const std::string& suite);
std::vector<std::string> suite_names();

std::vector<CriterionResult> run_suite(const std::string& suite,
                                       std::uint64_t seed);

}  // namespace verify
}  // namespace lpstab
