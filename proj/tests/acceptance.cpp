// Acceptance gate: runs every verification criterion at its pinned
// tolerance and prints one pass/fail line each. Exit status is nonzero if
// anything fails.

#include <cstdio>
#include <cstdlib>
#include <string>

#include "lpstab/verification.hpp"

int main(int argc, char** argv) {
  std::uint64_t seed = 1;
  if (argc > 1) seed = std::strtoull(argv[1], nullptr, 10);

  int failures = 0;
  double total = 0.0;
  for (int id = 1; id <= 10; ++id) {
    auto r = lpstab::verify::run_criterion(id, seed);
    total += r.seconds;
    std::printf("[%s] criterion %2d: %s (%.2fs)\n", r.pass ? "PASS" : "FAIL",
                r.id, r.name.c_str(), r.seconds);
    if (!r.pass) {
      std::printf("       %s\n", r.details.c_str());
      ++failures;
    } else {
      std::printf("       %s\n", r.details.c_str());
    }
  }
  std::printf("%d/10 criteria passed in %.1fs\n", 10 - failures, total);
  return failures == 0 ? 0 : 1;
}
