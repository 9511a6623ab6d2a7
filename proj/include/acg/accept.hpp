#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace acg {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;  // measured vs expected
};

// ids run 1..10; each criterion is self-contained and deterministic in `seed`.
std::vector<int> acceptance_ids();
CriterionResult run_criterion(int id, std::uint64_t seed);

// Runs every criterion, streaming one "PASS/FAIL" line each; returns true
// when all pass.
bool run_acceptance(std::uint64_t seed, std::ostream& out);

}  // namespace acg
