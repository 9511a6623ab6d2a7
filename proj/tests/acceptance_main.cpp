// Acceptance suite runner: one PASS/FAIL line per criterion on stdout,
// exit status 0 only when every criterion passes.
#include <cstdlib>
#include <iostream>

#include "acg/accept.hpp"

int main(int argc, char** argv) {
  std::uint64_t seed = 1;
  if (argc > 1) seed = std::strtoull(argv[1], nullptr, 10);
  bool ok = acg::run_acceptance(seed, std::cout);
  std::cout << (ok ? "acceptance: all criteria passed"
                   : "acceptance: FAILURES present")
            << std::endl;
  return ok ? EXIT_SUCCESS : EXIT_FAILURE;
}
