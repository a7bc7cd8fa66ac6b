#pragma once

#include <string>
#include <vector>

namespace gibbs {

struct AcceptanceResult {
  std::string name;
  bool pass = false;
  double seconds = 0.0;
  double limit_seconds = 0.0;
  std::string detail;
};

// Runs the full acceptance battery; each entry is one independent criterion
// with its tolerance and wall-clock limit pinned in code.
std::vector<AcceptanceResult> run_acceptance();

// Prints one PASS/FAIL line per criterion and returns the failure count.
int run_acceptance_cli();

}  // namespace gibbs
