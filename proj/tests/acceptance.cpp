// Acceptance suite: runs every hard criterion at its stated grid and
// tolerance, one pass/fail line per criterion. Conjecture evaluations are
// reported as NOTE lines and never fail the run.

#include <cstdio>

#include "ens/verify.hpp"

int main() {
  const auto results = ens::verify::run_suite(ens::verify::Suite::Full, 12345);
  for (const auto& r : results) {
    std::printf("%s [%s] %s -- %s\n", r.pass ? "PASS" : (r.hard ? "FAIL" : "NOTE"),
                r.id.c_str(), r.name.c_str(), r.detail.c_str());
  }
  const bool ok = ens::verify::all_hard_passed(results);
  std::printf("%s\n", ok ? "acceptance: all criteria passed" : "acceptance: FAILURES present");
  return ok ? 0 : 1;
}
