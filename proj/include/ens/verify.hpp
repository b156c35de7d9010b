#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "ens/fock.hpp"

namespace ens::verify {

enum class Suite { Fast, Full };

struct CheckResult {
  std::string id;
  std::string name;
  std::string detail;
  bool hard = true;  // findings (conjecture reports) never fail the run
  bool pass = false;
};

/// Runs the whole verification suite. Full uses the stated grids; Fast trims
/// them to stay interactive. Seeded checks are reproducible by construction.
std::vector<CheckResult> run_suite(Suite suite, std::uint64_t seed);

bool all_hard_passed(const std::vector<CheckResult>& results);

/// |u>_A |v>_B with Gaussian-random local amplitudes, normalized.
fock::TwoModeState random_product_state(std::mt19937_64& rng, int cutoff_a, int cutoff_b);

/// Fully random normalized two-mode state.
fock::TwoModeState random_state(std::mt19937_64& rng, int cutoff_a, int cutoff_b);

}  // namespace ens::verify
