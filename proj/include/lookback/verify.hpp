#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lookback/priors.hpp"

namespace lookback {

enum class GridSize { Small, Full };

GridSize parse_grid(std::string_view text);

/// PY(1/2,1), PY(1/3,2), PY(-1/2,5/2), Dirichlet(1), Dirichlet(5), exact mode.
std::vector<GibbsPrior> reference_priors();

struct VerificationRow {
  std::string check;
  std::string prior;
  std::size_t points = 0;
  std::size_t failures = 0;
  std::string first_failure;

  bool passed() const { return failures == 0; }
};

struct VerificationResult {
  std::vector<VerificationRow> rows;
  bool all_passed() const;
};

/*
 * Closed form vs. oracle grid. Small: n <= 4, m <= 2. Full: n <= 6, m <= 3.
 * Enumeration comparisons are restricted to n + m <= 8; the Monte Carlo row
 * tolerates at most 5% of points outside 4 standard errors.
 */
VerificationResult run_verification(GridSize grid, std::uint64_t seed, std::uint64_t mc_count);

}  // namespace lookback
