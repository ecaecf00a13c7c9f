#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lookback/exactnum.hpp"
#include "lookback/priors.hpp"

namespace lookback {

/// Which count of old species a moment refers to.
enum class Target {
  ExactlyL,  ///< R_{l,m}: old species re-observed exactly l times
  AtLeastOnce,  ///< R_m: old species re-observed at least once
};

std::string_view target_name(Target target);  // "rl" | "rm"
Target parse_target(std::string_view text);

/*
 * Posterior kernel shared by the complete- and incomplete-information moments:
 *
 *   g(s) = sum_{k=0}^{m-rl} V_{n+m,j+k} / V_{n,j} * S(m-rl, k)
 *
 * where S is the generalized Stirling triangle with discount alpha and shift
 * gamma = -(n - s - (j-r) alpha). With the connection convention used by
 * StirlingTriangle, S(q,k) is the total predictive weight of all ways the q
 * unconstrained future draws can land on the j-r unchosen old species (of
 * total size n - s) while founding exactly k new species.
 *
 * Requires r <= j, r*l <= m and r <= s <= n-(j-r). Throws std::domain_error
 * when V_{n,j} = 0 (the observed sample is impossible under the prior).
 */
ExactScalar g_kernel(const GibbsPrior& prior, int n, int j, int m, int r, int l, int s);

/// Shift gamma passed to the kernel triangle, -(n - s - (j-r) alpha).
ExactScalar kernel_shift(const Alpha& alpha, int n, int j, int r, int s);

/// E[(R_{l,m})_{r↓}] given the full multiplicities.
ExactScalar complete_info_moment(const GibbsPrior& prior, std::span<const int> multiplicities, int m, int l,
                                 int r);

/// E[(R_{l,m})_{r↓}] given only (n, j):
///   r! m! / ((l!)^r (m-rl)!) [(1-alpha)_l]^r
///     * sum_{s=r}^{n-(j-r)} C(n,s) S'(s,r) S(n-s,j-r) / S(n,j) * g(s)
/// with S central at discount alpha and S' central at discount alpha - l.
ExactScalar incomplete_info_moment(const GibbsPrior& prior, int n, int j, int m, int l, int r);

/// E[(R_{l,m})_{r↓}] for either kind of data.
ExactScalar rl_moment(const GibbsPrior& prior, const SampleSummary& data, int m, int l, int r);

/// E[(R_m)_{r↓}] through the l = 0 moments and
/// (j - x)_{r↓} = sum_v c_v (x)_{v↓}.
ExactScalar r_m_moment(const GibbsPrior& prior, const SampleSummary& data, int m, int r);

struct BackwardQuery {
  GibbsPrior prior;
  SampleSummary data;
  int m = 0;
  int l = 0;
  int r_max = 0;
  Target target = Target::ExactlyL;
};

struct MomentReport {
  BackwardQuery query;
  /// moments[r] = E[(X)_{r↓}], r = 0..r_max
  std::vector<ExactScalar> moments;
  /// Present when r_max >= j: P(X = x), x = 0..j.
  std::optional<std::vector<ExactScalar>> pmf;
  NumericMode mode = NumericMode::Exact;
  /// Discount of the tilted triangle in the s-sum (alpha - l).
  ExactScalar tilted_discount;
  /// Human-readable statement of the kernel triangle convention.
  std::string kernel_convention;
};

/// Orders r with r > j or r*l > m are reported as 0.
MomentReport backward_report(const BackwardQuery& query);

}  // namespace lookback
