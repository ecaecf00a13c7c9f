#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "lookback/estimators.hpp"
#include "lookback/exactnum.hpp"
#include "lookback/priors.hpp"

namespace lookback {

/// One way the m additional observations can fall, with its exact probability.
struct ContinuationOutcome {
  /// allocation[t] < j: old species index; >= j: new species (j + order of appearance).
  std::vector<int> allocation;
  /// Re-observation count of each old species.
  std::vector<int> old_counts;
  int new_species = 0;
  ExactScalar weight;

  int reobserved_exactly(int l) const;  // R_{l,m}
  int reobserved() const;  // R_m
  int statistic(Target target, int l) const;
};

inline constexpr std::uint64_t kEnumerationGuard = 10'000'000;

/// All observation sequences of length m continuing a sample with the given
/// multiplicities, weighted by the one-step predictive ratios
///   P(join block b) = (size_b - alpha) V_{N+1,K} / V_{N,K},
///   P(new species)  = V_{N+1,K+1} / V_{N,K}.
/// Zero-probability branches (e.g. at a Fisher prior's species cap) are pruned.
/// Throws std::length_error if (j+m)^m exceeds `guard`.
std::vector<ContinuationOutcome> enumerate_continuations(const GibbsPrior& prior,
                                                         std::span<const int> multiplicities, int m,
                                                         std::uint64_t guard = kEnumerationGuard);

/// sum over outcomes of weight * (statistic)_{r↓}
ExactScalar oracle_moment(std::span<const ContinuationOutcome> outcomes, Target target, int l, int r);

/// Incomplete-information moment by brute force: oracle_moment averaged over
/// every composition of n into j blocks, weighted by its conditional law
/// given K_n = j (normalized multivariate Gibbs weights, no Stirling numbers).
ExactScalar oracle_incomplete_moment(const GibbsPrior& prior, int n, int j, int m, Target target, int l, int r,
                                     std::uint64_t guard = kEnumerationGuard);

/// SplitMix64; small, fast and good enough for substream seeding.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()();
  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  static std::uint64_t mix(std::uint64_t z);
  /// Independent stream for sample `index` of a run with `master_seed`.
  static SplitMix64 substream(std::uint64_t master_seed, std::uint64_t index);

 private:
  std::uint64_t state_;
};

struct McEstimate {
  double estimate = 0.0;
  double standard_error = 0.0;  ///< sample sd / sqrt(count); 0 when count == 1
  std::uint64_t count = 0;
  std::uint64_t seed = 0;
};

/*
 * Monte Carlo summary of m-step continuations. Sample i draws from its own
 * substream and statistics are accumulated as integers, so the result is
 * identical for any number of workers.
 */
class McSummary {
 public:
  McSummary(int j, int m, std::uint64_t count, std::uint64_t seed);

  /// Estimate of E[(X)_{r↓}] for X = R_{l,m} or R_m, r <= j.
  McEstimate estimate(Target target, int l, int r) const;
  std::uint64_t count() const { return count_; }
  std::uint64_t seed() const { return seed_; }

  /// Adds one sample's per-old-species re-observation counts.
  void record(std::span<const int> old_counts);
  void merge(const McSummary& other);

  friend bool operator==(const McSummary&, const McSummary&) = default;

 private:
  std::size_t slot(int statistic, int r) const;

  int j_;
  int m_;
  std::uint64_t count_;
  std::uint64_t seed_;
  std::uint64_t recorded_ = 0;
  // Indexed [statistic][r]; statistics 0..m are R_{l,m}, m+1 is R_m.
  std::vector<unsigned __int128> sums_;
  std::vector<unsigned __int128> squares_;
};

McSummary mc_sample(const GibbsPrior& prior, std::span<const int> multiplicities, int m, std::uint64_t count,
                    std::uint64_t seed, unsigned workers = 1);

}  // namespace lookback
