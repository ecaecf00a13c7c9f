#pragma once

#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lookback/exactnum.hpp"

namespace lookback {

/// V_{n,j} entries of a table-backed prior, 1 <= j <= n <= n_max.
struct WeightGrid {
  int n_max = 0;
  std::map<std::pair<int, int>, ExactScalar> values;
};

/// Reads CSV with header `n,j,value`; values are decimals or "p/q".
WeightGrid read_weight_csv(std::istream& in);
WeightGrid read_weight_csv_file(const std::string& path);

enum class PriorFamily { PitmanYor, Dirichlet, Table };

std::string_view family_name(PriorFamily family);

/*
 * Gibbs-type prior: discount alpha plus weights V_{n,j} with V_{1,1} = 1 and
 * the backward recursion V_{n,j} = (n - j alpha) V_{n+1,j} + V_{n+1,j+1}.
 *
 * Weights are evaluated lazily and memoized; copies share the memo.
 */
class GibbsPrior {
 public:
  /// alpha in [0,1) needs theta > -alpha; alpha < 0 needs theta = m|alpha|
  /// for a positive integer m (finitely many species).
  static GibbsPrior pitman_yor(const Alpha& alpha, const ExactScalar& theta);
  /// V_{n,k} = theta^k / (theta)_n with theta > 0 and alpha = 0.
  static GibbsPrior dirichlet(const ExactScalar& theta);
  /// Validates coverage, V_{1,1} = 1, positivity and backward consistency
  /// (relative residual <= tolerance).
  static GibbsPrior table(const Alpha& alpha, WeightGrid grid, double tolerance = 1e-9);

  PriorFamily family() const { return family_; }
  const Alpha& alpha() const { return alpha_; }
  NumericMode mode() const { return alpha_.mode(); }
  const std::optional<ExactScalar>& theta() const { return theta_; }
  /// Number of species for a Fisher-type prior (alpha < 0), if any.
  std::optional<int> species_cap() const { return species_cap_; }
  /// Deepest n with weights available, if bounded.
  std::optional<int> max_n() const;

  /// V_{n,j}; zero for j > n. Throws std::out_of_range for n < 1, j < 1 or
  /// n beyond a table's grid.
  ExactScalar weight(int n, int j) const;

  /// Same prior evaluated in another numeric mode. Exact from LogSigned throws.
  GibbsPrior in_mode(NumericMode mode) const;

  /// Human-readable parameter summary, e.g. "pitman_yor(alpha=1/2, theta=1)".
  std::string describe() const;

 private:
  struct Memo;

  GibbsPrior(PriorFamily family, Alpha alpha, std::optional<ExactScalar> theta);
  ExactScalar compute_weight(int n, int j) const;

  PriorFamily family_;
  Alpha alpha_;
  std::optional<ExactScalar> theta_;
  std::optional<int> species_cap_;
  std::shared_ptr<const WeightGrid> grid_;
  std::shared_ptr<Memo> memo_;
};

inline GibbsPrior pitman_yor(const Alpha& alpha, const ExactScalar& theta) {
  return GibbsPrior::pitman_yor(alpha, theta);
}
inline GibbsPrior dirichlet(const ExactScalar& theta) { return GibbsPrior::dirichlet(theta); }
inline GibbsPrior table_prior(const Alpha& alpha, WeightGrid grid) {
  return GibbsPrior::table(alpha, std::move(grid));
}

/// Dumps V_{n,j} for 1 <= j <= n <= n_max as `n,j,value` CSV.
void write_weight_csv(std::ostream& out, const GibbsPrior& prior, int n_max);

/// Observed data: complete when multiplicities are known, incomplete when
/// only (n, j) are.
class SampleSummary {
 public:
  static SampleSummary complete(std::vector<int> multiplicities);
  static SampleSummary incomplete(int n, int j);

  int n() const { return n_; }
  int j() const { return j_; }
  bool is_complete() const { return multiplicities_.has_value(); }
  const std::optional<std::vector<int>>& multiplicities() const { return multiplicities_; }

 private:
  SampleSummary(int n, int j, std::optional<std::vector<int>> mult)
      : n_(n), j_(j), multiplicities_(std::move(mult)) {}

  int n_;
  int j_;
  std::optional<std::vector<int>> multiplicities_;
};

}  // namespace lookback
