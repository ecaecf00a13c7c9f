#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "lookback/exactnum.hpp"

namespace lookback {

/*
 * Generalized Stirling triangle S(n,k) = S_{n,k}^{-1,-alpha,-gamma}, defined
 * by the connection identity
 *
 *     (x)_n = sum_{k=0}^{n} S(n,k) * (x + gamma)_{k, step alpha}
 *
 * where (y)_{k, step a} = y(y+a)...(y+(k-1)a). gamma = 0 is the central case;
 * alpha = 0 gives signless Stirling numbers of the first kind and alpha = -1
 * Lah numbers.
 *
 * Rows are filled with S(n+1,k) = S(n,k-1) + (n - k*alpha - gamma) S(n,k).
 */
class StirlingTriangle {
 public:
  /// The triangle's mode is LogSigned if either parameter is.
  static StirlingTriangle build(const Alpha& alpha, const ExactScalar& gamma, int n_max);

  const Alpha& alpha() const { return alpha_; }
  const ExactScalar& gamma() const { return gamma_; }
  int n_max() const { return static_cast<int>(rows_.size()) - 1; }
  NumericMode mode() const { return alpha_.mode(); }

  /// S(n,k); zero for k > n or k < 0. Throws std::out_of_range if n > n_max.
  ExactScalar at(int n, int k) const;
  std::span<const ExactScalar> row(int n) const;

 private:
  StirlingTriangle(Alpha alpha, ExactScalar gamma) : alpha_(std::move(alpha)), gamma_(std::move(gamma)) {}

  Alpha alpha_;
  ExactScalar gamma_;
  std::vector<std::vector<ExactScalar>> rows_;
};

inline ExactScalar stirling_number(const StirlingTriangle& tri, int n, int k) { return tri.at(n, k); }

/// C(n,k;alpha) = alpha^k S(n,k) for a central triangle with alpha != 0.
/// Throws std::domain_error otherwise.
ExactScalar generalized_factorial_coefficient(const StirlingTriangle& tri, int n, int k);

/// Process-wide memo of triangles keyed on (alpha, gamma, mode). Safe for
/// concurrent use; a request for a deeper triangle than cached rebuilds it.
class TriangleCache {
 public:
  static TriangleCache& global();

  std::shared_ptr<const StirlingTriangle> get(const Alpha& alpha, const ExactScalar& gamma, int n_max);
  std::size_t size() const;
  void clear();

 private:
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<const StirlingTriangle>> entries_;
};

/// Central triangle with discount alpha from the global cache.
std::shared_ptr<const StirlingTriangle> central_triangle(const Alpha& alpha, int n_max);

/// Coefficients c[0..r] with (j - x)_{r↓} = sum_v c[v] (x)_{v↓} identically in x.
struct RecombinationRow {
  int r = 0;
  int j = 0;
  std::vector<ExactScalar> coeffs;
};

RecombinationRow recombination_coefficients(int r, int j);

/// Inverts falling factorial moments E[(X)_{r↓}], r = 0..support_max, of a
/// count supported on {0..support_max}:
///     P(X = x) = sum_{i>=0} (-1)^i E[(X)_{(x+i)↓}] / (x! i!)
/// Throws std::domain_error if E[(X)_0] != 1 or an entry is negative beyond
/// `tolerance` (exact mode tolerates nothing).
std::vector<ExactScalar> moments_to_pmf(std::span<const ExactScalar> moments, int support_max,
                                        double tolerance = 1e-9);

}  // namespace lookback
