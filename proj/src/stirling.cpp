#include "lookback/stirling.hpp"

#include <stdexcept>

namespace lookback {

StirlingTriangle StirlingTriangle::build(const Alpha& alpha, const ExactScalar& gamma, int n_max) {
  if (n_max < 0) throw std::invalid_argument("n_max must be >= 0");
  const NumericMode mode =
      (alpha.mode() == NumericMode::LogSigned || gamma.mode() == NumericMode::LogSigned)
          ? NumericMode::LogSigned
          : NumericMode::Exact;
  StirlingTriangle tri(alpha.to_mode(mode), gamma.to_mode(mode));
  const ExactScalar& a = tri.alpha_.value();
  const ExactScalar zero = ExactScalar(0).to_mode(mode);

  tri.rows_.reserve(static_cast<std::size_t>(n_max) + 1);
  tri.rows_.push_back({ExactScalar(1).to_mode(mode)});
  for (int n = 0; n < n_max; ++n) {
    const auto& prev = tri.rows_.back();
    std::vector<ExactScalar> next(static_cast<std::size_t>(n) + 2, zero);
    for (int k = 0; k <= n + 1; ++k) {
      ExactScalar value = k >= 1 ? prev[k - 1] : zero;
      if (k <= n) value += (ExactScalar(n) - ExactScalar(k) * a - tri.gamma_) * prev[k];
      next[k] = std::move(value);
    }
    tri.rows_.push_back(std::move(next));
  }
  return tri;
}

ExactScalar StirlingTriangle::at(int n, int k) const {
  if (n < 0 || n > n_max())
    throw std::out_of_range("Stirling row " + std::to_string(n) + " outside triangle of depth " +
                            std::to_string(n_max()));
  if (k < 0 || k > n) return ExactScalar(0).to_mode(mode());
  return rows_[n][k];
}

std::span<const ExactScalar> StirlingTriangle::row(int n) const {
  if (n < 0 || n > n_max()) throw std::out_of_range("Stirling row out of range");
  return rows_[n];
}

ExactScalar generalized_factorial_coefficient(const StirlingTriangle& tri, int n, int k) {
  if (tri.alpha().value().is_zero())
    throw std::domain_error("generalized factorial coefficients are undefined for alpha = 0");
  if (!tri.gamma().is_zero())
    throw std::domain_error("generalized factorial coefficients need a central triangle");
  return pow(tri.alpha().value(), static_cast<unsigned>(k < 0 ? 0 : k)) * tri.at(n, k);
}

TriangleCache& TriangleCache::global() {
  static TriangleCache cache;
  return cache;
}

std::shared_ptr<const StirlingTriangle> TriangleCache::get(const Alpha& alpha, const ExactScalar& gamma,
                                                           int n_max) {
  const std::string key = alpha.value().key() + "|" + gamma.key();
  {
    std::lock_guard lock(mutex_);
    if (auto it = entries_.find(key); it != entries_.end() && it->second->n_max() >= n_max)
      return it->second;
  }
  // Built outside the lock; concurrent builders produce identical tables.
  auto built = std::make_shared<const StirlingTriangle>(StirlingTriangle::build(alpha, gamma, n_max));
  std::lock_guard lock(mutex_);
  auto& slot = entries_[key];
  if (!slot || slot->n_max() < built->n_max()) slot = built;
  return slot;
}

std::size_t TriangleCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

void TriangleCache::clear() {
  std::lock_guard lock(mutex_);
  entries_.clear();
}

std::shared_ptr<const StirlingTriangle> central_triangle(const Alpha& alpha, int n_max) {
  return TriangleCache::global().get(alpha, ExactScalar(0).to_mode(alpha.mode()), n_max);
}

RecombinationRow recombination_coefficients(int r, int j) {
  if (r < 0) throw std::invalid_argument("r must be >= 0");
  // (x)_{v↓} vanishes at x = t < v, so evaluating the identity at x = 0..r
  // gives a lower-triangular system solved by forward substitution.
  RecombinationRow row{r, j, {}};
  row.coeffs.reserve(static_cast<std::size_t>(r) + 1);
  for (int t = 0; t <= r; ++t) {
    ExactScalar rhs = falling_factorial(ExactScalar(j - t), static_cast<unsigned>(r));
    for (int v = 0; v < t; ++v) rhs -= row.coeffs[v] * falling_factorial(ExactScalar(t), static_cast<unsigned>(v));
    row.coeffs.push_back(rhs / ExactScalar(factorial(static_cast<unsigned>(t))));
  }
  return row;
}

std::vector<ExactScalar> moments_to_pmf(std::span<const ExactScalar> moments, int support_max,
                                        double tolerance) {
  if (support_max < 0) throw std::invalid_argument("support_max must be >= 0");
  if (static_cast<int>(moments.size()) <= support_max)
    throw std::invalid_argument("need falling moments of order 0.." + std::to_string(support_max));
  const NumericMode mode = moments[0].mode();
  if (mode == NumericMode::Exact ? moments[0] != ExactScalar(1)
                                 : std::abs(moments[0].to_double() - 1.0) > tolerance)
    throw std::domain_error("zeroth falling moment must equal 1");

  std::vector<ExactScalar> pmf;
  pmf.reserve(static_cast<std::size_t>(support_max) + 1);
  for (int x = 0; x <= support_max; ++x) {
    ExactScalar p = ExactScalar(0).to_mode(mode);
    for (int i = 0; x + i <= support_max; ++i) {
      ExactScalar term = moments[x + i] / ExactScalar(mpz_class(factorial(x) * factorial(i)));
      if (i % 2 == 0)
        p += term;
      else
        p -= term;
    }
    const bool negative = p.is_exact() ? p.sign() < 0 : p.to_double() < -tolerance;
    if (negative)
      throw std::domain_error("inconsistent moments: recovered P(X=" + std::to_string(x) +
                              ") = " + p.to_string() + " is negative");
    pmf.push_back(std::move(p));
  }
  return pmf;
}

}  // namespace lookback
