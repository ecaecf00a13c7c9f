#include "lookback/gibbslaws.hpp"

#include <numeric>
#include <stdexcept>
#include <string>

#include "lookback/stirling.hpp"

namespace lookback {

namespace {

ExactScalar block_weight_product(const Alpha& alpha, std::span<const int> sizes) {
  const ExactScalar base = ExactScalar(1) - alpha.value();
  ExactScalar out = ExactScalar(1).to_mode(alpha.mode());
  for (int size : sizes) out *= rising_factorial(base, static_cast<unsigned>(size - 1));
  return out;
}

void check_sizes(std::span<const int> sizes) {
  if (sizes.empty()) throw std::invalid_argument("need at least one block");
  for (int size : sizes)
    if (size < 1) throw std::invalid_argument("block sizes must be >= 1");
}

void check_dims(int n, int j, int r) {
  if (n < 1 || j < 1 || j > n)
    throw std::invalid_argument("need 1 <= j <= n, got n=" + std::to_string(n) + ", j=" + std::to_string(j));
  if (r < 0 || r > j)
    throw std::invalid_argument("need 0 <= r <= j, got r=" + std::to_string(r) + ", j=" + std::to_string(j));
}

}  // namespace

ExactScalar eppf(const GibbsPrior& prior, std::span<const int> multiplicities) {
  check_sizes(multiplicities);
  const int n = std::accumulate(multiplicities.begin(), multiplicities.end(), 0);
  const int j = static_cast<int>(multiplicities.size());
  return prior.weight(n, j) * block_weight_product(prior.alpha(), multiplicities);
}

ExactScalar multivariate_gibbs_pmf(const GibbsPrior& prior, std::span<const int> multiplicities) {
  check_sizes(multiplicities);
  const int n = std::accumulate(multiplicities.begin(), multiplicities.end(), 0);
  mpz_class denom = factorial(static_cast<unsigned>(multiplicities.size()));
  for (int size : multiplicities) denom *= factorial(static_cast<unsigned>(size));
  return ExactScalar(mpq_class(factorial(static_cast<unsigned>(n)), denom)) * eppf(prior, multiplicities);
}

ExactScalar pmf_k(const GibbsPrior& prior, int n, int j) {
  check_dims(n, j, 0);
  return prior.weight(n, j) * central_triangle(prior.alpha(), n)->at(n, j);
}

ExactScalar conditional_multiplicity_pmf(const Alpha& alpha, int n, int j, std::span<const int> values) {
  const int r = static_cast<int>(values.size());
  check_dims(n, j, r);
  const ExactScalar zero = ExactScalar(0).to_mode(alpha.mode());
  int total = 0;
  for (int v : values) {
    if (v < 1) return zero;
    total += v;
  }
  if (total > n - (j - r)) return zero;
  if (r == j && total != n) return zero;

  const auto tri = central_triangle(alpha, n);
  mpz_class denom = factorial(static_cast<unsigned>(n - total));
  for (int v : values) denom *= factorial(static_cast<unsigned>(v));
  // j_[r] = j (j-1) ... (j-r+1)
  denom *= falling_factorial(ExactScalar(j), static_cast<unsigned>(r)).rational().get_num();
  const ExactScalar combinatorial(mpq_class(factorial(static_cast<unsigned>(n)), denom));
  return combinatorial * block_weight_product(alpha, values) * tri->at(n - total, j - r) / tri->at(n, j);
}

ExactScalar t_r_pmf(const Alpha& alpha, int n, int j, int r, int s) {
  check_dims(n, j, r);
  if (s < r || s > n - (j - r)) return ExactScalar(0).to_mode(alpha.mode());
  const auto tri = central_triangle(alpha, n);
  const ExactScalar coeff(mpq_class(binomial(n, s), binomial(j, r)));
  return coeff * tri->at(s, r) * tri->at(n - s, j - r) / tri->at(n, j);
}

}  // namespace lookback
