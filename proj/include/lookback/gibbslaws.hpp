#pragma once

#include <span>

#include "lookback/exactnum.hpp"
#include "lookback/priors.hpp"

namespace lookback {

// Exact partition laws under a Gibbs-type prior. Infeasible query points
// have probability 0; dimension violations (r > j, j > n) throw
// std::invalid_argument.

/// p(n_1..n_j) = V_{n,j} prod_i (1-alpha)_{n_i-1}
ExactScalar eppf(const GibbsPrior& prior, std::span<const int> multiplicities);

/// Joint law of the block sizes in exchangeable random order and K_n = j:
/// n! / (prod n_i! j!) * V_{n,j} * prod_i (1-alpha)_{n_i-1}
ExactScalar multivariate_gibbs_pmf(const GibbsPrior& prior, std::span<const int> multiplicities);

/// P(K_n = j) = V_{n,j} S_{n,j}^{-1,-alpha}
ExactScalar pmf_k(const GibbsPrior& prior, int n, int j);

/// P(N_1 = n_1, ..., N_r = n_r | K_n = j) for r = values.size() <= j. Depends
/// on the prior only through alpha.
ExactScalar conditional_multiplicity_pmf(const Alpha& alpha, int n, int j, std::span<const int> values);

/// P(T_r = s | K_n = j) where T_r sums r exchangeably chosen block sizes:
/// C(n,s) C(j,r)^{-1} S_{s,r} S_{n-s,j-r} / S_{n,j}
ExactScalar t_r_pmf(const Alpha& alpha, int n, int j, int r, int s);

}  // namespace lookback
