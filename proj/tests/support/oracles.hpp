#pragma once

// Test-only reference computations. Nothing here calls the recurrence,
// estimator or enumeration code paths it is used to check.

#include <gmpxx.h>

#include <functional>
#include <stdexcept>
#include <vector>

namespace lookback::testing {

/// Every composition of n into k positive parts.
inline std::vector<std::vector<int>> brute_compositions(int n, int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  std::function<void(int)> rec = [&](int left) {
    if (static_cast<int>(cur.size()) == k) {
      if (left == 0) out.push_back(cur);
      return;
    }
    for (int p = 1; p <= left; ++p) {
      cur.push_back(p);
      rec(left - p);
      cur.pop_back();
    }
  };
  if (k == 0) {
    if (n == 0) out.push_back({});
    return out;
  }
  rec(n);
  return out;
}

inline mpq_class q_rising(mpq_class x, int s, mpq_class step = 1) {
  mpq_class out = 1;
  for (int i = 0; i < s; ++i) out *= x + step * i;
  return out;
}

inline mpz_class z_fact(int n) {
  mpz_class out = 1;
  for (int i = 2; i <= n; ++i) out *= i;
  return out;
}

/// (n!/j!) sum over compositions (n_1..n_j) of n of prod (1-alpha)_{n_i-1}/n_i!
inline mpq_class bell_stirling(int n, int j, const mpq_class& alpha) {
  mpq_class sum = 0;
  for (const auto& parts : brute_compositions(n, j)) {
    mpq_class term = 1;
    for (int p : parts) term *= q_rising(1 - alpha, p - 1) / mpq_class(z_fact(p));
    sum += term;
  }
  mpq_class out = sum * mpq_class(z_fact(n)) / mpq_class(z_fact(j));
  out.canonicalize();
  return out;
}

/// Gaussian elimination over Q; throws if singular.
inline std::vector<mpq_class> solve_exact(std::vector<std::vector<mpq_class>> a, std::vector<mpq_class> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && a[pivot][col] == 0) ++pivot;
    if (pivot == n) throw std::runtime_error("singular system");
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (std::size_t row = 0; row < n; ++row) {
      if (row == col || a[row][col] == 0) continue;
      const mpq_class f = a[row][col] / a[col][col];
      for (std::size_t k = col; k < n; ++k) a[row][k] -= f * a[col][k];
      b[row] -= f * b[col];
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    b[i] /= a[i][i];
    b[i].canonicalize();
  }
  return b;
}

/// Connection coefficients of (x)_n in the basis (x+gamma)_{k, step alpha},
/// k = 0..n, by solving the identity at x = 0..n (plus an offset that keeps
/// the nodes distinct from any basis root pattern).
inline std::vector<mpq_class> connection_by_solve(int n, const mpq_class& alpha, const mpq_class& gamma) {
  std::vector<std::vector<mpq_class>> a;
  std::vector<mpq_class> b;
  for (int i = 0; i <= n; ++i) {
    const mpq_class x = mpq_class(i) + mpq_class(1, 7);
    std::vector<mpq_class> row;
    for (int k = 0; k <= n; ++k) row.push_back(q_rising(x + gamma, k, alpha));
    a.push_back(row);
    b.push_back(q_rising(x, n));
  }
  return solve_exact(a, b);
}

/// Coefficients of x^k in x(x+1)...(x+n-1), by polynomial multiplication.
inline std::vector<mpz_class> rising_poly_coefficients(int n) {
  std::vector<mpz_class> poly{1};
  for (int i = 0; i < n; ++i) {
    std::vector<mpz_class> next(poly.size() + 1, 0);
    for (std::size_t k = 0; k < poly.size(); ++k) {
      next[k + 1] += poly[k];
      next[k] += poly[k] * i;
    }
    poly = next;
  }
  return poly;
}

}  // namespace lookback::testing
