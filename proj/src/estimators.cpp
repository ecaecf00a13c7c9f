#include "lookback/estimators.hpp"

#include <numeric>
#include <stdexcept>
#include <string>

#include "lookback/combinatorics.hpp"
#include "lookback/stirling.hpp"

namespace lookback {

namespace {

void check_query(int n, int j, int m, int l, int r) {
  if (n < 1 || j < 1 || j > n)
    throw std::invalid_argument("need 1 <= j <= n, got n=" + std::to_string(n) + ", j=" + std::to_string(j));
  if (m < 0) throw std::invalid_argument("additional sample size m must be >= 0");
  if (l < 0 || l > m)
    throw std::invalid_argument("need 0 <= l <= m, got l=" + std::to_string(l) + ", m=" + std::to_string(m));
  if (r < 0 || r > j)
    throw std::invalid_argument("need 0 <= r <= j, got r=" + std::to_string(r) + ", j=" + std::to_string(j));
  if (r * l > m)
    throw std::invalid_argument("need r*l <= m, got r=" + std::to_string(r) + ", l=" + std::to_string(l) +
                                ", m=" + std::to_string(m));
}

// r! m! / ((l!)^r (m-rl)!)
ExactScalar placement_factor(int m, int l, int r) {
  mpz_class denom = factorial(static_cast<unsigned>(m - r * l));
  mpz_class lfact = factorial(static_cast<unsigned>(l));
  for (int i = 0; i < r; ++i) denom *= lfact;
  return ExactScalar(mpq_class(factorial(static_cast<unsigned>(r)) * factorial(static_cast<unsigned>(m)), denom));
}

const char* kKernelConvention =
    "S(q,k) defined by (x)_q = sum_k S(q,k) (x+gamma)_{k, step alpha}; kernel gamma = -(n - s - (j-r) alpha)";

}  // namespace

std::string_view target_name(Target target) { return target == Target::ExactlyL ? "rl" : "rm"; }

Target parse_target(std::string_view text) {
  if (text == "rl") return Target::ExactlyL;
  if (text == "rm") return Target::AtLeastOnce;
  throw std::invalid_argument("unknown target '" + std::string(text) + "' (expected rl|rm)");
}

ExactScalar kernel_shift(const Alpha& alpha, int n, int j, int r, int s) {
  return -(ExactScalar(n - s) - ExactScalar(j - r) * alpha.value());
}

ExactScalar g_kernel(const GibbsPrior& prior, int n, int j, int m, int r, int l, int s) {
  check_query(n, j, m, l, r);
  if (s < r || s > n - (j - r))
    throw std::invalid_argument("kernel argument s=" + std::to_string(s) + " outside [r, n-(j-r)]");
  const ExactScalar v_nj = prior.weight(n, j);
  if (v_nj.is_zero())
    throw std::domain_error("observed sample (n=" + std::to_string(n) + ", j=" + std::to_string(j) +
                            ") has zero probability under " + prior.describe());

  const int free_draws = m - r * l;
  const auto tri = TriangleCache::global().get(prior.alpha(), kernel_shift(prior.alpha(), n, j, r, s), free_draws);
  ExactScalar sum = ExactScalar(0).to_mode(prior.mode());
  for (int k = 0; k <= free_draws; ++k) {
    const ExactScalar v = prior.weight(n + m, j + k);
    if (v.is_zero()) continue;
    sum += v * tri->at(free_draws, k);
  }
  return sum / v_nj;
}

ExactScalar complete_info_moment(const GibbsPrior& prior, std::span<const int> multiplicities, int m, int l,
                                 int r) {
  for (int size : multiplicities)
    if (size < 1) throw std::invalid_argument("multiplicities must be >= 1");
  const int n = std::accumulate(multiplicities.begin(), multiplicities.end(), 0);
  const int j = static_cast<int>(multiplicities.size());
  check_query(n, j, m, l, r);

  const ExactScalar& alpha = prior.alpha().value();
  ExactScalar sum = ExactScalar(0).to_mode(prior.mode());
  for_each_combination(j, r, [&](std::span<const int> chosen) {
    ExactScalar term = ExactScalar(1).to_mode(prior.mode());
    int chosen_total = 0;
    for (int c : chosen) {
      term *= rising_factorial(ExactScalar(multiplicities[c]) - alpha, static_cast<unsigned>(l));
      chosen_total += multiplicities[c];
    }
    sum += term * g_kernel(prior, n, j, m, r, l, chosen_total);
  });
  return placement_factor(m, l, r) * sum;
}

ExactScalar incomplete_info_moment(const GibbsPrior& prior, int n, int j, int m, int l, int r) {
  check_query(n, j, m, l, r);
  const Alpha& alpha = prior.alpha();
  const auto base = central_triangle(alpha, n);
  const auto tilted = central_triangle(Alpha(alpha.value() - ExactScalar(l)), n);

  ExactScalar sum = ExactScalar(0).to_mode(prior.mode());
  for (int s = r; s <= n - (j - r); ++s) {
    const ExactScalar weight = ExactScalar(binomial(n, s)) * tilted->at(s, r) * base->at(n - s, j - r);
    if (weight.is_zero()) continue;
    sum += weight * g_kernel(prior, n, j, m, r, l, s);
  }
  const ExactScalar shift_factor =
      pow(rising_factorial(ExactScalar(1) - alpha.value(), static_cast<unsigned>(l)), static_cast<unsigned>(r));
  return placement_factor(m, l, r) * shift_factor * sum / base->at(n, j);
}

ExactScalar rl_moment(const GibbsPrior& prior, const SampleSummary& data, int m, int l, int r) {
  if (data.is_complete()) return complete_info_moment(prior, *data.multiplicities(), m, l, r);
  return incomplete_info_moment(prior, data.n(), data.j(), m, l, r);
}

ExactScalar r_m_moment(const GibbsPrior& prior, const SampleSummary& data, int m, int r) {
  check_query(data.n(), data.j(), m, 0, r);
  const RecombinationRow row = recombination_coefficients(r, data.j());
  ExactScalar sum = ExactScalar(0).to_mode(prior.mode());
  for (int v = 0; v <= r; ++v) sum += row.coeffs[v] * rl_moment(prior, data, m, 0, v);
  return sum;
}

MomentReport backward_report(const BackwardQuery& query) {
  const int j = query.data.j();
  const GibbsPrior& prior = query.prior;
  check_query(query.data.n(), j, query.m, query.l, 0);
  if (query.r_max < 0) throw std::invalid_argument("r_max must be >= 0");

  MomentReport report{query, {}, std::nullopt, prior.mode(),
                      prior.alpha().value() - ExactScalar(query.l).to_mode(prior.mode()), kKernelConvention};
  const ExactScalar zero = ExactScalar(0).to_mode(prior.mode());
  for (int r = 0; r <= query.r_max; ++r) {
    if (r > j) {
      report.moments.push_back(zero);
      continue;
    }
    if (query.target == Target::AtLeastOnce) {
      report.moments.push_back(r_m_moment(prior, query.data, query.m, r));
    } else if (r * query.l > query.m) {
      report.moments.push_back(zero);
    } else {
      report.moments.push_back(rl_moment(prior, query.data, query.m, query.l, r));
    }
  }
  if (query.r_max >= j) report.pmf = moments_to_pmf(report.moments, j);
  return report;
}

}  // namespace lookback
