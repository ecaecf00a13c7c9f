// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <thread>

#include "lookback/estimators.hpp"
#include "lookback/gibbslaws.hpp"
#include "lookback/oracle.hpp"
#include "lookback/stirling.hpp"
#include "lookback/verify.hpp"
#include "support/oracles.hpp"

using namespace lookback;
namespace oracle = lookback::testing;

namespace {

ExactScalar q(const char* text) { return ExactScalar::parse(text); }

const std::vector<const char*> kAlphas = {"-1", "-1/2", "0", "1/3", "1/2", "3/4"};
const std::vector<const char*> kGammas = {"0", "1", "3/2"};

struct Outcome {
  std::size_t points = 0;
  std::size_t failures = 0;
  std::string first_failure;
  std::string note;

  void expect(bool ok, const std::function<std::string()>& where) {
    ++points;
    if (!ok && failures++ == 0) first_failure = where();
  }
};

bool feasible(const GibbsPrior& prior, int j) { return !prior.species_cap() || j <= *prior.species_cap(); }

std::string label(const GibbsPrior& prior, int n, int j, int m, int l, int r, const std::vector<int>* mult = nullptr) {
  std::ostringstream os;
  os << prior.describe() << " n=" << n << " j=" << j << " m=" << m << " l=" << l << " r=" << r;
  if (mult) {
    os << " mult=";
    for (std::size_t i = 0; i < mult->size(); ++i) os << (i ? "," : "") << (*mult)[i];
  }
  return os.str();
}

// Runs `body` over the estimator grid: reference priors, n <= n_max, all
// feasible j, m <= 3, l <= m, r <= min(j, 3) with r l <= m.
void for_grid(int n_max, const std::function<void(const GibbsPrior&, int, int, int, int, int)>& body) {
  for (const auto& prior : reference_priors())
    for (int n = 1; n <= n_max; ++n)
      for (int j = 1; j <= n; ++j) {
        if (!feasible(prior, j)) continue;
        for (int m = 0; m <= 3; ++m)
          for (int l = 0; l <= m; ++l)
            for (int r = 0; r <= std::min(j, 3) && r * l <= m; ++r) body(prior, n, j, m, l, r);
      }
}

Outcome stirling_connection() {
  Outcome out;
  for (const char* a : kAlphas)
    for (const char* g : kGammas) {
      const mpq_class alpha = q(a).rational(), gamma = q(g).rational();
      const auto tri = StirlingTriangle::build(Alpha::parse(a), q(g), 8);
      for (int n = 0; n <= 8; ++n)
        for (int i = 0; i <= n; ++i) {
          const mpq_class x = mpq_class(i) + mpq_class(1, 3);
          mpq_class rhs = 0;
          for (int k = 0; k <= n; ++k) rhs += tri.at(n, k).rational() * oracle::q_rising(x + gamma, k, alpha);
          out.expect(rhs == oracle::q_rising(x, n), [&] {
            return std::string("alpha=") + a + " gamma=" + g + " n=" + std::to_string(n) + " x=" + x.get_str();
          });
        }
    }
  return out;
}

Outcome bell_oracle() {
  Outcome out;
  for (const char* a : kAlphas) {
    const auto tri = StirlingTriangle::build(Alpha::parse(a), q("0"), 7);
    for (int n = 1; n <= 7; ++n)
      for (int j = 1; j <= n; ++j)
        out.expect(tri.at(n, j).rational() == oracle::bell_stirling(n, j, q(a).rational()), [&] {
          return std::string("alpha=") + a + " n=" + std::to_string(n) + " j=" + std::to_string(j);
        });
  }
  return out;
}

Outcome normalization() {
  Outcome out;
  for (const auto& prior : reference_priors()) {
    const auto tri = StirlingTriangle::build(prior.alpha(), q("0"), 10);
    for (int n = 1; n <= 10; ++n) {
      ExactScalar total = 0;
      for (int j = 1; j <= n; ++j) total += prior.weight(n, j) * tri.at(n, j);
      out.expect(total == q("1"), [&] { return prior.describe() + " n=" + std::to_string(n) + ": " + total.to_string(); });
    }
  }
  return out;
}

Outcome tower() {
  Outcome out;
  for_grid(6, [&](const GibbsPrior& prior, int n, int j, int m, int l, int r) {
    ExactScalar avg = 0;
    for (const auto& c : oracle::brute_compositions(n, j))
      avg += conditional_multiplicity_pmf(prior.alpha(), n, j, c) * complete_info_moment(prior, c, m, l, r);
    out.expect(incomplete_info_moment(prior, n, j, m, l, r) == avg, [&] { return label(prior, n, j, m, l, r); });
  });
  out.note = "impossible samples (j above a Fisher prior's species cap) skipped";
  return out;
}

Outcome oracle_equivalence() {
  Outcome out;
  for_grid(6, [&](const GibbsPrior& prior, int n, int j, int m, int l, int r) {
    if (n + m > 8) return;
    for (const auto& c : oracle::brute_compositions(n, j)) {
      const auto outcomes = enumerate_continuations(prior, c, m);
      out.expect(complete_info_moment(prior, c, m, l, r) == oracle_moment(outcomes, Target::ExactlyL, l, r),
                 [&] { return "complete " + label(prior, n, j, m, l, r, &c); });
    }
    out.expect(incomplete_info_moment(prior, n, j, m, l, r) ==
                   oracle_incomplete_moment(prior, n, j, m, Target::ExactlyL, l, r),
               [&] { return "incomplete " + label(prior, n, j, m, l, r); });
  });
  return out;
}

Outcome recombination() {
  Outcome out;
  for_grid(6, [&](const GibbsPrior& prior, int n, int j, int m, int l, int r) {
    if (l != 0) return;
    const auto incomplete = SampleSummary::incomplete(n, j);
    const ExactScalar rm = r_m_moment(prior, incomplete, m, r);
    if (r == 1)
      out.expect(rm == ExactScalar(j) - incomplete_info_moment(prior, n, j, m, 0, 1),
                 [&] { return "complement " + label(prior, n, j, m, 0, r); });
    if (n + m > 8) return;
    out.expect(rm == oracle_incomplete_moment(prior, n, j, m, Target::AtLeastOnce, 0, r),
               [&] { return "incomplete " + label(prior, n, j, m, 0, r); });
    for (const auto& c : oracle::brute_compositions(n, j)) {
      const auto outcomes = enumerate_continuations(prior, c, m);
      out.expect(r_m_moment(prior, SampleSummary::complete(c), m, r) == oracle_moment(outcomes, Target::AtLeastOnce, 0, r),
                 [&] { return "complete " + label(prior, n, j, m, 0, r, &c); });
    }
  });
  return out;
}

Outcome conservation() {
  Outcome out;
  for (const auto& prior : reference_priors())
    for (int n = 1; n <= 6; ++n)
      for (int j = 1; j <= n; ++j) {
        if (!feasible(prior, j)) continue;
        const auto comps = oracle::brute_compositions(n, j);
        for (int m = 0; m <= 3; ++m) {
          ExactScalar total = 0;
          for (int l = 0; l <= m; ++l) total += incomplete_info_moment(prior, n, j, m, l, 1);
          out.expect(total == ExactScalar(j), [&] { return "incomplete " + label(prior, n, j, m, -1, 1); });
          for (const auto& c : comps) {
            ExactScalar t = 0;
            for (int l = 0; l <= m; ++l) t += complete_info_moment(prior, c, m, l, 1);
            out.expect(t == ExactScalar(j), [&] { return "complete " + label(prior, n, j, m, -1, 1, &c); });
          }
        }
      }
  return out;
}

Outcome alpha_zero_limit() {
  Outcome out;
  auto close = [](const ExactScalar& got, const ExactScalar& want) {
    const ExactScalar diff = (got - want).abs();
    return diff <= ExactScalar(mpq_class(1, 10000)) * want.abs();
  };
  for (const char* theta : {"1", "5"}) {
    const auto dir = dirichlet(q(theta));
    const auto py = pitman_yor(Alpha::parse("1/1000000"), q(theta));
    for (int n = 1; n <= 6; ++n)
      for (int j = 1; j <= n; ++j) {
        const auto comps = oracle::brute_compositions(n, j);
        const auto data = SampleSummary::incomplete(n, j);
        for (int m = 0; m <= 3; ++m)
          for (int r = 0; r <= std::min(j, 3); ++r) {
            for (int l = 0; l <= m && r * l <= m; ++l) {
              out.expect(close(incomplete_info_moment(py, n, j, m, l, r), incomplete_info_moment(dir, n, j, m, l, r)),
                         [&] { return "incomplete " + label(dir, n, j, m, l, r); });
              for (const auto& c : comps)
                out.expect(close(complete_info_moment(py, c, m, l, r), complete_info_moment(dir, c, m, l, r)),
                           [&] { return "complete " + label(dir, n, j, m, l, r, &c); });
            }
            out.expect(close(r_m_moment(py, data, m, r), r_m_moment(dir, data, m, r)),
                       [&] { return "R_m " + label(dir, n, j, m, 0, r); });
          }
      }
  }
  out.note = "relative error computed exactly";
  return out;
}

Outcome monte_carlo() {
  Outcome out;
  const std::uint64_t count = 100000, seed = 20240917;
  const unsigned workers = std::max(2u, std::min(8u, std::thread::hardware_concurrency()));
  const std::vector<std::pair<std::vector<int>, int>> settings = {{{2, 1}, 2}, {{1, 1, 1}, 3}, {{3}, 2}, {{2, 2}, 1}};
  std::size_t inside = 0;
  bool reproducible = true;
  for (const auto& prior : reference_priors())
    for (const auto& [mult, m] : settings) {
      const auto summary = mc_sample(prior, mult, m, count, seed, workers);
      reproducible = reproducible && summary == mc_sample(prior, mult, m, count, seed, workers) &&
                     summary == mc_sample(prior, mult, m, count, seed, 1);
      const auto est = summary.estimate(Target::ExactlyL, 0, 1);
      const double exact = oracle_moment(enumerate_continuations(prior, mult, m), Target::ExactlyL, 0, 1).to_double();
      ++out.points;
      if (std::fabs(est.estimate - exact) <= 4 * est.standard_error)
        ++inside;
      else if (out.first_failure.empty())
        out.first_failure = prior.describe() + ": MC " + std::to_string(est.estimate) + " vs " + std::to_string(exact);
    }
  out.note = std::to_string(inside) + "/" + std::to_string(out.points) + " within 4 SE, reruns " +
             (reproducible ? "bit-identical" : "DIFFER");
  if (inside * 20 < out.points * 19 || !reproducible) out.failures = out.points - inside + (reproducible ? 0 : 1);
  return out;
}

Outcome micro_example() {
  Outcome out;
  const auto py = pitman_yor(Alpha::parse("1/2"), q("1"));
  const auto data = SampleSummary::incomplete(2, 1);
  const std::vector<int> mult{2};
  const auto outcomes = enumerate_continuations(py, mult, 1);
  const ExactScalar half = q("1/2");
  out.expect(incomplete_info_moment(py, 2, 1, 1, 0, 1) == half, [] { return "E[R_{0,1}]"; });
  out.expect(r_m_moment(py, data, 1, 1) == half, [] { return "E[R_1]"; });
  out.expect(incomplete_info_moment(py, 2, 1, 1, 1, 1) == half, [] { return "E[R_{1,1}]"; });
  out.expect(oracle_moment(outcomes, Target::ExactlyL, 0, 1) == half, [] { return "oracle E[R_{0,1}]"; });
  out.expect(oracle_moment(outcomes, Target::AtLeastOnce, 0, 1) == half, [] { return "oracle E[R_1]"; });
  out.expect(oracle_moment(outcomes, Target::ExactlyL, 1, 1) == half, [] { return "oracle E[R_{1,1}]"; });
  // Predictive ratio for a new species: (theta + j alpha) / (theta + n).
  out.expect(py.weight(3, 2) / py.weight(2, 1) == half, [] { return "predictive ratio"; });
  const auto report = backward_report(BackwardQuery{py, data, 1, 0, 1, Target::ExactlyL});
  out.expect(report.pmf && report.pmf->size() == 2 && (*report.pmf)[0] == half && (*report.pmf)[1] == half,
             [] { return "pmf of R_{0,1}"; });
  return out;
}

struct Criterion {
  int id;
  const char* name;
  double limit_seconds;  // 0: no runtime limit
  Outcome (*run)();
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "Stirling connection identity", 5, stirling_connection},
      {2, "Stirling composition-sum oracle", 10, bell_oracle},
      {3, "law of K_n normalization", 5, normalization},
      {4, "tower property", 120, tower},
      {5, "closed forms vs enumeration", 300, oracle_equivalence},
      {6, "R_m through recombination", 0, recombination},
      {7, "conservation of old species", 0, conservation},
      {8, "alpha -> 0 limit", 0, alpha_zero_limit},
      {9, "Monte Carlo gate", 60, monte_carlo},
      {10, "worked micro-example", 0, micro_example},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome = c.run();
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool too_slow = c.limit_seconds > 0 && seconds > c.limit_seconds;
    const bool pass = outcome.failures == 0 && outcome.points > 0 && !too_slow;
    if (!pass) ++failed;
    std::printf("%s  %2d  %-34s points=%-6zu failures=%-4zu %.2fs", pass ? "PASS" : "FAIL", c.id, c.name,
                outcome.points, outcome.failures, seconds);
    if (c.limit_seconds > 0) std::printf(" (limit %.0fs)", c.limit_seconds);
    if (!outcome.note.empty()) std::printf("  [%s]", outcome.note.c_str());
    std::printf("\n");
    if (!outcome.first_failure.empty()) std::printf("          first failure: %s\n", outcome.first_failure.c_str());
    if (too_slow) std::printf("          runtime limit exceeded\n");
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
