#include "lookback/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "lookback/combinatorics.hpp"
#include "lookback/estimators.hpp"
#include "lookback/gibbslaws.hpp"
#include "lookback/oracle.hpp"

namespace lookback {

namespace {

constexpr int kMaxEnumerated = 8;  // n + m

std::string point_label(int n, int j, int m, int l, int r, const std::vector<int>* mult = nullptr) {
  std::string out = "n=" + std::to_string(n) + " j=" + std::to_string(j) + " m=" + std::to_string(m) +
                    " l=" + std::to_string(l) + " r=" + std::to_string(r);
  if (mult) {
    out += " mult=";
    for (std::size_t i = 0; i < mult->size(); ++i) out += (i ? "," : "") + std::to_string((*mult)[i]);
  }
  return out;
}

class Tally {
 public:
  VerificationRow& row(const std::string& check, const std::string& prior) {
    for (auto& r : rows_)
      if (r.check == check && r.prior == prior) return r;
    rows_.push_back({check, prior, 0, 0, {}});
    return rows_.back();
  }
  void expect_equal(const std::string& check, const std::string& prior, const ExactScalar& got,
                    const ExactScalar& want, const std::string& where) {
    auto& r = row(check, prior);
    ++r.points;
    if (got != want) {
      if (r.failures++ == 0) r.first_failure = where + ": got " + got.to_string() + ", want " + want.to_string();
    }
  }
  std::vector<VerificationRow> take() { return std::move(rows_); }

 private:
  std::vector<VerificationRow> rows_;
};

std::vector<std::vector<int>> compositions(int n, int j) {
  std::vector<std::vector<int>> out;
  for_each_composition(n, j, [&](std::span<const int> p) { out.emplace_back(p.begin(), p.end()); });
  return out;
}

}  // namespace

GridSize parse_grid(std::string_view text) {
  if (text == "small") return GridSize::Small;
  if (text == "full") return GridSize::Full;
  throw std::invalid_argument("unknown grid '" + std::string(text) + "' (expected small|full)");
}

std::vector<GibbsPrior> reference_priors() {
  return {
      pitman_yor(Alpha::parse("1/2"), ExactScalar::parse("1")),
      pitman_yor(Alpha::parse("1/3"), ExactScalar::parse("2")),
      pitman_yor(Alpha::parse("-1/2"), ExactScalar::parse("5/2")),
      dirichlet(ExactScalar::parse("1")),
      dirichlet(ExactScalar::parse("5")),
  };
}

bool VerificationResult::all_passed() const {
  return std::all_of(rows.begin(), rows.end(), [](const VerificationRow& r) { return r.passed(); });
}

VerificationResult run_verification(GridSize grid, std::uint64_t seed, std::uint64_t mc_count) {
  const int n_max = grid == GridSize::Small ? 4 : 6;
  const int m_max = grid == GridSize::Small ? 2 : 3;
  Tally tally;

  for (const GibbsPrior& prior : reference_priors()) {
    const std::string name = prior.describe();
    for (int n = 1; n <= n_max; ++n)
      for (int j = 1; j <= n; ++j) {
        if (prior.species_cap() && j > *prior.species_cap()) continue;
        const auto comps = compositions(n, j);
        std::vector<ExactScalar> comp_prob;
        for (const auto& c : comps) comp_prob.push_back(conditional_multiplicity_pmf(prior.alpha(), n, j, c));

        for (int m = 0; m <= m_max; ++m) {
          const bool enumerate = n + m <= kMaxEnumerated;
          std::vector<std::vector<ContinuationOutcome>> outcomes;
          if (enumerate)
            for (const auto& c : comps) outcomes.push_back(enumerate_continuations(prior, c, m));
          const auto data = SampleSummary::incomplete(n, j);

          for (int r = 0; r <= std::min(j, 3); ++r) {
            ExactScalar conservation = ExactScalar(0);
            for (int l = 0; l <= m; ++l) {
              if (r * l > m) continue;
              const ExactScalar incomplete = incomplete_info_moment(prior, n, j, m, l, r);
              if (r == 1) conservation += incomplete;
              ExactScalar tower = ExactScalar(0);
              for (std::size_t c = 0; c < comps.size(); ++c) {
                const ExactScalar complete = complete_info_moment(prior, comps[c], m, l, r);
                tower += comp_prob[c] * complete;
                if (enumerate)
                  tally.expect_equal("oracle_complete", name, complete,
                                     oracle_moment(outcomes[c], Target::ExactlyL, l, r),
                                     point_label(n, j, m, l, r, &comps[c]));
              }
              tally.expect_equal("tower", name, incomplete, tower, point_label(n, j, m, l, r));
              if (enumerate)
                tally.expect_equal("oracle_incomplete", name, incomplete,
                                   oracle_incomplete_moment(prior, n, j, m, Target::ExactlyL, l, r),
                                   point_label(n, j, m, l, r));
            }
            if (r == 1) tally.expect_equal("conservation", name, conservation, ExactScalar(j), point_label(n, j, m, -1, r));
            if (enumerate) {
              tally.expect_equal("recombination", name, r_m_moment(prior, data, m, r),
                                 oracle_incomplete_moment(prior, n, j, m, Target::AtLeastOnce, 0, r),
                                 point_label(n, j, m, 0, r));
              for (std::size_t c = 0; c < comps.size(); ++c)
                tally.expect_equal("recombination", name, r_m_moment(prior, SampleSummary::complete(comps[c]), m, r),
                                   oracle_moment(outcomes[c], Target::AtLeastOnce, 0, r),
                                   point_label(n, j, m, 0, r, &comps[c]));
            }
          }
        }
      }
  }

  // Monte Carlo: four continuation settings per prior.
  const std::vector<std::pair<std::vector<int>, int>> settings = {
      {{2, 1}, 2}, {{1, 1, 1}, 3}, {{3}, 2}, {{2, 2}, 1}};
  VerificationRow mc{"monte_carlo_4se", "all", 0, 0, {}};
  std::size_t outside = 0;
  for (const GibbsPrior& prior : reference_priors())
    for (const auto& [mult, m] : settings) {
      const auto summary = mc_sample(prior, mult, m, mc_count, seed, 4);
      const auto outcomes = enumerate_continuations(prior, mult, m);
      for (Target target : {Target::ExactlyL, Target::AtLeastOnce}) {
        const auto est = summary.estimate(target, 0, 1);
        const double exact = oracle_moment(outcomes, target, 0, 1).to_double();
        ++mc.points;
        if (std::fabs(est.estimate - exact) > 4.0 * est.standard_error) {
          if (outside++ == 0)
            mc.first_failure = prior.describe() + " " + std::string(target_name(target)) + ": MC " +
                               std::to_string(est.estimate) + " vs " + std::to_string(exact);
        }
      }
    }
  mc.failures = outside * 20 > mc.points ? outside : 0;

  VerificationResult result{tally.take()};
  result.rows.push_back(mc);
  return result;
}

}  // namespace lookback
