#include "lookback/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>

#include "lookback/combinatorics.hpp"

namespace lookback {

int ContinuationOutcome::reobserved_exactly(int l) const {
  return static_cast<int>(std::count(old_counts.begin(), old_counts.end(), l));
}

int ContinuationOutcome::reobserved() const {
  return static_cast<int>(std::count_if(old_counts.begin(), old_counts.end(), [](int c) { return c > 0; }));
}

int ContinuationOutcome::statistic(Target target, int l) const {
  return target == Target::ExactlyL ? reobserved_exactly(l) : reobserved();
}

namespace {

struct EnumerationState {
  const GibbsPrior& prior;
  int j;
  int m;
  std::vector<int> sizes;  // old blocks first, then new blocks
  std::vector<int> allocation;
  std::vector<ContinuationOutcome>* out;
};

void extend(EnumerationState& st, int total, const ExactScalar& weight) {
  const int depth = static_cast<int>(st.allocation.size());
  const int blocks = static_cast<int>(st.sizes.size());
  if (depth == st.m) {
    ContinuationOutcome outcome;
    outcome.allocation = st.allocation;
    outcome.old_counts.assign(static_cast<std::size_t>(st.j), 0);
    for (int b : st.allocation)
      if (b < st.j) ++outcome.old_counts[b];
    outcome.new_species = blocks - st.j;
    outcome.weight = weight;
    st.out->push_back(std::move(outcome));
    return;
  }
  const ExactScalar v_now = st.prior.weight(total, blocks);
  const ExactScalar join_ratio = st.prior.weight(total + 1, blocks) / v_now;
  const ExactScalar new_ratio = st.prior.weight(total + 1, blocks + 1) / v_now;
  const ExactScalar& alpha = st.prior.alpha().value();

  for (int b = 0; b < blocks; ++b) {
    const ExactScalar step = (ExactScalar(st.sizes[b]) - alpha) * join_ratio;
    if (step.is_zero()) continue;
    ++st.sizes[b];
    st.allocation.push_back(b);
    extend(st, total + 1, weight * step);
    st.allocation.pop_back();
    --st.sizes[b];
  }
  if (!new_ratio.is_zero()) {
    st.sizes.push_back(1);
    st.allocation.push_back(blocks);
    extend(st, total + 1, weight * new_ratio);
    st.allocation.pop_back();
    st.sizes.pop_back();
  }
}

void check_guard(int j, int m, std::uint64_t guard) {
  long double count = std::pow(static_cast<long double>(j + m), m);
  if (count > static_cast<long double>(guard))
    throw std::length_error("enumeration of (" + std::to_string(j) + "+" + std::to_string(m) + ")^" +
                            std::to_string(m) + " sequences exceeds the guard of " + std::to_string(guard));
}

std::uint64_t falling_u64(int x, int r) {
  std::uint64_t out = 1;
  for (int i = 0; i < r; ++i) {
    if (x - i <= 0) return 0;
    out *= static_cast<std::uint64_t>(x - i);
  }
  return out;
}

}  // namespace

std::vector<ContinuationOutcome> enumerate_continuations(const GibbsPrior& prior,
                                                         std::span<const int> multiplicities, int m,
                                                         std::uint64_t guard) {
  if (multiplicities.empty()) throw std::invalid_argument("need at least one observed species");
  for (int size : multiplicities)
    if (size < 1) throw std::invalid_argument("multiplicities must be >= 1");
  if (m < 0) throw std::invalid_argument("m must be >= 0");
  const int j = static_cast<int>(multiplicities.size());
  check_guard(j, m, guard);
  const int n = std::accumulate(multiplicities.begin(), multiplicities.end(), 0);
  if (prior.weight(n, j).is_zero())
    throw std::domain_error("observed sample has zero probability under " + prior.describe());

  std::vector<ContinuationOutcome> outcomes;
  EnumerationState st{prior, j, m, {multiplicities.begin(), multiplicities.end()}, {}, &outcomes};
  extend(st, n, ExactScalar(1).to_mode(prior.mode()));
  return outcomes;
}

ExactScalar oracle_moment(std::span<const ContinuationOutcome> outcomes, Target target, int l, int r) {
  if (outcomes.empty()) throw std::invalid_argument("no outcomes");
  ExactScalar sum = ExactScalar(0).to_mode(outcomes.front().weight.mode());
  for (const auto& outcome : outcomes) {
    const ExactScalar factor = falling_factorial(ExactScalar(outcome.statistic(target, l)), static_cast<unsigned>(r));
    if (!factor.is_zero()) sum += outcome.weight * factor;
  }
  return sum;
}

ExactScalar oracle_incomplete_moment(const GibbsPrior& prior, int n, int j, int m, Target target, int l, int r,
                                     std::uint64_t guard) {
  if (j < 1 || j > n) throw std::invalid_argument("need 1 <= j <= n");
  if (r < 0 || r > j) throw std::invalid_argument("need 0 <= r <= j");
  check_guard(j, m, guard);
  const ExactScalar one_minus_alpha = ExactScalar(1) - prior.alpha().value();
  ExactScalar total_weight = ExactScalar(0).to_mode(prior.mode());
  ExactScalar weighted = ExactScalar(0).to_mode(prior.mode());
  for_each_composition(n, j, [&](std::span<const int> parts) {
    // Multivariate Gibbs weight without V_{n,j}, which cancels in the ratio.
    mpz_class denom = factorial(static_cast<unsigned>(j));
    ExactScalar w = ExactScalar(1).to_mode(prior.mode());
    for (int p : parts) {
      denom *= factorial(static_cast<unsigned>(p));
      w *= rising_factorial(one_minus_alpha, static_cast<unsigned>(p - 1));
    }
    w *= ExactScalar(mpq_class(factorial(static_cast<unsigned>(n)), denom));
    const auto outcomes = enumerate_continuations(prior, parts, m, guard);
    weighted += w * oracle_moment(outcomes, target, l, r);
    total_weight += w;
  });
  return weighted / total_weight;
}

SplitMix64::result_type SplitMix64::operator()() {
  state_ += 0x9E3779B97F4A7C15ULL;
  return mix(state_);
}

std::uint64_t SplitMix64::mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

SplitMix64 SplitMix64::substream(std::uint64_t master_seed, std::uint64_t index) {
  return SplitMix64(mix(master_seed) ^ mix(index + 0x632BE59BD9B4E019ULL));
}

McSummary::McSummary(int j, int m, std::uint64_t count, std::uint64_t seed)
    : j_(j), m_(m), count_(count), seed_(seed) {
  const std::size_t cells = static_cast<std::size_t>(m + 2) * static_cast<std::size_t>(j + 1);
  sums_.assign(cells, 0);
  squares_.assign(cells, 0);
}

std::size_t McSummary::slot(int statistic, int r) const {
  return static_cast<std::size_t>(statistic) * static_cast<std::size_t>(j_ + 1) + static_cast<std::size_t>(r);
}

void McSummary::record(std::span<const int> old_counts) {
  std::vector<int> values(static_cast<std::size_t>(m_ + 2), 0);
  for (int c : old_counts) {
    ++values[c];
    if (c > 0) ++values[m_ + 1];
  }
  for (int stat = 0; stat < m_ + 2; ++stat)
    for (int r = 0; r <= j_; ++r) {
      const unsigned __int128 value = falling_u64(values[stat], r);
      sums_[slot(stat, r)] += value;
      squares_[slot(stat, r)] += value * value;
    }
  ++recorded_;
}

void McSummary::merge(const McSummary& other) {
  if (other.j_ != j_ || other.m_ != m_) throw std::invalid_argument("merging incompatible MC summaries");
  for (std::size_t i = 0; i < sums_.size(); ++i) {
    sums_[i] += other.sums_[i];
    squares_[i] += other.squares_[i];
  }
  recorded_ += other.recorded_;
}

McEstimate McSummary::estimate(Target target, int l, int r) const {
  if (r < 0 || r > j_) throw std::invalid_argument("MC moment order must be in [0, j]");
  if (target == Target::ExactlyL && (l < 0 || l > m_)) throw std::invalid_argument("need 0 <= l <= m");
  const int stat = target == Target::ExactlyL ? l : m_ + 1;
  const auto sum = static_cast<long double>(sums_[slot(stat, r)]);
  const auto sq = static_cast<long double>(squares_[slot(stat, r)]);
  const auto count = static_cast<long double>(recorded_);
  McEstimate out;
  out.count = recorded_;
  out.seed = seed_;
  if (recorded_ == 0) return out;
  out.estimate = static_cast<double>(sum / count);
  if (recorded_ > 1) {
    const long double var = std::max<long double>(0.0L, (sq - sum * sum / count) / (count - 1));
    out.standard_error = static_cast<double>(std::sqrt(var / count));
  }
  return out;
}

McSummary mc_sample(const GibbsPrior& prior, std::span<const int> multiplicities, int m, std::uint64_t count,
                    std::uint64_t seed, unsigned workers) {
  if (count < 1) throw std::invalid_argument("MC sample count must be >= 1");
  if (m < 0) throw std::invalid_argument("m must be >= 0");
  if (multiplicities.empty()) throw std::invalid_argument("need at least one observed species");
  for (int size : multiplicities)
    if (size < 1) throw std::invalid_argument("multiplicities must be >= 1");
  const int j = static_cast<int>(multiplicities.size());
  const int n = std::accumulate(multiplicities.begin(), multiplicities.end(), 0);
  if (prior.weight(n, j).is_zero())
    throw std::domain_error("observed sample has zero probability under " + prior.describe());

  // p_new[t][k] = V_{n+t+1, j+k+1} / V_{n+t, j+k}
  std::vector<std::vector<double>> p_new(static_cast<std::size_t>(m));
  for (int t = 0; t < m; ++t)
    for (int k = 0; k <= t; ++k) {
      const ExactScalar v = prior.weight(n + t, j + k);
      p_new[t].push_back(v.is_zero() ? 0.0 : (prior.weight(n + t + 1, j + k + 1) / v).to_double());
    }
  const double alpha = prior.alpha().value().to_double();

  auto run_range = [&](std::uint64_t begin, std::uint64_t end) {
    McSummary part(j, m, count, seed);
    std::vector<int> sizes;
    std::vector<int> old_counts(static_cast<std::size_t>(j));
    for (std::uint64_t i = begin; i < end; ++i) {
      SplitMix64 rng = SplitMix64::substream(seed, i);
      sizes.assign(multiplicities.begin(), multiplicities.end());
      std::fill(old_counts.begin(), old_counts.end(), 0);
      for (int t = 0; t < m; ++t) {
        const int k = static_cast<int>(sizes.size()) - j;
        const double u = rng.uniform();
        const double pn = p_new[t][k];
        if (u < pn) {
          sizes.push_back(1);
          continue;
        }
        // Join an existing block with probability proportional to size - alpha.
        const double mass = static_cast<double>(n + t) - static_cast<double>(sizes.size()) * alpha;
        double target = (u - pn) / (1.0 - pn) * mass;
        std::size_t b = 0;
        for (; b + 1 < sizes.size(); ++b) {
          target -= static_cast<double>(sizes[b]) - alpha;
          if (target < 0) break;
        }
        ++sizes[b];
        if (static_cast<int>(b) < j) ++old_counts[b];
      }
      part.record(old_counts);
    }
    return part;
  };

  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::min<std::uint64_t>(count, 256))));
  if (workers == 1) return run_range(0, count);

  std::vector<McSummary> parts(workers, McSummary(j, m, count, seed));
  {
    std::vector<std::jthread> threads;
    const std::uint64_t chunk = (count + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::uint64_t begin = std::min<std::uint64_t>(count, w * chunk);
      const std::uint64_t end = std::min<std::uint64_t>(count, begin + chunk);
      threads.emplace_back([&, w, begin, end] { parts[w] = run_range(begin, end); });
    }
  }
  McSummary total(j, m, count, seed);
  for (const auto& part : parts) total.merge(part);
  return total;
}

}  // namespace lookback
