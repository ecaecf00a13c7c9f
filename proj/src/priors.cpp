#include "lookback/priors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <mutex>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace lookback {

struct GibbsPrior::Memo {
  std::mutex mutex;
  std::map<std::pair<int, int>, ExactScalar> weights;
};

namespace {

std::string trim(std::string s) {
  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

int parse_int_field(const std::string& text, int line) {
  std::size_t used = 0;
  int value = 0;
  try {
    value = std::stoi(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size())
    throw std::invalid_argument("line " + std::to_string(line) + ": bad integer '" + text + "'");
  return value;
}

}  // namespace

std::string_view family_name(PriorFamily family) {
  switch (family) {
    case PriorFamily::PitmanYor: return "pitman_yor";
    case PriorFamily::Dirichlet: return "dirichlet";
    case PriorFamily::Table: return "table";
  }
  return "unknown";
}

WeightGrid read_weight_csv(std::istream& in) {
  WeightGrid grid;
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    if (!header_seen) {
      std::string compact;
      for (char c : line)
        if (!std::isspace(static_cast<unsigned char>(c))) compact += c;
      if (compact != "n,j,value")
        throw std::invalid_argument("weight table must start with header 'n,j,value'");
      header_seen = true;
      continue;
    }
    std::vector<std::string> fields;
    std::stringstream ss(line);
    for (std::string field; std::getline(ss, field, ',');) fields.push_back(trim(field));
    if (fields.size() != 3)
      throw std::invalid_argument("line " + std::to_string(line_no) + ": expected 3 fields");
    const int n = parse_int_field(fields[0], line_no);
    const int j = parse_int_field(fields[1], line_no);
    if (n < 1 || j < 1 || j > n)
      throw std::invalid_argument("line " + std::to_string(line_no) + ": need 1 <= j <= n");
    auto [it, inserted] = grid.values.emplace(std::pair{n, j}, ExactScalar::parse(fields[2]));
    if (!inserted)
      throw std::invalid_argument("line " + std::to_string(line_no) + ": duplicate entry (" +
                                  fields[0] + "," + fields[1] + ")");
    grid.n_max = std::max(grid.n_max, n);
  }
  if (!header_seen) throw std::invalid_argument("empty weight table");
  return grid;
}

WeightGrid read_weight_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open weight table '" + path + "'");
  return read_weight_csv(in);
}

void write_weight_csv(std::ostream& out, const GibbsPrior& prior, int n_max) {
  out << "n,j,value\n";
  for (int n = 1; n <= n_max; ++n)
    for (int j = 1; j <= n; ++j) out << n << ',' << j << ',' << prior.weight(n, j).to_string() << '\n';
}

GibbsPrior::GibbsPrior(PriorFamily family, Alpha alpha, std::optional<ExactScalar> theta)
    : family_(family),
      alpha_(std::move(alpha)),
      theta_(std::move(theta)),
      memo_(std::make_shared<Memo>()) {}

GibbsPrior GibbsPrior::pitman_yor(const Alpha& alpha, const ExactScalar& theta) {
  const NumericMode mode =
      (alpha.mode() == NumericMode::LogSigned || theta.mode() == NumericMode::LogSigned)
          ? NumericMode::LogSigned
          : NumericMode::Exact;
  GibbsPrior prior(PriorFamily::PitmanYor, alpha.to_mode(mode), theta.to_mode(mode));
  const ExactScalar& a = prior.alpha_.value();
  const ExactScalar& t = *prior.theta_;
  if (a.sign() >= 0) {
    if (!(t > -a))
      throw std::domain_error("Pitman-Yor needs theta > -alpha, got alpha=" + a.to_string() +
                              ", theta=" + t.to_string());
  } else {
    // Fisher line: theta = m |alpha| with m a positive integer.
    const ExactScalar ratio = t / a.abs();
    long species = 0;
    if (ratio.is_exact()) {
      const mpq_class& q = ratio.rational();
      if (q.get_den() != 1 || sgn(q) <= 0 || !q.get_num().fits_slong_p())
        throw std::domain_error("Pitman-Yor with alpha < 0 needs theta = m|alpha| for a positive integer m");
      species = q.get_num().get_si();
    } else {
      const double d = ratio.to_double();
      species = std::lround(d);
      if (species <= 0 || std::fabs(d - static_cast<double>(species)) > 1e-9 * std::max(1.0, d))
        throw std::domain_error("Pitman-Yor with alpha < 0 needs theta = m|alpha| for a positive integer m");
    }
    prior.species_cap_ = static_cast<int>(species);
  }
  return prior;
}

GibbsPrior GibbsPrior::dirichlet(const ExactScalar& theta) {
  if (theta.sign() <= 0) throw std::domain_error("Dirichlet needs theta > 0, got " + theta.to_string());
  return GibbsPrior(PriorFamily::Dirichlet, Alpha(ExactScalar(0).to_mode(theta.mode())), theta);
}

GibbsPrior GibbsPrior::table(const Alpha& alpha, WeightGrid grid, double tolerance) {
  if (grid.n_max < 1) throw std::invalid_argument("weight table is empty");
  bool any_log = alpha.mode() == NumericMode::LogSigned;
  for (int n = 1; n <= grid.n_max; ++n)
    for (int j = 1; j <= n; ++j) {
      auto it = grid.values.find({n, j});
      if (it == grid.values.end())
        throw std::invalid_argument("weight table is missing V(" + std::to_string(n) + "," +
                                    std::to_string(j) + ")");
      if (it->second.sign() <= 0)
        throw std::domain_error("weight V(" + std::to_string(n) + "," + std::to_string(j) +
                                ") must be positive");
      any_log = any_log || !it->second.is_exact();
    }
  const NumericMode mode = any_log ? NumericMode::LogSigned : NumericMode::Exact;
  for (auto& [key, value] : grid.values) value = value.to_mode(mode);

  const Alpha a = alpha.to_mode(mode);
  if (grid.values.at({1, 1}) != ExactScalar(1).to_mode(mode))
    throw std::domain_error("weight table must have V(1,1) = 1");
  for (int n = 1; n < grid.n_max; ++n)
    for (int j = 1; j <= n; ++j) {
      const ExactScalar& v = grid.values.at({n, j});
      const ExactScalar predicted = (ExactScalar(n) - ExactScalar(j) * a.value()) * grid.values.at({n + 1, j}) +
                                    grid.values.at({n + 1, j + 1});
      const double residual = ((predicted - v) / v).abs().to_double();
      if (residual > tolerance)
        throw std::domain_error("weight table violates V(n,j) = (n - j alpha) V(n+1,j) + V(n+1,j+1) at (" +
                                std::to_string(n) + "," + std::to_string(j) + "), relative residual " +
                                std::to_string(residual));
    }

  GibbsPrior prior(PriorFamily::Table, a, std::nullopt);
  prior.grid_ = std::make_shared<const WeightGrid>(std::move(grid));
  return prior;
}

std::optional<int> GibbsPrior::max_n() const {
  if (grid_) return grid_->n_max;
  return std::nullopt;
}

ExactScalar GibbsPrior::weight(int n, int j) const {
  if (n < 1 || j < 1)
    throw std::out_of_range("V(" + std::to_string(n) + "," + std::to_string(j) + ") needs n, j >= 1");
  if (j > n) return ExactScalar(0).to_mode(mode());
  {
    std::lock_guard lock(memo_->mutex);
    if (auto it = memo_->weights.find({n, j}); it != memo_->weights.end()) return it->second;
  }
  ExactScalar value = compute_weight(n, j);
  std::lock_guard lock(memo_->mutex);
  return memo_->weights.emplace(std::pair{n, j}, std::move(value)).first->second;
}

ExactScalar GibbsPrior::compute_weight(int n, int j) const {
  switch (family_) {
    case PriorFamily::PitmanYor:
      return generalized_rising(*theta_, static_cast<unsigned>(j), alpha_.value()) /
             rising_factorial(*theta_, static_cast<unsigned>(n));
    case PriorFamily::Dirichlet:
      return pow(*theta_, static_cast<unsigned>(j)) / rising_factorial(*theta_, static_cast<unsigned>(n));
    case PriorFamily::Table:
      if (n > grid_->n_max)
        throw std::out_of_range("V(" + std::to_string(n) + "," + std::to_string(j) +
                                ") is beyond the weight table (n_max = " + std::to_string(grid_->n_max) + ")");
      return grid_->values.at({n, j});
  }
  throw std::logic_error("unknown prior family");
}

GibbsPrior GibbsPrior::in_mode(NumericMode target) const {
  if (target == mode()) return *this;
  switch (family_) {
    case PriorFamily::PitmanYor: return pitman_yor(alpha_.to_mode(target), theta_->to_mode(target));
    case PriorFamily::Dirichlet: return dirichlet(theta_->to_mode(target));
    case PriorFamily::Table: {
      WeightGrid grid = *grid_;
      for (auto& [key, value] : grid.values) value = value.to_mode(target);
      return table(alpha_.to_mode(target), std::move(grid));
    }
  }
  throw std::logic_error("unknown prior family");
}

std::string GibbsPrior::describe() const {
  std::string out(family_name(family_));
  out += "(alpha=" + alpha_.value().to_string();
  if (theta_) out += ", theta=" + theta_->to_string();
  if (grid_) out += ", n_max=" + std::to_string(grid_->n_max);
  return out + ")";
}

SampleSummary SampleSummary::complete(std::vector<int> multiplicities) {
  if (multiplicities.empty()) throw std::invalid_argument("need at least one observed species");
  for (int m : multiplicities)
    if (m < 1) throw std::invalid_argument("multiplicities must be >= 1");
  const int n = std::accumulate(multiplicities.begin(), multiplicities.end(), 0);
  const int j = static_cast<int>(multiplicities.size());
  return SampleSummary(n, j, std::move(multiplicities));
}

SampleSummary SampleSummary::incomplete(int n, int j) {
  if (j < 1 || j > n) throw std::invalid_argument("need 1 <= j <= n");
  return SampleSummary(n, j, std::nullopt);
}

}  // namespace lookback
