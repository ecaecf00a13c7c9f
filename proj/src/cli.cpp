#include "lookback/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "lookback/combinatorics.hpp"
#include "lookback/gibbslaws.hpp"
#include "lookback/priors.hpp"
#include "lookback/verify.hpp"

namespace lookback::cli {

namespace {

using nlohmann::json;

struct PriorOptions {
  std::string family = "py";
  std::string alpha;
  std::string theta;
  std::string file;
};

struct CommonOptions {
  std::string mode;
  std::string format;
  std::string out_path;
  int decimal_digits = -1;
};

void add_prior_options(CLI::App* cmd, PriorOptions& opts) {
  cmd->add_option("--prior", opts.family, "Prior family")->check(CLI::IsMember({"py", "dirichlet", "table"}));
  cmd->add_option("--alpha", opts.alpha, "Discount alpha (py, table)");
  cmd->add_option("--theta", opts.theta, "Concentration theta (py, dirichlet)");
  cmd->add_option("--file", opts.file, "Weight table CSV with header n,j,value (table)");
}

void add_common_options(CLI::App* cmd, CommonOptions& opts, const std::string& default_format,
                        std::vector<std::string> formats) {
  opts.format = default_format;
  cmd->add_option("--mode", opts.mode, "Numeric mode (default from $LOOKBACK_MODE, else exact)")
      ->check(CLI::IsMember({"exact", "log"}));
  cmd->add_option("--format,--output", opts.format, "Output format")->check(CLI::IsMember(formats));
  cmd->add_option("--out", opts.out_path, "Write output to this file instead of stdout");
  cmd->add_option("--decimal-digits", opts.decimal_digits, "Render values as decimals with D significant digits")
      ->check(CLI::Range(1, 200));
}

NumericMode resolve_mode(const std::string& flag) {
  if (!flag.empty()) return parse_mode(flag);
  if (const char* env = std::getenv(kModeEnv); env && *env) return parse_mode(env);
  return NumericMode::Exact;
}

GibbsPrior build_prior(const PriorOptions& opts, NumericMode mode) {
  auto need = [](const std::string& value, const char* flag, const std::string& family) {
    if (value.empty()) throw std::invalid_argument(std::string("--prior ") + family + " requires " + flag);
  };
  std::optional<GibbsPrior> prior;
  if (opts.family == "py") {
    need(opts.alpha, "--alpha", "py");
    need(opts.theta, "--theta", "py");
    prior = pitman_yor(Alpha::parse(opts.alpha), ExactScalar::parse(opts.theta));
  } else if (opts.family == "dirichlet") {
    need(opts.theta, "--theta", "dirichlet");
    prior = dirichlet(ExactScalar::parse(opts.theta));
  } else {
    need(opts.file, "--file", "table");
    need(opts.alpha, "--alpha", "table");
    prior = table_prior(Alpha::parse(opts.alpha), read_weight_csv_file(opts.file));
  }
  return prior->in_mode(mode);
}

json prior_to_json(const GibbsPrior& prior) {
  json j;
  j["family"] = std::string(family_name(prior.family()));
  j["alpha"] = prior.alpha().value().to_string();
  if (prior.theta()) j["theta"] = prior.theta()->to_string();
  if (prior.max_n()) j["n_max"] = *prior.max_n();
  return j;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    std::size_t used = 0;
    int value = 0;
    try {
      value = std::stoi(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw std::invalid_argument("bad integer list '" + text + "'");
    out.push_back(value);
  }
  if (out.empty()) throw std::invalid_argument("empty integer list");
  return out;
}

void emit(const CommonOptions& opts, const std::string& text, std::ostream& out) {
  if (opts.out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(opts.out_path);
  if (!file) throw std::runtime_error("cannot open '" + opts.out_path + "' for writing");
  file << text;
}

std::string render(const ExactScalar& v, int digits) { return v.to_string(digits); }

std::string csv_field(std::string s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char c : s) quoted += c == '"' ? std::string("\"\"") : std::string(1, c);
  return quoted + "\"";
}

std::string run_stirling(const std::string& alpha_text, const std::string& gamma_text, int n_max,
                         const CommonOptions& opts) {
  const NumericMode mode = resolve_mode(opts.mode);
  const Alpha alpha = Alpha::parse(alpha_text, mode);
  const ExactScalar gamma = ExactScalar::parse(gamma_text, mode);
  const StirlingTriangle tri = StirlingTriangle::build(alpha, gamma, n_max);
  if (opts.format == "json") return triangle_to_json(tri, opts.decimal_digits).dump(2) + "\n";
  std::ostringstream os;
  os << "n,k,value\n";
  for (int n = 0; n <= n_max; ++n)
    for (int k = 0; k <= n; ++k) os << n << ',' << k << ',' << render(tri.at(n, k), opts.decimal_digits) << '\n';
  return os.str();
}

struct LawOptions {
  std::string kind = "k";
  int n = 0;
  int j = 0;
  int r = 0;
};

std::string run_law(const LawOptions& law, const PriorOptions& prior_opts, const CommonOptions& opts) {
  const NumericMode mode = resolve_mode(opts.mode);
  const GibbsPrior prior = build_prior(prior_opts, mode);
  const int digits = opts.decimal_digits;
  if (law.n < 1) throw std::invalid_argument("--n must be >= 1");

  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  json table = json::array();
  if (law.kind == "k") {
    header = {"j", "probability"};
    for (int j = 1; j <= law.n; ++j) {
      const std::string p = render(pmf_k(prior, law.n, j), digits);
      rows.push_back({std::to_string(j), p});
      table.push_back({{"j", j}, {"probability", p}});
    }
  } else {
    if (law.j < 1 || law.j > law.n) throw std::invalid_argument("--j must satisfy 1 <= j <= n");
    if (law.r < 0 || law.r > law.j) throw std::invalid_argument("--r must satisfy 0 <= r <= j");
    if (law.kind == "t") {
      header = {"s", "probability"};
      for (int s = law.r; s <= law.n - (law.j - law.r); ++s) {
        const std::string p = render(t_r_pmf(prior.alpha(), law.n, law.j, law.r, s), digits);
        rows.push_back({std::to_string(s), p});
        table.push_back({{"s", s}, {"probability", p}});
      }
    } else {
      for (int i = 1; i <= law.r; ++i) header.push_back("n_" + std::to_string(i));
      header.push_back("probability");
      for (int total = law.r; total <= law.n - (law.j - law.r); ++total)
        for_each_composition(total, law.r, [&](std::span<const int> values) {
          const std::string p = render(conditional_multiplicity_pmf(prior.alpha(), law.n, law.j, values), digits);
          std::vector<std::string> row;
          for (int v : values) row.push_back(std::to_string(v));
          row.push_back(p);
          rows.push_back(row);
          table.push_back({{"values", std::vector<int>(values.begin(), values.end())}, {"probability", p}});
        });
    }
  }

  if (opts.format == "json") {
    json doc;
    doc["kind"] = law.kind;
    doc["mode"] = std::string(mode_name(mode));
    doc["n"] = law.n;
    if (law.kind != "k") {
      doc["j"] = law.j;
      doc["r"] = law.r;
    }
    doc["prior"] = prior_to_json(prior);
    doc["table"] = table;
    return doc.dump(2) + "\n";
  }
  std::ostringstream os;
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_field(row[i]);
    os << '\n';
  }
  return os.str();
}

struct MomentOptions {
  int n = 0;
  int j = 0;
  std::string multiplicities;
  int m = 0;
  int l = 0;
  int r_max = 1;
  std::string target = "rl";
};

std::string run_moments(const MomentOptions& mo, const PriorOptions& prior_opts, const CommonOptions& opts,
                        std::ostream& err) {
  const NumericMode mode = resolve_mode(opts.mode);
  const GibbsPrior prior = build_prior(prior_opts, mode);
  std::optional<SampleSummary> data;
  if (!mo.multiplicities.empty()) {
    data = SampleSummary::complete(parse_int_list(mo.multiplicities));
    if (mo.n != 0 && mo.n != data->n())
      throw std::invalid_argument("--n disagrees with the sum of --multiplicities");
    if (mo.j != 0 && mo.j != data->j())
      throw std::invalid_argument("--j disagrees with the number of --multiplicities");
  } else {
    if (mo.n == 0 || mo.j == 0) throw std::invalid_argument("give --n and --j, or --multiplicities");
    data = SampleSummary::incomplete(mo.n, mo.j);
  }
  if (mo.m < 0) throw std::invalid_argument("--m must be >= 0");
  if (mo.l < 0 || mo.l > mo.m) throw std::invalid_argument("--l must satisfy 0 <= l <= m");
  if (mo.r_max < 0) throw std::invalid_argument("--r-max must be >= 0");

  reset_precision_warnings();
  const MomentReport report =
      backward_report(BackwardQuery{prior, *data, mo.m, mo.l, mo.r_max, parse_target(mo.target)});
  if (const auto warnings = precision_warning_count(); warnings > 0)
    err << "warning: " << warnings << " log-space cancellation(s) lost more than 13 digits\n";

  if (opts.format == "json") return report_to_json(report, opts.decimal_digits).dump(2) + "\n";
  std::ostringstream os;
  os << "kind,index,value\n";
  for (std::size_t r = 0; r < report.moments.size(); ++r)
    os << "moment," << r << ',' << render(report.moments[r], opts.decimal_digits) << '\n';
  if (report.pmf)
    for (std::size_t x = 0; x < report.pmf->size(); ++x)
      os << "pmf," << x << ',' << render((*report.pmf)[x], opts.decimal_digits) << '\n';
  return os.str();
}

int run_verify(const std::string& grid, std::uint64_t seed, std::uint64_t mc_count, std::ostream& out) {
  const VerificationResult result = run_verification(parse_grid(grid), seed, mc_count);
  out << "status  check               points  failures  prior\n";
  for (const auto& row : result.rows) {
    char line[256];
    std::snprintf(line, sizeof line, "%-6s  %-18s  %6zu  %8zu  %s\n", row.passed() ? "PASS" : "FAIL",
                  row.check.c_str(), row.points, row.failures, row.prior.c_str());
    out << line;
    if (!row.first_failure.empty()) out << "        first mismatch: " << row.first_failure << '\n';
  }
  out << (result.all_passed() ? "verification passed\n" : "verification FAILED\n");
  return result.all_passed() ? kExitOk : kExitVerifyFailed;
}

}  // namespace

json report_to_json(const MomentReport& report, int decimal_digits) {
  const auto& q = report.query;
  json query;
  query["prior"] = prior_to_json(q.prior);
  query["n"] = q.data.n();
  query["j"] = q.data.j();
  query["m"] = q.m;
  query["l"] = q.l;
  query["r_max"] = q.r_max;
  query["target"] = std::string(target_name(q.target));
  query["info"] = q.data.is_complete() ? "complete" : "incomplete";
  if (q.data.is_complete()) query["multiplicities"] = *q.data.multiplicities();

  json doc;
  doc["query"] = query;
  doc["mode"] = std::string(mode_name(report.mode));
  json moments = json::array();
  for (const auto& v : report.moments) moments.push_back(v.to_string(decimal_digits));
  doc["moments"] = moments;
  if (report.pmf) {
    json pmf = json::array();
    for (const auto& v : *report.pmf) pmf.push_back(v.to_string(decimal_digits));
    doc["pmf"] = pmf;
  }
  doc["metadata"] = {{"tilted_discount", report.tilted_discount.to_string(decimal_digits)},
                     {"kernel_convention", report.kernel_convention}};
  return doc;
}

json triangle_to_json(const StirlingTriangle& tri, int decimal_digits) {
  json rows = json::array();
  for (int n = 0; n <= tri.n_max(); ++n) {
    json row = json::array();
    for (const auto& v : tri.row(n)) row.push_back(v.to_string(decimal_digits));
    rows.push_back(row);
  }
  return {{"alpha", tri.alpha().value().to_string(decimal_digits)},
          {"gamma", tri.gamma().to_string(decimal_digits)},
          {"mode", std::string(mode_name(tri.mode()))},
          {"n_max", tri.n_max()},
          {"rows", rows}};
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Looking-backward species sampling estimators under Gibbs-type priors", "lookback"};
  app.require_subcommand(1);

  CommonOptions stirling_common;
  std::string st_alpha, st_gamma = "0";
  int st_n_max = 0;
  auto* stirling = app.add_subcommand("stirling", "Dump a generalized Stirling triangle");
  stirling->add_option("--alpha", st_alpha, "Discount alpha")->required();
  stirling->add_option("--gamma", st_gamma, "Non-centrality gamma");
  stirling->add_option("--n-max", st_n_max, "Deepest row")->required()->check(CLI::Range(0, 2000));
  add_common_options(stirling, stirling_common, "csv", {"csv", "json"});

  CommonOptions law_common;
  PriorOptions law_prior;
  LawOptions law;
  auto* law_cmd = app.add_subcommand("law", "Partition laws: K_n, T_r or conditional multiplicities");
  law_cmd->add_option("--kind", law.kind, "Which law")->check(CLI::IsMember({"k", "t", "multiplicity"}));
  law_cmd->add_option("--n", law.n, "Sample size")->required();
  law_cmd->add_option("--j", law.j, "Number of blocks (t, multiplicity)");
  law_cmd->add_option("--r", law.r, "Number of chosen blocks (t, multiplicity)");
  add_prior_options(law_cmd, law_prior);
  add_common_options(law_cmd, law_common, "json", {"json", "csv"});

  CommonOptions mom_common;
  PriorOptions mom_prior;
  MomentOptions mom;
  auto* moments = app.add_subcommand("moments", "Falling factorial moments of R_{l,m} or R_m");
  moments->add_option("--n", mom.n, "Observed sample size");
  moments->add_option("--j", mom.j, "Observed number of species");
  moments->add_option("--multiplicities", mom.multiplicities,
                      "Comma-separated species counts; presence selects complete information");
  moments->add_option("--m", mom.m, "Additional sample size")->required();
  moments->add_option("--l", mom.l, "Re-observation count for target rl");
  moments->add_option("--r-max", mom.r_max, "Highest moment order");
  moments->add_option("--target", mom.target, "rl = R_{l,m}, rm = R_m")->check(CLI::IsMember({"rl", "rm"}));
  add_prior_options(moments, mom_prior);
  add_common_options(moments, mom_common, "json", {"json", "csv"});

  std::string grid = "small";
  std::uint64_t seed = 0;
  std::uint64_t mc_count = 20000;
  auto* verify = app.add_subcommand("verify", "Check closed forms against enumeration and Monte Carlo");
  verify->add_option("--grid", grid, "Grid size")->check(CLI::IsMember({"small", "full"}));
  verify->add_option("--seed", seed, "Master seed for Monte Carlo");
  verify->add_option("--mc-count", mc_count, "Monte Carlo samples per point")->check(CLI::PositiveNumber);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (stirling->parsed()) {
      emit(stirling_common, run_stirling(st_alpha, st_gamma, st_n_max, stirling_common), out);
    } else if (law_cmd->parsed()) {
      emit(law_common, run_law(law, law_prior, law_common), out);
    } else if (moments->parsed()) {
      emit(mom_common, run_moments(mom, mom_prior, mom_common, err), out);
    } else if (verify->parsed()) {
      return run_verify(grid, seed, mc_count, out);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitOk;
}

}  // namespace lookback::cli
