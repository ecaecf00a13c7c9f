// Pinned regression values produced by the enumeration oracle.
//
//   gen_fixtures --write PATH   regenerate the fixture file
//   gen_fixtures --check PATH   regenerate in memory, compare with the file,
//                               then compare the closed forms with the file

#include <fstream>
#include <iostream>
#include <string>

#include <json.hpp>

#include "lookback/estimators.hpp"
#include "lookback/oracle.hpp"

using namespace lookback;
using nlohmann::json;

namespace {

struct Pin {
  std::string name;
  GibbsPrior prior;
  int n, j, m, l, r_max;
  Target target;
};

std::vector<Pin> pins() {
  const auto py = pitman_yor(Alpha::parse("1/2"), ExactScalar::parse("1"));
  const auto dir = dirichlet(ExactScalar::parse("1"));
  return {
      {"py_half_n3_j2_m2_rm", py, 3, 2, 2, 0, 2, Target::AtLeastOnce},
      {"dirichlet1_n3_j2_m2_l1", dir, 3, 2, 2, 1, 2, Target::ExactlyL},
      {"py_half_n3_j2_m1_l0", py, 3, 2, 1, 0, 1, Target::ExactlyL},
  };
}

json pin_query(const Pin& p) {
  return {{"prior", p.prior.describe()}, {"n", p.n}, {"j", p.j}, {"m", p.m},
          {"l", p.l}, {"r_max", p.r_max}, {"target", std::string(target_name(p.target))}};
}

json from_oracle() {
  json doc = json::object();
  for (const auto& p : pins()) {
    json moments = json::array();
    for (int r = 0; r <= p.r_max; ++r)
      moments.push_back(oracle_incomplete_moment(p.prior, p.n, p.j, p.m, p.target, p.l, r).to_string());
    doc[p.name] = {{"query", pin_query(p)}, {"moments", moments}};
  }
  return doc;
}

json from_closed_form() {
  json doc = json::object();
  for (const auto& p : pins()) {
    const auto report =
        backward_report(BackwardQuery{p.prior, SampleSummary::incomplete(p.n, p.j), p.m, p.l, p.r_max, p.target});
    json moments = json::array();
    for (const auto& v : report.moments) moments.push_back(v.to_string());
    doc[p.name] = {{"query", pin_query(p)}, {"moments", moments}};
  }
  return doc;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 3 || (std::string(argv[1]) != "--write" && std::string(argv[1]) != "--check")) {
    std::cerr << "usage: gen_fixtures --write|--check PATH\n";
    return 1;
  }
  const std::string path = argv[2];
  const json oracle = from_oracle();

  if (std::string(argv[1]) == "--write") {
    std::ofstream out(path);
    if (!out) {
      std::cerr << "cannot write " << path << "\n";
      return 1;
    }
    out << oracle.dump(2) << "\n";
    return 0;
  }

  std::ifstream in(path);
  if (!in) {
    std::cerr << "cannot read " << path << "\n";
    return 1;
  }
  const json pinned = json::parse(in);
  int failures = 0;
  if (pinned != oracle) {
    std::cerr << "oracle regeneration disagrees with " << path << "\n"
              << "regenerated: " << oracle.dump() << "\n";
    ++failures;
  }
  const json closed = from_closed_form();
  for (const auto& [name, entry] : pinned.items()) {
    const bool ok = closed.contains(name) && closed[name] == entry;
    std::cout << (ok ? "PASS " : "FAIL ") << name << " " << entry["moments"].dump() << "\n";
    if (!ok) {
      std::cerr << "  closed form gives " << (closed.contains(name) ? closed[name]["moments"].dump() : "nothing")
                << "\n";
      ++failures;
    }
  }
  return failures == 0 ? 0 : 1;
}
