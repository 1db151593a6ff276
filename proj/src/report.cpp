#include "rtsched/report.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace rtsched {

void write_summary(std::ostream& out, const std::string& label,
                   std::span<const SimulationOutcome> outcomes) {
  out << "# config=" << label << '\n';
  out << "instance\tpatients\tbreach_pct\tjmax_pct\tjgood_pct\twaiting\n";
  char buf[160];
  for (const SimulationOutcome& o : outcomes) {
    const Aggregates a = o.aggregates();
    std::snprintf(buf, sizeof buf, "\t%zu\t%.9g\t%.9g\t%.9g\t%.9g\n", a.patients, a.breach_pct,
                  a.jmax_pct, a.jgood_pct, a.waiting);
    out << o.instance << buf;
  }
}

ConfigResults read_summary(std::istream& in, const std::string& source) {
  ConfigResults r;
  std::string line;
  int number = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    if (line.rfind("# config=", 0) == 0) {
      r.label = line.substr(9);
      continue;
    }
    if (line.front() == '#') continue;
    if (!header) {
      if (line.rfind("instance\t", 0) != 0) throw ParseError(source, number, "missing column header");
      header = true;
      continue;
    }
    std::istringstream fields(line);
    std::string name;
    std::size_t patients = 0;
    std::array<double, 4> row{};
    if (!(fields >> name >> patients >> row[0] >> row[1] >> row[2] >> row[3])) {
      throw ParseError(source, number, "expected instance, patients and four criteria");
    }
    r.instances.push_back(name);
    r.rows.push_back(row);
  }
  if (!header) throw ParseError(source, number, "empty summary");
  return r;
}

BatchStatistics batch_statistics(std::span<const SimulationOutcome> outcomes) {
  BatchStatistics s;
  for (const SimulationOutcome& o : outcomes) {
    for (const BatchRecord& b : o.batches) {
      ++s.batches;
      if (b.solved < b.constructive) ++s.improved;
      if (b.constructive < b.solved) ++s.worse;
    }
  }
  return s;
}

std::string RunManifest::to_text() const {
  std::ostringstream out;
  out << "tool=rtsched " << kToolVersion << '\n';
  out << "command=" << command << '\n';
  out << "config=" << config_path << '\n';
  out << "seed=" << seed << '\n';
  for (const std::string& p : policies) out << "policy=" << p << '\n';
  if (budget_secs) out << "budget_secs=" << *budget_secs << '\n';
  if (node_budget) out << "node_budget=" << *node_budget << '\n';
  out << "out=" << out_dir << '\n';
  for (const auto& [k, v] : extra) out << k << '=' << v << '\n';
  return out.str();
}

}  // namespace rtsched
