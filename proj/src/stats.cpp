#include "rtsched/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <tuple>

#include "rtsched/random.hpp"

namespace rtsched {

namespace {

struct Ranked {
  std::vector<long> doubled;  // 2 x midrank per pooled observation
  double tie_term = 0.0;      // sum of t^3 - t over tie groups
};

Ranked midranks(std::span<const double> pooled) {
  std::vector<std::size_t> order(pooled.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return pooled[x] < pooled[y]; });
  Ranked r;
  r.doubled.resize(pooled.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && pooled[order[j]] == pooled[order[i]]) ++j;
    // Ranks i+1 .. j share the midrank (i+1+j)/2.
    const long doubled = static_cast<long>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) r.doubled[order[k]] = doubled;
    const double t = static_cast<double>(j - i);
    r.tie_term += t * t * t - t;
    i = j;
  }
  return r;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// Distribution of the doubled rank sum of `na` items drawn from `doubled`.
std::pair<double, double> exact_tails(const std::vector<long>& doubled, std::size_t na,
                                      long observed) {
  const long max_sum = std::accumulate(doubled.begin(), doubled.end(), 0L);
  // ways[k][s]: subsets of size k with doubled sum s.
  std::vector<std::vector<double>> ways(na + 1, std::vector<double>(max_sum + 1, 0.0));
  ways[0][0] = 1.0;
  for (std::size_t item = 0; item < doubled.size(); ++item) {
    const long v = doubled[item];
    const std::size_t kmax = std::min(na, item + 1);
    for (std::size_t k = kmax; k >= 1; --k) {
      auto& to = ways[k];
      const auto& from = ways[k - 1];
      for (long s = max_sum; s >= v; --s) to[s] += from[s - v];
    }
  }
  double total = 0.0, lower = 0.0, upper = 0.0;
  for (long s = 0; s <= max_sum; ++s) {
    const double w = ways[na][s];
    total += w;
    if (s <= observed) lower += w;
    if (s >= observed) upper += w;
  }
  return {lower / total, upper / total};
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = static_cast<std::size_t>(std::ceil(pos));
  return v[lo] + (v[hi] - v[lo]) * (pos - static_cast<double>(lo));
}

}  // namespace

MwwResult mww_u(std::span<const double> a, std::span<const double> b, MwwMethod method) {
  if (a.empty() || b.empty()) throw EmptySample("both samples must be nonempty");
  const std::size_t na = a.size(), nb = b.size(), n = na + nb;
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  const Ranked ranked = midranks(pooled);
  const long doubled_sum = std::accumulate(ranked.doubled.begin(), ranked.doubled.begin() + na, 0L);

  MwwResult r;
  const double nad = static_cast<double>(na), nbd = static_cast<double>(nb);
  r.u = static_cast<double>(doubled_sum) / 2.0 - nad * (nad + 1.0) / 2.0;
  r.exact = method == MwwMethod::Exact ||
            (method == MwwMethod::Auto && std::min(na, nb) < kExactThreshold);
  if (r.exact) {
    // Enumerate over the smaller sample; its rank sum mirrors the other's.
    double lower = 0.0, upper = 0.0;
    if (na <= nb) {
      std::tie(lower, upper) = exact_tails(ranked.doubled, na, doubled_sum);
    } else {
      std::vector<long> rotated(ranked.doubled.begin() + na, ranked.doubled.end());
      rotated.insert(rotated.end(), ranked.doubled.begin(), ranked.doubled.begin() + na);
      const long total = std::accumulate(ranked.doubled.begin(), ranked.doubled.end(), 0L);
      std::tie(upper, lower) = exact_tails(rotated, nb, total - doubled_sum);
    }
    r.p = std::min(1.0, 2.0 * std::min(lower, upper));
    return r;
  }
  const double nd = static_cast<double>(n);
  const double mean = nad * nbd / 2.0;
  const double var = nad * nbd / 12.0 * ((nd + 1.0) - ranked.tie_term / (nd * (nd - 1.0)));
  if (var <= 0.0) {
    r.p = 1.0;
    return r;
  }
  const double sd = std::sqrt(var);
  const double lower = normal_cdf((r.u + 0.5 - mean) / sd);
  const double upper = 1.0 - normal_cdf((r.u - 0.5 - mean) / sd);
  r.p = std::min(1.0, 2.0 * std::min(lower, upper));
  return r;
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::ABetter: return "a better";
    case Verdict::BBetter: return "b better";
    case Verdict::NoEvidence: return "no evidence";
  }
  return "?";
}

std::string_view to_string(BootstrapStrategy s) {
  return s == BootstrapStrategy::MedianP ? "median-p" : "percentile-u";
}

BootstrapStrategy parse_strategy(std::string_view text) {
  if (text == "median-p") return BootstrapStrategy::MedianP;
  if (text == "percentile-u") return BootstrapStrategy::PercentileU;
  throw std::invalid_argument("unknown bootstrap strategy '" + std::string(text) + "'");
}

Verdict bootstrap_compare(std::span<const double> a, std::span<const double> b,
                          const BootstrapOptions& options, std::uint64_t seed) {
  if (a.size() != b.size()) throw std::invalid_argument("paired samples differ in size");
  if (a.empty()) throw EmptySample("both samples must be nonempty");
  if (options.replications < 1) throw std::invalid_argument("replications must be positive");
  const std::size_t n = a.size();
  const auto reps = static_cast<std::size_t>(options.replications);
  std::vector<double> p(reps), u(reps);

  auto replicate = [&](std::size_t r) {
    std::mt19937_64 rng(derive_seed(seed, r));
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::vector<double> ra(n), rb(n);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t k = pick(rng);
      ra[i] = a[k];
      rb[i] = b[k];
    }
    const MwwResult m = mww_u(ra, rb);
    p[r] = m.p;
    u[r] = m.u;
  };
  if (options.exec == Execution::Parallel) {
    const auto count = static_cast<std::int64_t>(reps);
#pragma omp parallel for schedule(static)
    for (std::int64_t r = 0; r < count; ++r) replicate(static_cast<std::size_t>(r));
  } else {
    for (std::size_t r = 0; r < reps; ++r) replicate(r);
  }

  const double mid = static_cast<double>(n) * static_cast<double>(n) / 2.0;
  if (options.strategy == BootstrapStrategy::MedianP) {
    if (!(median_of(p) < options.alpha)) return Verdict::NoEvidence;
    const double full = mww_u(a, b).u;
    if (full < mid) return Verdict::ABetter;
    if (full > mid) return Verdict::BBetter;
    return Verdict::NoEvidence;
  }
  const double lo = quantile(u, options.alpha / 2.0);
  const double hi = quantile(u, 1.0 - options.alpha / 2.0);
  if (hi < mid) return Verdict::ABetter;
  if (lo > mid) return Verdict::BBetter;
  return Verdict::NoEvidence;
}

std::vector<double> ConfigResults::column(Objective o) const {
  std::vector<double> out;
  out.reserve(rows.size());
  const auto c = static_cast<std::size_t>(static_cast<int>(o) - 1);
  for (const auto& row : rows) out.push_back(row[c]);
  return out;
}

BestMarks mark_best(std::span<const ConfigResults> configs, Objective criterion,
                    const MarkOptions& options, std::uint64_t seed) {
  const std::size_t k = configs.size();
  BestMarks marks{std::vector<bool>(k, false), std::vector<int>(k, 0)};
  if (k == 0) return marks;
  const std::size_t pairs = k * (k - 1) / 2;
  BootstrapOptions boot = options.bootstrap;
  boot.alpha = options.corrected && pairs > 0 ? options.alpha_overall / static_cast<double>(pairs)
                                               : options.alpha_overall;
  std::vector<std::vector<double>> columns;
  for (const ConfigResults& c : configs) columns.push_back(c.column(criterion));

  std::uint64_t pair = 0;
  const std::uint64_t stream = derive_seed(seed, static_cast<std::uint64_t>(criterion));
  for (std::size_t x = 0; x < k; ++x) {
    for (std::size_t y = x + 1; y < k; ++y, ++pair) {
      const Verdict v = bootstrap_compare(columns[x], columns[y], boot, derive_seed(stream, pair));
      if (v == Verdict::ABetter) ++marks.lost[y];
      if (v == Verdict::BBetter) ++marks.lost[x];
    }
  }
  const int fewest = *std::min_element(marks.lost.begin(), marks.lost.end());
  for (std::size_t i = 0; i < k; ++i) marks.best[i] = marks.lost[i] == fewest;
  return marks;
}

ComparisonReport compare_configs(std::span<const ConfigResults> configs,
                                 const MarkOptions& options, std::uint64_t seed) {
  if (configs.empty()) throw DataError("nothing to compare");
  // Align every configuration on the first one's instance order.
  std::vector<ConfigResults> aligned;
  std::vector<std::string> reference = configs.front().instances;
  std::sort(reference.begin(), reference.end());
  if (std::adjacent_find(reference.begin(), reference.end()) != reference.end()) {
    throw DataError("duplicate instance names in " + configs.front().label);
  }
  for (const ConfigResults& c : configs) {
    if (c.instances.size() != c.rows.size()) throw DataError("ragged results for " + c.label);
    std::map<std::string, std::array<double, 4>> by_name;
    for (std::size_t i = 0; i < c.rows.size(); ++i) by_name[c.instances[i]] = c.rows[i];
    std::vector<std::string> names;
    for (const auto& [name, row] : by_name) names.push_back(name);
    if (names != reference) {
      throw DataError("configuration " + c.label + " was run on a different instance set");
    }
    ConfigResults a{c.label, reference, {}};
    for (const auto& name : reference) a.rows.push_back(by_name[name]);
    aligned.push_back(std::move(a));
  }

  ComparisonReport report;
  report.options = options;
  report.seed = seed;
  for (const ConfigResults& c : aligned) report.labels.push_back(c.label);
  for (Objective o : kObjectives) {
    const auto idx = static_cast<std::size_t>(static_cast<int>(o) - 1);
    for (const ConfigResults& c : aligned) {
      const auto col = c.column(o);
      report.means[idx].push_back(std::accumulate(col.begin(), col.end(), 0.0) /
                                  static_cast<double>(std::max<std::size_t>(col.size(), 1)));
    }
    report.marks[idx] = mark_best(aligned, o, options, seed);
  }
  return report;
}

namespace {

std::string cell(double value, bool waiting, bool best) {
  char buf[64];
  if (waiting) {
    std::snprintf(buf, sizeof buf, "%.0f%s", value, best ? "*" : "");
  } else {
    std::snprintf(buf, sizeof buf, "%.2f%s", value, best ? "*" : "");
  }
  return buf;
}

}  // namespace

std::string render_table(const ComparisonReport& report) {
  std::size_t width = 6;
  for (const auto& l : report.labels) width = std::max(width, l.size());
  std::ostringstream out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-*s  %11s  %11s  %11s  %11s\n", static_cast<int>(width),
                "config", "Breach %", "JMax %", "JGood %", "Waiting");
  out << buf;
  for (std::size_t i = 0; i < report.labels.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%-*s", static_cast<int>(width), report.labels[i].c_str());
    out << buf;
    for (std::size_t c = 0; c < 4; ++c) {
      std::snprintf(buf, sizeof buf, "  %11s",
                    cell(report.means[c][i], c == 3, report.marks[c].best[i]).c_str());
      out << buf;
    }
    out << '\n';
  }
  out << "# * = not significantly beaten; " << (report.options.corrected ? "Bonferroni" : "uncorrected")
      << " alpha " << report.options.alpha_overall << ", "
      << report.options.bootstrap.replications << " replications, "
      << to_string(report.options.bootstrap.strategy) << ", seed " << report.seed << '\n';
  return out.str();
}

std::string render_tsv(const ComparisonReport& report) {
  std::ostringstream out;
  out << "config\tcriterion\tmean\tbest\tlost\n";
  char buf[64];
  for (std::size_t i = 0; i < report.labels.size(); ++i) {
    for (Objective o : kObjectives) {
      const auto c = static_cast<std::size_t>(static_cast<int>(o) - 1);
      std::snprintf(buf, sizeof buf, "%.6f", report.means[c][i]);
      out << report.labels[i] << '\t' << to_string(o) << '\t' << buf << '\t'
          << (report.marks[c].best[i] ? 1 : 0) << '\t' << report.marks[c].lost[i] << '\n';
    }
  }
  return out.str();
}

}  // namespace rtsched
