#include "commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "rtsched/config.hpp"
#include "rtsched/datagen.hpp"
#include "rtsched/full_model.hpp"
#include "rtsched/instance.hpp"
#include "rtsched/lp_export.hpp"
#include "rtsched/parallel.hpp"
#include "rtsched/report.hpp"
#include "rtsched/simulator.hpp"
#include "rtsched/solver.hpp"
#include "rtsched/stats.hpp"

namespace fs = std::filesystem;

namespace rtsched::cli {

namespace {

constexpr const char* kSummaryFile = "summary.tsv";
constexpr const char* kGridFile = "grid.txt";

RunConfig load(const std::string& path) { return path.empty() ? RunConfig{} : load_config(path); }

void make_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw DataError("cannot create directory " + dir);
}

void apply_budget(SimulationOptions& sim, std::optional<double> secs,
                  std::optional<std::int64_t> nodes) {
  if (secs) {
    if (!(*secs > 0.0)) throw std::invalid_argument("--budget-secs must be positive");
    sim.budget.total_seconds = *secs;
  }
  if (nodes) {
    if (*nodes < 0) throw std::invalid_argument("--node-budget must be nonnegative");
    sim.budget.node_limit = *nodes == 0 ? std::nullopt : nodes;
  }
}

std::vector<std::string> instance_files(const std::vector<std::string>& inputs) {
  std::vector<std::string> files;
  for (const std::string& in : inputs) {
    if (fs::is_directory(in)) {
      std::vector<std::string> found;
      for (const auto& entry : fs::directory_iterator(in)) {
        const auto& p = entry.path();
        if (entry.is_regular_file() && p.extension() == ".tsv") found.push_back(p.string());
      }
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else if (fs::is_regular_file(in)) {
      files.push_back(in);
    } else {
      throw DataError("no such instance file or directory: " + in);
    }
  }
  return files;
}

void simulate_into(const std::string& dir, const std::vector<Instance>& instances,
                   const PolicyConfig& policy, const SimulationOptions& sim, int jobs,
                   RunManifest manifest) {
  make_dir(dir);
  make_dir(dir + "/outcomes");
  make_dir(dir + "/events");
  auto flush = [&](std::size_t, const SimulationOutcome& o) {
    std::ostringstream outcome, events;
    write_outcome(outcome, o);
    write_events(events, o);
    write_file_atomically(dir + "/outcomes/" + o.instance + ".tsv", outcome.str());
    write_file_atomically(dir + "/events/" + o.instance + ".tsv", events.str());
  };
  const auto outcomes = simulate_instances(
      instances, policy, sim, jobs > 1 ? Execution::Parallel : Execution::Serial, flush);

  std::ostringstream summary;
  write_summary(summary, policy.label(), outcomes);
  write_file_atomically(dir + "/" + kSummaryFile, summary.str());

  const BatchStatistics stats = batch_statistics(outcomes);
  manifest.policies = {policy.label()};
  manifest.out_dir = dir;
  manifest.extra["batches"] = std::to_string(stats.batches);
  manifest.extra["batches_improved"] = std::to_string(stats.improved);
  manifest.extra["batches_worse"] = std::to_string(stats.worse);
  write_file_atomically(dir + "/manifest.txt", manifest.to_text());
}

std::vector<std::string> outcome_dirs(const std::string& dir) {
  if (fs::is_regular_file(fs::path(dir) / kSummaryFile)) return {dir};
  std::vector<std::string> out;
  const fs::path grid = fs::path(dir) / kGridFile;
  if (fs::is_regular_file(grid)) {
    std::ifstream in(grid);
    std::string name;
    while (std::getline(in, name)) {
      if (!name.empty()) out.push_back((fs::path(dir) / name).string());
    }
    return out;
  }
  if (fs::is_directory(dir)) {
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (fs::is_regular_file(entry.path() / kSummaryFile)) out.push_back(entry.path().string());
    }
    std::sort(out.begin(), out.end());
  }
  if (out.empty()) throw DataError("no simulation summaries found in " + dir);
  return out;
}

}  // namespace

std::string policy_dir_name(const std::string& label) {
  std::string out;
  for (char c : label) {
    if (c == ' ') out += '_';
    else if (c == ',') out += '-';
    else if (c != '=') out += c;
  }
  return out;
}

void cmd_generate(const GenerateOptions& o) {
  RunConfig config = load(o.config_path);
  if (o.instances) {
    if (*o.instances < 1) throw std::invalid_argument("--instances must be positive");
    config.generator.instances = *o.instances;
  }
  make_dir(o.out);
  const auto instances = generate_instances(config.generator, o.seed);
  for (const Instance& inst : instances) save_instance(o.out + "/" + inst.name + ".tsv", inst);
  RunManifest m;
  m.command = "generate";
  m.config_path = o.config_path;
  m.seed = o.seed;
  m.out_dir = o.out;
  m.extra["instances"] = std::to_string(instances.size());
  write_file_atomically(o.out + "/manifest.txt", m.to_text());
}

void cmd_simulate(const SimulateOptions& o) {
  RunConfig config = load(o.config_path);
  apply_budget(config.simulation, o.budget_secs, o.node_budget);
  if (o.jobs < 1) throw std::invalid_argument("--jobs must be positive");
  set_threads(o.jobs);

  std::vector<PolicyConfig> policies;
  if (o.grid) {
    if (o.policy) throw std::invalid_argument("--grid and --policy are exclusive");
    if (*o.grid == "scd") policies = scd_grid();
    else if (*o.grid == "mnda") policies = mnda_grid();
    else throw std::invalid_argument("--grid must be scd or mnda");
  } else {
    policies = {o.policy ? PolicyConfig::parse(*o.policy) : config.policy};
  }

  std::vector<Instance> instances;
  for (const std::string& f : instance_files(o.inputs)) instances.push_back(load_instance(f));

  RunManifest m;
  m.command = "simulate";
  m.config_path = o.config_path;
  m.seed = o.seed;
  m.budget_secs = config.simulation.budget.total_seconds;
  m.node_budget = config.simulation.budget.node_limit;
  m.extra["instances"] = std::to_string(instances.size());
  m.extra["jobs"] = std::to_string(o.jobs);

  make_dir(o.out);
  if (!o.grid) {
    simulate_into(o.out, instances, policies.front(), config.simulation, o.jobs, m);
    return;
  }
  std::string grid;
  for (const PolicyConfig& p : policies) {
    const std::string name = policy_dir_name(p.label());
    simulate_into(o.out + "/" + name, instances, p, config.simulation, o.jobs, m);
    grid += name + '\n';
  }
  write_file_atomically(o.out + "/" + kGridFile, grid);
}

std::string cmd_compare(const CompareOptions& o) {
  RunConfig config = load(o.config_path);
  MarkOptions marks = config.marks;
  if (o.alpha) {
    if (!(*o.alpha > 0.0 && *o.alpha < 1.0)) throw std::invalid_argument("--alpha must be in (0,1)");
    marks.alpha_overall = *o.alpha;
  }
  if (o.replications) {
    if (*o.replications < 1) throw std::invalid_argument("--replications must be positive");
    marks.bootstrap.replications = *o.replications;
  }
  if (o.strategy) marks.bootstrap.strategy = parse_strategy(*o.strategy);
  if (o.uncorrected) marks.corrected = false;
  if (o.jobs < 1) throw std::invalid_argument("--jobs must be positive");
  set_threads(o.jobs);
  marks.bootstrap.exec = o.jobs > 1 ? Execution::Parallel : Execution::Serial;

  std::vector<ConfigResults> configs;
  for (const std::string& d : o.dirs) {
    for (const std::string& dir : outcome_dirs(d)) {
      const std::string path = dir + "/" + kSummaryFile;
      std::ifstream in(path);
      if (!in) throw DataError("cannot open " + path);
      configs.push_back(read_summary(in, path));
    }
  }
  const ComparisonReport report = compare_configs(configs, marks, o.seed);
  const std::string table = render_table(report);
  if (o.out) {
    make_dir(*o.out);
    write_file_atomically(*o.out + "/report.txt", table);
    write_file_atomically(*o.out + "/report.tsv", render_tsv(report));
    RunManifest m;
    m.command = "compare";
    m.config_path = o.config_path;
    m.seed = o.seed;
    m.out_dir = *o.out;
    for (const auto& l : report.labels) m.policies.push_back(l);
    m.extra["alpha"] = std::to_string(marks.alpha_overall);
    m.extra["replications"] = std::to_string(marks.bootstrap.replications);
    m.extra["strategy"] = std::string(to_string(marks.bootstrap.strategy));
    m.extra["corrected"] = marks.corrected ? "1" : "0";
    write_file_atomically(*o.out + "/manifest.txt", m.to_text());
  }
  return table;
}

void cmd_export_lp(const ExportOptions& o) {
  if (o.objective < 1 || o.objective > 4) throw std::invalid_argument("--objective must be 1..4");
  if (o.day < 1) throw std::invalid_argument("--day must be at least 1");
  RunConfig config = load(o.config_path);
  apply_budget(config.simulation, o.budget_secs, o.node_budget);
  const PolicyConfig policy = o.policy ? PolicyConfig::parse(*o.policy) : config.policy;
  const Instance instance = load_instance(o.instance);

  Simulation sim(instance, policy, config.simulation);
  while (!sim.finished() && sim.today() < o.day) sim.step();
  std::vector<PatientCase> batch;
  if (sim.today() == o.day) batch = sim.batch();
  const BookingState state = sim.state();
  const Horizon horizon = planning_horizon(batch, state, o.day + 1);
  const FullModel model = build_full_model(batch, state, horizon);
  write_file_atomically(o.out, export_lp(model, static_cast<Objective>(o.objective)));
}

int run(int argc, const char* const* argv) {
  CLI::App app{"Radiotherapy booking: instance generation, simulation and policy comparison"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("rtsched ") + kToolVersion);

  GenerateOptions gen;
  auto* g = app.add_subcommand("generate", "Write synthetic instance files");
  g->add_option("--config", gen.config_path, "key=value config file");
  g->add_option("--seed", gen.seed, "master seed");
  g->add_option("--out", gen.out, "output directory")->required();
  g->add_option("--instances", gen.instances, "number of instances (overrides config)");

  SimulateOptions sim;
  auto* s = app.add_subcommand("simulate", "Run the booking simulation");
  s->add_option("inputs", sim.inputs, "instance files or directories")->required();
  s->add_option("--config", sim.config_path, "key=value config file");
  s->add_option("--policy", sim.policy, "e.g. \"scd=2,1 mnda=inf,inf\"");
  s->add_option("--grid", sim.grid, "run the scd (16) or mnda (25) policy grid");
  s->add_option("--budget-secs", sim.budget_secs, "solver seconds per batch (default 10)");
  s->add_option("--node-budget", sim.node_budget, "per-stage node limit, 0 for none");
  s->add_option("--jobs", sim.jobs, "instances simulated concurrently");
  s->add_option("--seed", sim.seed, "recorded in the manifest");
  s->add_option("--out", sim.out, "output directory")->required();

  CompareOptions cmp;
  auto* c = app.add_subcommand("compare", "Compare configurations across instances");
  c->add_option("dirs", cmp.dirs, "simulate output directories")->required();
  c->add_option("--config", cmp.config_path, "key=value config file");
  c->add_option("--alpha", cmp.alpha, "overall significance level (default 0.10)");
  c->add_option("--replications", cmp.replications, "bootstrap replications (default 1000)");
  c->add_option("--strategy", cmp.strategy, "median-p or percentile-u");
  c->add_flag("--uncorrected", cmp.uncorrected, "no Bonferroni correction");
  c->add_option("--jobs", cmp.jobs, "threads for bootstrap replications");
  c->add_option("--seed", cmp.seed, "bootstrap master seed");
  c->add_option("--out", cmp.out, "directory for report.txt and report.tsv");

  ExportOptions ex;
  auto* e = app.add_subcommand("export-lp", "Export a day's batch as an LP file");
  e->add_option("--instance", ex.instance, "instance file")->required();
  e->add_option("--day", ex.day, "simulated day whose batch is exported")->required();
  e->add_option("--config", ex.config_path, "key=value config file");
  e->add_option("--policy", ex.policy, "policy used to rebuild the ledger");
  e->add_option("--objective", ex.objective, "1 breach, 2 JCCO max, 3 JCCO good, 4 waiting");
  e->add_option("--budget-secs", ex.budget_secs, "solver seconds per batch");
  e->add_option("--node-budget", ex.node_budget, "per-stage node limit, 0 for none");
  e->add_option("--out", ex.out, "output LP file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& err) {
    return app.exit(err);
  } catch (const CLI::CallForVersion& err) {
    return app.exit(err);
  } catch (const CLI::ParseError& err) {
    app.exit(err);
    return kUsage;
  }

  try {
    if (*g) cmd_generate(gen);
    else if (*s) cmd_simulate(sim);
    else if (*c) std::cout << cmd_compare(cmp);
    else if (*e) cmd_export_lp(ex);
    return kOk;
  } catch (const std::invalid_argument& err) {
    std::cerr << "usage error: " << err.what() << '\n';
    return kUsage;
  } catch (const DataError& err) {
    std::cerr << "data error: " << err.what() << '\n';
    return kData;
  } catch (const fs::filesystem_error& err) {
    std::cerr << "data error: " << err.what() << '\n';
    return kData;
  } catch (const std::exception& err) {
    std::cerr << "internal error: " << err.what() << '\n';
    return kInternal;
  }
}

}  // namespace rtsched::cli
