// linbandit: experiment runner.
//
//   linbandit run <config> [--seed N] [--replicates N] [--workers N] [--curves] [--out PATH]
//   linbandit verify-simulation [config] [--seed N] [--out PATH]
//   linbandit list-experiments
//   linbandit print-defaults [experiment]
//
// LINBANDIT_WORKERS sets the default worker count.
#include "linbandit/experiments.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace lb = linbandit;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw lb::Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw lb::Error("cannot write " + path);
  out << text;
  if (!out) throw lb::Error("write failed: " + path);
}

unsigned env_workers() {
  const char* v = std::getenv("LINBANDIT_WORKERS");
  if (v == nullptr || *v == '\0') return 1;
  char* end = nullptr;
  const long n = std::strtol(v, &end, 10);
  if (*end != '\0' || n < 1) throw lb::ConfigError("LINBANDIT_WORKERS", "expected a positive integer");
  return static_cast<unsigned>(n);
}

// One line, key=value pairs, on stderr.
void report_error(std::string_view kind, std::string_view key, std::string_view message) {
  std::string msg(message);
  for (char& c : msg) {
    if (c == '\n') c = ' ';
  }
  std::fprintf(stderr, "error: kind=%.*s key=%.*s message=\"%s\"\n", static_cast<int>(kind.size()),
               kind.data(), static_cast<int>(key.size()), key.data(), msg.c_str());
}

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> replicates;
  std::optional<unsigned> workers;
  bool curves = false;
  std::string out;
};

void apply(const Overrides& o, lb::ExperimentConfig& cfg) {
  if (o.seed) cfg.master_seed = *o.seed;
  if (o.replicates) cfg.replicates = *o.replicates;
  cfg.workers = o.workers ? *o.workers : env_workers();
  if (o.curves) cfg.curves = true;
  cfg.validate();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Linear contextual bandit experiments"};
  app.require_subcommand(1);
  Overrides ov;
  auto add_run_flags = [&](CLI::App* sub) {
    sub->add_option("--seed", ov.seed, "master seed");
    sub->add_option("--replicates", ov.replicates, "replicates per (policy, T)");
    sub->add_option("--workers", ov.workers, "worker threads (default: $LINBANDIT_WORKERS or 1)");
    sub->add_flag("--curves", ov.curves, "also write regret / lambda_min curves");
    sub->add_option("--out", ov.out, "CSV path; the summary goes to <out>.summary.json");
  };

  std::string config_path;
  auto* run = app.add_subcommand("run", "run an experiment from a config file");
  run->add_option("config", config_path, "config file")->required();
  add_run_flags(run);

  std::string sim_config;
  auto* sim = app.add_subcommand("verify-simulation", "KS check of the reward-simulation construction");
  sim->add_option("config", sim_config, "optional config (experiment = SimulationVerify)");
  add_run_flags(sim);

  auto* list = app.add_subcommand("list-experiments", "list experiment names");

  std::string defaults_for;
  auto* defaults = app.add_subcommand("print-defaults", "print the default config of an experiment");
  defaults->add_option("experiment", defaults_for, "experiment name (default: all)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    if (code != 0) report_error("usage", "", e.what());
    return code;
  }

  try {
    if (*list) {
      for (auto k : lb::all_experiments()) {
        std::cout << lb::to_string(k) << '\t' << lb::describe(k) << '\n';
      }
      return 0;
    }

    if (*defaults) {
      bool first = true;
      for (auto k : lb::all_experiments()) {
        if (!defaults_for.empty() && lb::to_string(k) != defaults_for) continue;
        if (!first) std::cout << '\n';
        first = false;
        std::cout << lb::render_config(lb::ExperimentConfig::defaults_for(k));
      }
      if (first) throw lb::ConfigError("experiment", "unknown experiment '" + defaults_for + "'");
      return 0;
    }

    if (*sim) {
      lb::ExperimentConfig cfg = sim_config.empty()
                                     ? lb::ExperimentConfig::defaults_for(lb::ExperimentKind::SimulationVerify)
                                     : lb::parse_config(read_file(sim_config));
      if (cfg.experiment != lb::ExperimentKind::SimulationVerify) {
        throw lb::ConfigError("experiment", "verify-simulation needs experiment = SimulationVerify");
      }
      apply(ov, cfg);
      const std::string csv = lb::emit_simulation_csv(lb::verify_simulation(cfg));
      if (ov.out.empty()) {
        std::cout << csv;
      } else {
        write_file(ov.out, csv);
      }
      return 0;
    }

    lb::ExperimentConfig cfg = lb::parse_config(read_file(config_path));
    apply(ov, cfg);
    const lb::ResultTable table = lb::run_experiment(cfg);
    const std::string rows = lb::emit_csv(table.rows);
    const std::string summary = lb::emit_summary_json(table);
    if (ov.out.empty()) {
      std::cout << rows;
      std::cerr << summary;
      if (cfg.curves) std::cerr << lb::emit_curves_csv(table.experiment, table.curves);
    } else {
      write_file(ov.out, rows);
      write_file(ov.out + ".summary.json", summary);
      if (cfg.curves) write_file(ov.out + ".curves.csv", lb::emit_curves_csv(table.experiment, table.curves));
    }
    return 0;
  } catch (const lb::ConfigError& e) {
    report_error("config", e.key(), e.what());
  } catch (const lb::Error& e) {
    report_error("run", "", e.what());
  } catch (const std::exception& e) {
    report_error("internal", "", e.what());
  }
  return 2;
}
