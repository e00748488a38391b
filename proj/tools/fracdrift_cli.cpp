#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "fracdrift/estimator.hpp"
#include "fracdrift/experiment.hpp"
#include "fracdrift/path_io.hpp"

namespace fs = std::filesystem;
using namespace fracdrift;

namespace {

enum ExitCode {
  kOk = 0,
  kConfigError = 2,
  kParseError = 3,
  kGateFailed = 4,
  kDegenerate = 5,
  kNotConverged = 6,
  kRuntimeError = 7,
};

struct Overrides {
  std::string config_file;
  std::optional<std::string> model;
  std::optional<double> hurst;
  std::optional<std::size_t> paths;
  std::optional<std::size_t> reps;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<double> theta_max;
  std::optional<std::size_t> threads;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_file, "JSON experiment config");
  cmd->add_option("--model", o.model, "A, B, C or custom");
  cmd->add_option("--hurst", o.hurst, "Hurst parameter");
  cmd->add_option("--paths", o.paths, "paths per cohort");
  cmd->add_option("--reps", o.reps, "repetitions");
  cmd->add_option("--seed", o.seed, "master seed");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--theta-max", o.theta_max, "upper bound on theta (rough regime)");
  cmd->add_option("--threads", o.threads, "worker threads (0 = all cores)");
}

ExperimentConfig resolve_config(const Overrides& o) {
  ExperimentConfig c = o.config_file.empty() ? ExperimentConfig{} : load_config(o.config_file);
  if (o.model) {
    c.model = *o.model;
    c.table_models.clear();
  }
  if (o.hurst) {
    c.h = *o.hurst;
    c.table_hurst.clear();
  }
  if (o.paths) c.n_paths = *o.paths;
  if (o.reps) c.repetitions = *o.reps;
  if (o.seed) c.seed = *o.seed;
  if (o.out) c.output_dir = *o.out;
  if (o.theta_max) c.theta_max = *o.theta_max;
  if (o.threads) c.threads = *o.threads;
  c.validate();
  return c;
}

void write_text(const fs::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  out << text;
}

int cmd_simulate(const ExperimentConfig& c) {
  const ModelSpec model = resolve_model(c.model, c);
  const HurstParam h(c.h);
  const FbmGrid grid(c.t_final, c.n_steps);
  const SimulatedCohort sim =
      simulate_cohort(model, h, c.theta0, c.x0, grid, c.n_paths, c.seed, c.threads);
  fs::create_directories(c.output_dir);
  write_paths_csv((fs::path(c.output_dir) / "paths.csv").string(), sim.paths);
  auto manifest = manifest_json(c, "simulate");
  manifest["generator"] = to_string(sim.method);
  manifest["paths_file"] = "paths.csv";
  write_text(fs::path(c.output_dir) / "manifest.json", manifest.dump(2) + "\n");
  return kOk;
}

int cmd_estimate(const ExperimentConfig& c, const std::string& data_file) {
  const HurstParam h(c.h);
  if (h.regime() == Regime::Rough && !c.theta_max)
    throw ConfigError("theta_max is required to estimate in the rough regime (H <= 1/2)");
  const ModelSpec model = resolve_model(c.model, c);
  std::vector<SamplePath> paths;
  try {
    paths = read_paths_csv(data_file);
  } catch (const PathParseError& e) {
    std::cerr << "parse error in " << data_file << ": " << e.what() << "\n";
    return kParseError;
  }
  const Cohort cohort(paths, model, h, c.threads);
  EstimatorOptions options;
  options.c_contraction = c.c_contraction;
  options.d_trunc = c.d_trunc;
  CohortAnalysis analysis;
  try {
    analysis = analyze_cohort(cohort, options, c.alpha_level, c.theta_max);
  } catch (const DegenerateCohortError& e) {
    std::cerr << "degenerate cohort: " << e.what() << "\n";
    return kDegenerate;
  }
  fs::create_directories(c.output_dir);
  auto results = results_json(c, analysis);
  results["data_file"] = data_file;
  write_text(fs::path(c.output_dir) / "results.json", results.dump(2) + "\n");
  if (!analysis.result.converged) {
    std::cerr << "fixed-point iteration did not converge\n";
    return kNotConverged;
  }
  if (!analysis.result.gate_passed) {
    std::cerr << "contraction gate failed: " << analysis.result.gate.lhs << " > "
              << analysis.result.gate.rhs << "\n";
    return kGateFailed;
  }
  return kOk;
}

int cmd_table1(const ExperimentConfig& c) {
  const ExperimentReport report = run_table1(c);
  fs::create_directories(c.output_dir);
  {
    std::ofstream rows(fs::path(c.output_dir) / "table1_rows.csv", std::ios::binary);
    write_table1_rows_csv(rows, report.rows);
    std::ofstream summary(fs::path(c.output_dir) / "table1_summary.csv", std::ios::binary);
    write_table1_summary_csv(summary, report.cells);
  }
  write_text(fs::path(c.output_dir) / "manifest.json", manifest_json(c, "table1").dump(2) + "\n");
  write_table1_summary_csv(std::cout, report.cells);
  return kOk;
}

int cmd_aci_sweep(const ExperimentConfig& c) {
  const std::vector<SweepRow> rows = run_aci_sweep(c);
  fs::create_directories(c.output_dir);
  {
    std::ofstream out(fs::path(c.output_dir) / "aci_sweep.csv", std::ios::binary);
    write_sweep_csv(out, rows);
  }
  write_text(fs::path(c.output_dir) / "manifest.json",
             manifest_json(c, "aci-sweep").dump(2) + "\n");
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Drift estimation for SDEs driven by fractional Brownian motion"};
  app.require_subcommand(1);
  Overrides o;
  std::string data_file;
  CLI::App* simulate = app.add_subcommand("simulate", "simulate a path dataset");
  CLI::App* estimate = app.add_subcommand("estimate", "estimate theta from a path dataset");
  CLI::App* table1 = app.add_subcommand("table1", "Monte Carlo error table");
  CLI::App* sweep = app.add_subcommand("aci-sweep", "estimator and interval for N = 1..n_paths");
  for (CLI::App* cmd : {simulate, estimate, table1, sweep}) add_common(cmd, o);
  estimate->add_option("--data", data_file, "paths CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    const ExperimentConfig config = resolve_config(o);
    if (simulate->parsed()) return cmd_simulate(config);
    if (estimate->parsed()) return cmd_estimate(config, data_file);
    if (table1->parsed()) return cmd_table1(config);
    return cmd_aci_sweep(config);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
}
