#include "fracdrift/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>

#include "fracdrift/parallel.hpp"
#include "fracdrift/random.hpp"

namespace fracdrift {

namespace {

const std::vector<double> kLipschitzGrid{0.0, 0.5, 1.0, 2.0, 4.0};

std::string real_field(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <typename T>
T read_field(const nlohmann::json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config field '") + key + "': " + e.what());
  }
}

CustomModelConfig custom_from_json(const nlohmann::json& j) {
  static const std::set<std::string> known{"drift",     "slope",     "diffusion",
                                           "level",     "amplitude", "domain_lo",
                                           "domain_hi", "numeric_antiderivative"};
  for (const auto& item : j.items())
    if (!known.count(item.key())) throw ConfigError("unknown custom model field '" + item.key() + "'");
  CustomModelConfig c;
  c.drift = read_field(j, "drift", c.drift);
  c.slope = read_field(j, "slope", c.slope);
  c.diffusion = read_field(j, "diffusion", c.diffusion);
  c.level = read_field(j, "level", c.level);
  c.amplitude = read_field(j, "amplitude", c.amplitude);
  c.domain_lo = read_field(j, "domain_lo", c.domain_lo);
  c.domain_hi = read_field(j, "domain_hi", c.domain_hi);
  c.numeric_antiderivative = read_field(j, "numeric_antiderivative", c.numeric_antiderivative);
  return c;
}

std::optional<double> harness_theta_max(const ExperimentConfig& config, HurstParam h) {
  if (h.regime() == Regime::Young) return config.theta_max;
  if (config.theta_max) return config.theta_max;
  std::cerr << "warning: theta_max not set for H = " << h.value()
            << "; the rough-regime interval uses theta_max = 10\n";
  return 10.0;
}

EstimatorOptions estimator_options(const ExperimentConfig& config) {
  EstimatorOptions o;
  o.c_contraction = config.c_contraction;
  o.d_trunc = config.d_trunc;
  return o;
}

}  // namespace

void ExperimentConfig::validate() const {
  auto check_h = [](double v) {
    if (!(v > 1.0 / 3.0 && v < 1.0)) throw ConfigError("Hurst parameter must lie in (1/3, 1)");
  };
  check_h(h);
  for (double v : table_hurst) check_h(v);
  auto check_model = [this](const std::string& m) {
    if (m != "A" && m != "B" && m != "C" && m != "custom")
      throw ConfigError("model must be A, B, C or custom, got '" + m + "'");
    if (m == "custom" && !custom_model) throw ConfigError("model 'custom' needs a custom_model block");
  };
  check_model(model);
  for (const auto& m : table_models) check_model(m);
  if (!std::isfinite(theta0)) throw ConfigError("theta0 must be finite");
  if (!(t_final > 0.0)) throw ConfigError("t_final must be positive");
  if (!std::isfinite(x0)) throw ConfigError("x0 must be finite");
  if (n_steps < 2) throw ConfigError("n_steps must be at least 2");
  if (n_paths < 1) throw ConfigError("n_paths must be at least 1");
  if (repetitions < 1) throw ConfigError("repetitions must be at least 1");
  if (!(c_contraction > 0.0 && c_contraction < 1.0)) throw ConfigError("c_contraction must lie in (0, 1)");
  if (!(d_trunc > 0.0)) throw ConfigError("d_trunc must be positive");
  if (theta_max && !(*theta_max > 0.0)) throw ConfigError("theta_max must be positive");
  if (!(alpha_level > 0.0 && alpha_level < 1.0)) throw ConfigError("alpha_level must lie in (0, 1)");
  if (output_dir.empty()) throw ConfigError("output_dir must not be empty");
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::set<std::string> known{
      "model",       "custom_model",  "h",           "theta0",       "t_final",
      "x0",          "n_steps",       "n_paths",     "repetitions",  "seed",
      "c_contraction", "d_trunc",     "theta_max",   "alpha_level",  "output_dir",
      "table_models", "table_hurst",  "check_contraction", "threads", "schema_version"};
  for (const auto& item : j.items())
    if (!known.count(item.key())) throw ConfigError("unknown config field '" + item.key() + "'");
  ExperimentConfig c;
  if (j.contains("model") && j.at("model").is_object()) {
    c.model = "custom";
    c.custom_model = custom_from_json(j.at("model"));
  } else {
    c.model = read_field(j, "model", c.model);
  }
  if (j.contains("custom_model")) c.custom_model = custom_from_json(j.at("custom_model"));
  c.h = read_field(j, "h", c.h);
  c.theta0 = read_field(j, "theta0", c.theta0);
  c.t_final = read_field(j, "t_final", c.t_final);
  c.x0 = read_field(j, "x0", c.x0);
  c.n_steps = read_field(j, "n_steps", c.n_steps);
  c.n_paths = read_field(j, "n_paths", c.n_paths);
  c.repetitions = read_field(j, "repetitions", c.repetitions);
  c.seed = read_field(j, "seed", c.seed);
  c.c_contraction = read_field(j, "c_contraction", c.c_contraction);
  c.d_trunc = read_field(j, "d_trunc", c.d_trunc);
  if (j.contains("theta_max") && !j.at("theta_max").is_null())
    c.theta_max = read_field(j, "theta_max", 0.0);
  c.alpha_level = read_field(j, "alpha_level", c.alpha_level);
  c.output_dir = read_field(j, "output_dir", c.output_dir);
  c.table_models = read_field(j, "table_models", c.table_models);
  c.table_hurst = read_field(j, "table_hurst", c.table_hurst);
  c.check_contraction = read_field(j, "check_contraction", c.check_contraction);
  c.threads = read_field(j, "threads", c.threads);
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open config " + file);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config " + file + " is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

nlohmann::ordered_json to_json(const ExperimentConfig& c) {
  nlohmann::ordered_json j;
  j["model"] = c.model;
  if (c.custom_model) {
    const auto& m = *c.custom_model;
    j["custom_model"] = {{"drift", m.drift},         {"slope", m.slope},
                         {"diffusion", m.diffusion}, {"level", m.level},
                         {"amplitude", m.amplitude}, {"domain_lo", m.domain_lo},
                         {"domain_hi", m.domain_hi}, {"numeric_antiderivative", m.numeric_antiderivative}};
  }
  j["h"] = c.h;
  j["theta0"] = c.theta0;
  j["t_final"] = c.t_final;
  j["x0"] = c.x0;
  j["n_steps"] = c.n_steps;
  j["n_paths"] = c.n_paths;
  j["repetitions"] = c.repetitions;
  j["seed"] = c.seed;
  j["c_contraction"] = c.c_contraction;
  j["d_trunc"] = c.d_trunc;
  j["theta_max"] = c.theta_max ? nlohmann::ordered_json(*c.theta_max) : nlohmann::ordered_json(nullptr);
  j["alpha_level"] = c.alpha_level;
  j["output_dir"] = c.output_dir;
  j["table_models"] = c.table_models;
  j["table_hurst"] = c.table_hurst;
  j["check_contraction"] = c.check_contraction;
  return j;
}

ModelSpec resolve_model(const std::string& name, const ExperimentConfig& config) {
  if (name == "custom") {
    if (!config.custom_model) throw ConfigError("model 'custom' needs a custom_model block");
    return make_custom_model(*config.custom_model);
  }
  try {
    return model_by_name(name);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

SimulatedCohort simulate_cohort(const ModelSpec& model, HurstParam h, double theta0, double x0,
                                const FbmGrid& grid, std::size_t n_paths, std::uint64_t seed,
                                std::size_t threads) {
  FbmBatch batch = sample_paths(grid, h, n_paths, seed, {}, threads);
  std::vector<std::optional<SamplePath>> solved(n_paths);
  parallel_for(
      n_paths, [&](std::size_t i) { solved[i] = integrate(model, theta0, x0, batch.paths[i], h); },
      threads);
  SimulatedCohort out{{}, batch.method};
  out.paths.reserve(n_paths);
  for (auto& p : solved) out.paths.push_back(std::move(*p));
  return out;
}

CohortAnalysis analyze_cohort(const Cohort& cohort, const EstimatorOptions& options,
                              double alpha_level, std::optional<double> theta_max) {
  CohortAnalysis a;
  a.result = estimate(cohort, options);
  if (!a.result.gate_passed) return a;
  const double level = 1.0 - alpha_level;
  if (cohort.hurst().regime() == Regime::Young) {
    a.interval = build_interval(a.result, VarianceProxy::YoungProxy, compute_y_n(cohort),
                                cohort.size(), level);
  } else {
    if (!theta_max) throw ConfigError("theta_max is required for H <= 1/2");
    a.interval = build_interval(a.result, VarianceProxy::RoughProxy,
                                compute_frak_y_n(cohort, *theta_max), cohort.size(), level);
  }
  return a;
}

CellSummary summarize(const std::vector<RepetitionRow>& rows, const std::string& model, double h,
                      std::size_t n_paths) {
  CellSummary s;
  s.model = model;
  s.h = h;
  s.n_paths = n_paths;
  std::vector<double> errors;
  for (const auto& row : rows) {
    if (row.model != model || row.h != h || row.n_paths != n_paths) continue;
    ++s.repetitions;
    if (row.status != "ok") {
      ++s.failed;
      continue;
    }
    ++s.completed;
    errors.push_back(row.abs_error);
    if (row.result.gate_passed) ++s.gate_passed;
    if (row.interval) {
      ++s.with_interval;
      if (row.covered) ++s.covered;
    }
  }
  if (!errors.empty()) {
    double sum = 0.0;
    for (double e : errors) sum += e;
    s.mean_abs_error = sum / static_cast<double>(errors.size());
    if (errors.size() > 1) {
      double sq = 0.0;
      for (double e : errors) sq += (e - s.mean_abs_error) * (e - s.mean_abs_error);
      s.std_abs_error = std::sqrt(sq / static_cast<double>(errors.size() - 1));
    }
    s.gate_pass_rate = static_cast<double>(s.gate_passed) / static_cast<double>(s.completed);
  } else {
    s.mean_abs_error = s.std_abs_error = std::nan("");
  }
  s.coverage_rate = s.with_interval > 0
                        ? static_cast<double>(s.covered) / static_cast<double>(s.with_interval)
                        : std::nan("");
  return s;
}

ExperimentReport run_table1(const ExperimentConfig& config) {
  config.validate();
  const std::vector<std::string> models =
      config.table_models.empty() ? std::vector<std::string>{config.model} : config.table_models;
  const std::vector<double> hursts =
      config.table_hurst.empty() ? std::vector<double>{config.h} : config.table_hurst;
  const FbmGrid grid(config.t_final, config.n_steps);
  const EstimatorOptions options = estimator_options(config);

  ExperimentReport report;
  for (const auto& name : models) {
    const ModelSpec model = resolve_model(name, config);
    for (double hv : hursts) {
      const HurstParam h(hv);
      const std::optional<double> theta_max = harness_theta_max(config, h);
      std::vector<RepetitionRow> rows(config.repetitions);
      parallel_for(
          config.repetitions,
          [&](std::size_t rep) {
            RepetitionRow& row = rows[rep];
            row.model = name;
            row.h = hv;
            row.n_paths = config.n_paths;
            row.rep = rep;
            row.seed = stream_seed(config.seed, rep);
            try {
              const SimulatedCohort sim = simulate_cohort(model, h, config.theta0, config.x0, grid,
                                                          config.n_paths, row.seed, 1);
              const Cohort cohort(sim.paths, model, h, 1);
              CohortAnalysis a = analyze_cohort(cohort, options, config.alpha_level, theta_max);
              row.result = a.result;
              row.interval = a.interval;
              row.abs_error = std::abs(row.result.theta_bar - config.theta0);
              row.covered = row.interval && row.interval->contains(config.theta0);
              if (config.check_contraction) {
                const CohortStats& stats = row.result.stats;
                auto f = [&](double r) { return theta_functional(cohort, stats, r); };
                row.lipschitz = empirical_lipschitz(f, kLipschitzGrid);
                row.residual = std::abs(std::max(0.0, f(row.result.r_n)) - row.result.r_n);
              }
            } catch (const DegenerateCohortError&) {
              row.status = "degenerate";
            } catch (const SolverError&) {
              row.status = "solver_error";
            }
          },
          config.threads);
      for (const auto& row : rows)
        if (row.status != "ok")
          std::cerr << "repetition " << row.rep << " of cell (" << name << ", H=" << hv
                    << ") failed: " << row.status << "\n";
      report.cells.push_back(summarize(rows, name, hv, config.n_paths));
      report.rows.insert(report.rows.end(), rows.begin(), rows.end());
    }
  }
  return report;
}

std::vector<SweepRow> aci_sweep(std::span<const SamplePath> paths, const ModelSpec& model,
                                HurstParam h, const EstimatorOptions& options,
                                double alpha_level, std::optional<double> theta_max,
                                std::size_t threads) {
  std::vector<SweepRow> rows;
  rows.reserve(paths.size());
  for (std::size_t n = 1; n <= paths.size(); ++n) {
    SweepRow row;
    row.n = n;
    const Cohort cohort(paths.first(n), model, h, threads);
    try {
      CohortAnalysis a = analyze_cohort(cohort, options, alpha_level, theta_max);
      row.theta_bar = a.result.theta_bar;
      row.gate = a.result.gate_passed;
      row.interval = a.interval;
    } catch (const DegenerateCohortError&) {
      row.theta_bar = std::nan("");
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<SweepRow> run_aci_sweep(const ExperimentConfig& config) {
  config.validate();
  const ModelSpec model = resolve_model(config.model, config);
  const HurstParam h(config.h);
  const FbmGrid grid(config.t_final, config.n_steps);
  const SimulatedCohort sim = simulate_cohort(model, h, config.theta0, config.x0, grid,
                                              config.n_paths, config.seed, config.threads);
  return aci_sweep(sim.paths, model, h, estimator_options(config), config.alpha_level,
                   harness_theta_max(config, h), config.threads);
}

void write_table1_rows_csv(std::ostream& out, const std::vector<RepetitionRow>& rows) {
  out << "model,h,n_paths,rep,seed,status,theta_bar,abs_error,d_n,i_n,gate,theta_bar_gated,"
         "theta_bar_truncated,iterations,converged,ci_lo,ci_hi,covered,lipschitz,residual\n";
  const double nan = std::nan("");
  for (const auto& r : rows) {
    const bool ok = r.status == "ok";
    out << r.model << ',' << real_field(r.h) << ',' << r.n_paths << ',' << r.rep << ',' << r.seed
        << ',' << r.status << ',' << real_field(ok ? r.result.theta_bar : nan) << ','
        << real_field(ok ? r.abs_error : nan) << ',' << real_field(ok ? r.result.stats.d_n : nan)
        << ',' << real_field(ok ? r.result.stats.i_n : nan) << ','
        << (ok && r.result.gate_passed ? 1 : 0) << ','
        << real_field(ok ? r.result.theta_bar_gated : nan) << ','
        << real_field(ok ? r.result.theta_bar_truncated : nan) << ',' << r.result.iterations << ','
        << (r.result.converged ? 1 : 0) << ','
        << real_field(r.interval ? r.interval->lower() : nan) << ','
        << real_field(r.interval ? r.interval->upper() : nan) << ',' << (r.covered ? 1 : 0) << ','
        << real_field(r.lipschitz.value_or(nan)) << ',' << real_field(r.residual.value_or(nan))
        << '\n';
  }
}

void write_table1_summary_csv(std::ostream& out, const std::vector<CellSummary>& cells) {
  out << "model,h,n_paths,repetitions,completed,failed,gate_pass_rate,mean_abs_error,"
         "std_abs_error,coverage_rate\n";
  for (const auto& c : cells) {
    out << c.model << ',' << real_field(c.h) << ',' << c.n_paths << ',' << c.repetitions << ','
        << c.completed << ',' << c.failed << ',' << real_field(c.gate_pass_rate) << ','
        << real_field(c.mean_abs_error) << ',' << real_field(c.std_abs_error) << ','
        << real_field(c.coverage_rate) << '\n';
  }
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "N,theta_bar,ci_lo,ci_hi,gate\n";
  const double nan = std::nan("");
  for (const auto& r : rows) {
    out << r.n << ',' << real_field(r.theta_bar) << ','
        << real_field(r.interval ? r.interval->lower() : nan) << ','
        << real_field(r.interval ? r.interval->upper() : nan) << ',' << (r.gate ? 1 : 0) << '\n';
  }
}

nlohmann::ordered_json results_json(const ExperimentConfig& config, const CohortAnalysis& a) {
  nlohmann::ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["config"] = to_json(config);
  j["estimation"] = nlohmann::ordered_json::parse(to_json(a.result, -1));
  j["interval"] = a.interval ? nlohmann::ordered_json::parse(to_json(*a.interval, -1))
                             : nlohmann::ordered_json(nullptr);
  return j;
}

nlohmann::ordered_json manifest_json(const ExperimentConfig& config, const std::string& command) {
  nlohmann::ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = command;
  j["config"] = to_json(config);
  return j;
}

}  // namespace fracdrift
