#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "fracdrift/estimator.hpp"
#include "fracdrift/fbm.hpp"
#include "fracdrift/inference.hpp"
#include "fracdrift/model.hpp"
#include "fracdrift/sde.hpp"

namespace fracdrift {

inline constexpr int kSchemaVersion = 1;

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ExperimentConfig {
  /// "A", "B", "C" or "custom" (then custom_model is used).
  std::string model = "A";
  std::optional<CustomModelConfig> custom_model;
  double h = 0.7;
  double theta0 = 1.0;
  double t_final = 1.0;
  double x0 = 1.0;
  std::size_t n_steps = 500;
  std::size_t n_paths = 50;
  std::size_t repetitions = 100;
  std::uint64_t seed = 1;
  double c_contraction = 0.5;
  double d_trunc = 0.05;
  std::optional<double> theta_max;
  double alpha_level = 0.05;
  std::string output_dir = "out";
  /// Cells of the table1 command; empty means the single cell (model, h).
  std::vector<std::string> table_models;
  std::vector<double> table_hurst;
  /// Also record the empirical Lipschitz constant and fixed-point residual per repetition.
  bool check_contraction = false;
  std::size_t threads = 0;

  /// Throws ConfigError on out-of-range fields.
  void validate() const;
};

ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& file);
nlohmann::ordered_json to_json(const ExperimentConfig& config);

ModelSpec resolve_model(const std::string& name, const ExperimentConfig& config);

struct SimulatedCohort {
  std::vector<SamplePath> paths;
  FbmMethod method;
};

/// n_paths solutions of the SDE driven by the fBm streams (seed, 0..n_paths-1).
SimulatedCohort simulate_cohort(const ModelSpec& model, HurstParam h, double theta0, double x0,
                                const FbmGrid& grid, std::size_t n_paths, std::uint64_t seed,
                                std::size_t threads = 0);

/// Estimation plus the matching interval (when the gate passes).
struct CohortAnalysis {
  EstimationResult result;
  std::optional<ConfidenceInterval> interval;
};

/// theta_max is required in the rough regime.
CohortAnalysis analyze_cohort(const Cohort& cohort, const EstimatorOptions& options,
                              double alpha_level, std::optional<double> theta_max);

struct RepetitionRow {
  std::string model;
  double h = 0.0;
  std::size_t n_paths = 0;
  std::size_t rep = 0;
  std::uint64_t seed = 0;
  /// "ok", "degenerate" or "solver_error".
  std::string status = "ok";
  EstimationResult result;
  std::optional<ConfidenceInterval> interval;
  double abs_error = 0.0;
  bool covered = false;
  std::optional<double> lipschitz;
  std::optional<double> residual;
};

struct CellSummary {
  std::string model;
  double h = 0.0;
  std::size_t n_paths = 0;
  std::size_t repetitions = 0;
  std::size_t completed = 0;
  std::size_t failed = 0;
  std::size_t gate_passed = 0;
  std::size_t with_interval = 0;
  std::size_t covered = 0;
  double mean_abs_error = 0.0;
  double std_abs_error = 0.0;
  double gate_pass_rate = 0.0;
  /// Covered intervals over intervals built (gated repetitions).
  double coverage_rate = 0.0;
};

struct ExperimentReport {
  std::vector<RepetitionRow> rows;
  std::vector<CellSummary> cells;
};

/// Rows of one (model, h) cell aggregated; mean and sample StD of |theta_bar - theta0|
/// over completed repetitions.
CellSummary summarize(const std::vector<RepetitionRow>& rows, const std::string& model, double h,
                      std::size_t n_paths);

/// Every cell of the table runs `repetitions` cohorts of n_paths paths. Repetition r
/// uses master seed stream_seed(seed, r) in every cell.
ExperimentReport run_table1(const ExperimentConfig& config);

struct SweepRow {
  std::size_t n = 0;
  double theta_bar = 0.0;
  bool gate = false;
  std::optional<ConfidenceInterval> interval;
};

/// theta_bar_N and its interval for N = 1..n_paths on one dataset.
std::vector<SweepRow> run_aci_sweep(const ExperimentConfig& config);
std::vector<SweepRow> aci_sweep(std::span<const SamplePath> paths, const ModelSpec& model,
                                HurstParam h, const EstimatorOptions& options,
                                double alpha_level, std::optional<double> theta_max,
                                std::size_t threads = 0);

void write_table1_rows_csv(std::ostream& out, const std::vector<RepetitionRow>& rows);
void write_table1_summary_csv(std::ostream& out, const std::vector<CellSummary>& cells);
/// Columns N,theta_bar,ci_lo,ci_hi,gate.
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

/// Results document of the estimate command.
nlohmann::ordered_json results_json(const ExperimentConfig& config, const CohortAnalysis& analysis);

/// Config echo plus run metadata shared by every manifest.
nlohmann::ordered_json manifest_json(const ExperimentConfig& config, const std::string& command);

}  // namespace fracdrift
