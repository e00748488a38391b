#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fracdrift/fbm.hpp"
#include "fracdrift/hurst.hpp"
#include "fracdrift/kernels.hpp"
#include "fracdrift/model.hpp"
#include "fracdrift/sde.hpp"

namespace fracdrift {

/// D_N == 0: the drift energy vanishes and I_N is undefined.
class DegenerateCohortError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A functional was asked for in the wrong Hurst regime.
class RegimeError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct CohortStats {
  double d_n = 0.0;  // (1/NT) sum int b(X)^2
  double i_n = 0.0;  // sum (B(X_T) - B(x0)) / (N T D_N)
  double m_n = 1.0;  // exp(sup|psi| |I_N| T)
  std::size_t n_paths = 0;
};

/// A set of i.i.d. paths together with the per-path data and weight tables
/// every functional needs. Holds a view of the paths, which must outlive it.
class Cohort {
 public:
  Cohort(std::span<const SamplePath> paths, const ModelSpec& model, HurstParam h,
         std::size_t threads = 0);

  std::span<const SamplePath> paths() const { return paths_; }
  const ModelSpec& model() const { return model_; }
  HurstParam hurst() const { return h_; }
  const FbmGrid& grid() const { return grid_; }
  double t_final() const { return grid_.t_final(); }
  std::size_t size() const { return paths_.size(); }
  std::size_t threads() const { return threads_; }

  const PathKernelData& kernel_data(std::size_t i) const { return data_[i]; }
  /// int_0^T b(X^i)^2 dt.
  double drift_energy(std::size_t i) const { return energy_[i]; }
  /// B(X^i_T) - B(x0).
  double antiderivative_increment(std::size_t i) const { return increment_[i]; }

  /// Weights for |t - s|^{2H-2}; only available in the Young regime.
  const SingularWeights& kernel_weights() const;
  /// Weights for |t - s|^{2H-1}.
  const SingularWeights& vanishing_weights() const { return vanishing_; }

  /// Evaluates fn(i) for every path in parallel and sums in index order.
  double sum_over_paths(const std::function<double(std::size_t)>& fn) const;

 private:
  std::span<const SamplePath> paths_;
  ModelSpec model_;
  HurstParam h_;
  FbmGrid grid_;
  std::size_t threads_;
  std::vector<PathKernelData> data_;
  std::vector<double> energy_;
  std::vector<double> increment_;
  std::vector<SingularWeights> kernel_;  // empty in the rough regime
  SingularWeights vanishing_;
};

/// Throws DegenerateCohortError when D_N == 0.
CohortStats compute_stats(const Cohort& cohort);

/// Theta_N(r) = -alpha_H / (N T D_N) sum_i int int phi(X_t) exp((r + I_N) int_s^t psi)
///              |t - s|^{2H-2} ds dt.
double theta_functional_young(const Cohort& cohort, const CohortStats& stats, double r);

/// Theta~_N(r) = 1 / (N T D_N) sum_i int phi(X_t) Lambda_t(r + I_N) dt.
double theta_functional_rough(const Cohort& cohort, const CohortStats& stats, double r);

/// Dispatches on the regime of the cohort.
double theta_functional(const Cohort& cohort, const CohortStats& stats, double r);

struct GateReport {
  bool passed = false;
  double lhs = 0.0;  // T^{2H} M_N / D_N
  double rhs = 0.0;  // c / (alpha_bar_H sup|phi| sup|psi|), +inf if a sup norm is 0
};

GateReport gate_delta(const CohortStats& stats, const ModelSpec& model, HurstParam h,
                      double t_final, double c_contraction);

struct FixedPointResult {
  double value = 0.0;
  std::size_t iterations = 0;
  double final_step = 0.0;
  bool converged = false;
  /// Largest |r_{k+2} - r_{k+1}| / |r_{k+1} - r_k| over steps above 1e3 * tol.
  double max_step_ratio = 0.0;
};

/// Picard iteration r_{k+1} = max(0, f(r_k)) from r_0 = 0.
FixedPointResult fixed_point(const std::function<double(double)>& functional, double tol = 1e-10,
                             std::size_t max_iter = 200);

struct EstimatorOptions {
  double c_contraction = 0.5;
  double d_trunc = 0.05;
  double tol = 1e-10;
  std::size_t max_iter = 200;
};

struct EstimationResult {
  CohortStats stats;
  GateReport gate;
  double r_n = 0.0;
  double theta_bar = 0.0;
  bool gate_passed = false;
  double theta_bar_gated = 0.0;
  double theta_bar_truncated = 0.0;
  std::size_t iterations = 0;
  double final_step = 0.0;
  bool converged = false;
  double max_step_ratio = 0.0;
  Regime regime = Regime::Young;
  /// I_N < 0: the iteration still runs on [0, inf) but the contraction
  /// argument for the rough functional does not cover this case.
  bool negative_i_n = false;
};

/// Stats, gate, Picard iteration and the gated / truncated estimators.
/// The iteration runs even when the gate fails so theta_bar stays available.
EstimationResult estimate(const Cohort& cohort, const EstimatorOptions& options = {});

/// max |f(r_k) - f(r_l)| / |r_k - r_l| over all pairs of the grid.
double empirical_lipschitz(const std::function<double(double)>& functional,
                           std::span<const double> grid);

std::string to_json(const EstimationResult& result, int indent = 2);

}  // namespace fracdrift
