#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "fracdrift/fbm.hpp"
#include "fracdrift/hurst.hpp"
#include "fracdrift/model.hpp"

namespace fracdrift {

/// One observed replication: the driving fBm and the solution on its grid.
struct SamplePath {
  FbmGrid grid;
  std::vector<double> b_path;
  std::vector<double> x_path;
  double x0 = 0.0;
  /// Drift parameter used to generate synthetic data, if known.
  std::optional<double> theta0_used;

  double terminal() const { return x_path.back(); }
};

/// Raised when the discrete state leaves the finite range.
class SolverError : public std::runtime_error {
 public:
  SolverError(std::size_t step, double last_state);
  std::size_t step() const { return step_; }
  double last_state() const { return last_state_; }

 private:
  std::size_t step_;
  double last_state_;
};

/// Pathwise solution of dX = theta0 b(X) dt + sigma(X) dB on the grid of `fbm`.
///
/// Step: X += theta0 b dt + sigma dB + sigma sigma' dB^2 / 2. The second-order
/// term reproduces the chain rule of the pathwise integral and vanishes when
/// sigma' == 0, where the step is plain Euler.
SamplePath integrate(const ModelSpec& model, double theta0, double x0, const FbmPath& fbm,
                     HurstParam h);

/// Trapezoidal approximation of int_0^T b(X_s)^2 ds.
double quadratic_drift_functional(const SamplePath& path, const ModelSpec& model);

/// B(X_T) - B(x0) with B' = b: closed form when available, adaptive
/// Gauss-Kronrod quadrature (absolute tolerance 1e-10) otherwise.
double antiderivative_increment(const SamplePath& path, const ModelSpec& model);

/// Numeric fallback used by antiderivative_increment.
double integrate_drift(const ModelSpec& model, double from, double to);

/// Checks that all paths share one grid. Throws std::invalid_argument otherwise.
const FbmGrid& common_grid(const std::vector<SamplePath>& paths);

}  // namespace fracdrift
