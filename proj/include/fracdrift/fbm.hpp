#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fracdrift/hurst.hpp"

namespace fracdrift {

/// Uniform grid t_k = k * t_final / n_steps, k = 0..n_steps.
class FbmGrid {
 public:
  FbmGrid(double t_final, std::size_t n_steps);

  double t_final() const { return t_final_; }
  std::size_t n_steps() const { return n_steps_; }
  std::size_t size() const { return n_steps_ + 1; }
  double dt() const { return t_final_ / static_cast<double>(n_steps_); }
  double time(std::size_t k) const {
    return t_final_ * static_cast<double>(k) / static_cast<double>(n_steps_);
  }

  bool operator==(const FbmGrid&) const = default;

 private:
  double t_final_;
  std::size_t n_steps_;
};

struct FbmPath {
  FbmGrid grid;
  std::vector<double> values;  // values[0] == 0
};

/// Autocovariance of unit-spacing fractional Gaussian noise at lag k.
double fgn_autocovariance(std::size_t k, HurstParam h);

/// R(s, t) = (s^{2H} + t^{2H} - |t - s|^{2H}) / 2.
double fbm_covariance(double s, double t, HurstParam h);

/// d/dt R(s, t) = H (t^{2H-1} - (t - s)^{2H-1}) for 0 <= s < t.
double partial2_covariance(double s, double t, HurstParam h);

enum class FbmMethod { CirculantEmbedding, Cholesky };

std::string to_string(FbmMethod method);

struct FbmSamplerOptions {
  /// Largest n_steps accepted by the dense Cholesky fallback.
  std::size_t cholesky_max_steps = 4096;
  /// Skip the embedding and use Cholesky directly (testing aid).
  bool force_cholesky = false;
  /// Eigenvalues above -tolerance are clamped to zero.
  double eigen_tolerance = 1e-10;
};

/// Exact-covariance fBm generator for one (grid, H) pair.
///
/// Increments are drawn on the unit-spacing grid and scaled by dt^H. The
/// circulant embedding of the fGn autocovariance is used when its spectrum is
/// nonnegative up to tolerance; otherwise the Toeplitz covariance is factored
/// with a dense Cholesky decomposition.
///
/// sample(seed, index) is a pure function of its arguments, so batches can
/// be generated in any order or in parallel.
class FbmSampler {
 public:
  FbmSampler(FbmGrid grid, HurstParam h, FbmSamplerOptions options = {});
  ~FbmSampler();
  FbmSampler(FbmSampler&&) noexcept;
  FbmSampler& operator=(FbmSampler&&) noexcept;
  FbmSampler(const FbmSampler&) = delete;
  FbmSampler& operator=(const FbmSampler&) = delete;

  FbmMethod method() const { return method_; }
  const FbmGrid& grid() const { return grid_; }
  HurstParam hurst() const { return h_; }
  /// Smallest embedding eigenvalue before clamping.
  double min_eigenvalue() const { return min_eigenvalue_; }

  FbmPath sample(std::uint64_t seed, std::uint64_t index) const;

 private:
  struct FftPlan;

  FbmGrid grid_;
  HurstParam h_;
  FbmMethod method_ = FbmMethod::CirculantEmbedding;
  double min_eigenvalue_ = 0.0;
  std::vector<double> sqrt_eigen_;  // sqrt(lambda_k / M)
  std::unique_ptr<FftPlan> plan_;
  Eigen::MatrixXd cholesky_factor_;
};

struct FbmBatch {
  std::vector<FbmPath> paths;
  FbmMethod method;
};

/// `count` independent paths; path i uses RNG stream (seed, i).
FbmBatch sample_paths(const FbmGrid& grid, HurstParam h, std::size_t count,
                      std::uint64_t seed, FbmSamplerOptions options = {},
                      std::size_t threads = 0);

}  // namespace fracdrift
