#include "fracdrift/fbm.hpp"

#include <cmath>
#include <complex>
#include <mutex>
#include <stdexcept>

#include <fftw3.h>

#include "fracdrift/parallel.hpp"
#include "fracdrift/random.hpp"

namespace fracdrift {

namespace {

// FFTW planning is not thread-safe; execution with new arrays is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

FbmGrid::FbmGrid(double t_final, std::size_t n_steps)
    : t_final_(t_final), n_steps_(n_steps) {
  if (!(t_final > 0.0) || !std::isfinite(t_final)) {
    throw std::invalid_argument("grid horizon must be positive and finite");
  }
  if (n_steps == 0) throw std::invalid_argument("grid needs at least one step");
}

double fgn_autocovariance(std::size_t k, HurstParam h) {
  const double two_h = 2.0 * h.value();
  const double kd = static_cast<double>(k);
  const double below = k == 0 ? 1.0 : std::pow(kd - 1.0, two_h);
  return 0.5 * (std::pow(kd + 1.0, two_h) - 2.0 * std::pow(kd, two_h) + below);
}

double fbm_covariance(double s, double t, HurstParam h) {
  if (s < 0.0 || t < 0.0) throw std::invalid_argument("covariance needs s, t >= 0");
  const double two_h = 2.0 * h.value();
  return 0.5 * (std::pow(s, two_h) + std::pow(t, two_h) - std::pow(std::abs(t - s), two_h));
}

double partial2_covariance(double s, double t, HurstParam h) {
  if (!(s >= 0.0 && s < t)) throw std::invalid_argument("partial2_covariance needs 0 <= s < t");
  const double e = 2.0 * h.value() - 1.0;
  return h.value() * (std::pow(t, e) - std::pow(t - s, e));
}

std::string to_string(FbmMethod method) {
  return method == FbmMethod::CirculantEmbedding ? "circulant_embedding" : "cholesky";
}

struct FbmSampler::FftPlan {
  fftw_plan plan = nullptr;
  explicit FftPlan(std::size_t m) {
    std::vector<std::complex<double>> buf(m);
    auto* p = reinterpret_cast<fftw_complex*>(buf.data());
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    plan = fftw_plan_dft_1d(static_cast<int>(m), p, p, FFTW_FORWARD,
                            FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!plan) throw std::runtime_error("FFTW planning failed");
  }
  ~FftPlan() {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  void execute(std::vector<std::complex<double>>& in,
               std::vector<std::complex<double>>& out) const {
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(in.data()),
                     reinterpret_cast<fftw_complex*>(out.data()));
  }
};

FbmSampler::FbmSampler(FbmGrid grid, HurstParam h, FbmSamplerOptions options)
    : grid_(grid), h_(h) {
  const std::size_t n = grid.n_steps();
  std::vector<double> gamma(n + 1);
  for (std::size_t k = 0; k <= n; ++k) gamma[k] = fgn_autocovariance(k, h);

  bool use_embedding = !options.force_cholesky;
  if (use_embedding) {
    // First row of the 2n circulant: gamma_0..gamma_n, gamma_{n-1}..gamma_1.
    const std::size_t m = 2 * n;
    auto plan = std::make_unique<FftPlan>(m);
    std::vector<std::complex<double>> row(m), eig(m);
    for (std::size_t k = 0; k <= n; ++k) row[k] = gamma[k];
    for (std::size_t k = 1; k < n; ++k) row[m - k] = gamma[k];
    plan->execute(row, eig);
    sqrt_eigen_.resize(m);
    min_eigenvalue_ = eig[0].real();
    for (std::size_t k = 0; k < m; ++k) {
      double lambda = eig[k].real();
      min_eigenvalue_ = std::min(min_eigenvalue_, lambda);
      if (lambda < -options.eigen_tolerance) {
        use_embedding = false;
        break;
      }
      sqrt_eigen_[k] = std::sqrt(std::max(lambda, 0.0) / static_cast<double>(m));
    }
    if (use_embedding) plan_ = std::move(plan);
  }

  if (!use_embedding) {
    method_ = FbmMethod::Cholesky;
    sqrt_eigen_.clear();
    if (n > options.cholesky_max_steps) {
      throw std::length_error("Cholesky fallback refused: n_steps " + std::to_string(n) +
                              " exceeds cap " + std::to_string(options.cholesky_max_steps));
    }
    Eigen::MatrixXd cov(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        cov(i, j) = gamma[i > j ? i - j : j - i];
      }
    }
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) {
      throw std::runtime_error("fGn covariance is not positive definite");
    }
    cholesky_factor_ = llt.matrixL();
  }
}

FbmSampler::~FbmSampler() = default;
FbmSampler::FbmSampler(FbmSampler&&) noexcept = default;
FbmSampler& FbmSampler::operator=(FbmSampler&&) noexcept = default;

FbmPath FbmSampler::sample(std::uint64_t seed, std::uint64_t index) const {
  const std::size_t n = grid_.n_steps();
  auto rng = make_stream(seed, index);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> increments(n);

  if (method_ == FbmMethod::CirculantEmbedding) {
    const std::size_t m = sqrt_eigen_.size();
    std::vector<std::complex<double>> in(m), out(m);
    for (std::size_t k = 0; k < m; ++k) {
      const double re = normal(rng);
      const double im = normal(rng);
      in[k] = sqrt_eigen_[k] * std::complex<double>(re, im);
    }
    plan_->execute(in, out);
    // Real and imaginary parts are independent exact samples; keep the real one.
    for (std::size_t k = 0; k < n; ++k) increments[k] = out[k].real();
  } else {
    Eigen::VectorXd z(n);
    for (std::size_t k = 0; k < n; ++k) z(static_cast<Eigen::Index>(k)) = normal(rng);
    const Eigen::VectorXd x = cholesky_factor_.triangularView<Eigen::Lower>() * z;
    for (std::size_t k = 0; k < n; ++k) increments[k] = x(static_cast<Eigen::Index>(k));
  }

  const double scale = std::pow(grid_.dt(), h_.value());
  FbmPath path{grid_, std::vector<double>(n + 1, 0.0)};
  for (std::size_t k = 0; k < n; ++k) {
    path.values[k + 1] = path.values[k] + scale * increments[k];
  }
  return path;
}

FbmBatch sample_paths(const FbmGrid& grid, HurstParam h, std::size_t count,
                      std::uint64_t seed, FbmSamplerOptions options, std::size_t threads) {
  if (count == 0) throw std::invalid_argument("sample_paths needs count >= 1");
  FbmSampler sampler(grid, h, options);
  FbmBatch batch{std::vector<FbmPath>(count, FbmPath{grid, {}}), sampler.method()};
  parallel_for(count, [&](std::size_t i) { batch.paths[i] = sampler.sample(seed, i); }, threads);
  return batch;
}

}  // namespace fracdrift
