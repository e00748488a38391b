#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "fracdrift/fbm.hpp"
#include "fracdrift/hurst.hpp"
#include "fracdrift/model.hpp"
#include "fracdrift/sde.hpp"

namespace fracdrift {

/// P[k] = int_0^{t_k} psi(X_u) du by the trapezoid rule; P[0] = 0.
std::vector<double> psi_prefix(const SamplePath& path, const ModelSpec& model);

/// Per-path values reused by every kernel evaluation.
struct PathKernelData {
  std::vector<double> phi;     // phi(X_{t_k})
  std::vector<double> psi;     // psi(X_{t_k})
  std::vector<double> prefix;  // psi_prefix
};

PathKernelData prepare_kernel_data(const SamplePath& path, const ModelSpec& model);

/// D_s X_t = sigma(X_t) exp(theta0 int_s^t psi(X_u) du) 1_{s < t}.
double malliavin_derivative(const SamplePath& path, const ModelSpec& model,
                            std::span<const double> prefix, double theta0,
                            std::size_t s_idx, std::size_t t_idx);
double malliavin_derivative(const SamplePath& path, const ModelSpec& model, double theta0,
                            std::size_t s_idx, std::size_t t_idx);

/// exp(theta int_s^t psi), s_idx <= t_idx.
double lambda_bar(std::span<const double> prefix, double theta, std::size_t s_idx,
                  std::size_t t_idx);
/// lambda_bar - 1, computed with expm1.
double lambda(std::span<const double> prefix, double theta, std::size_t s_idx, std::size_t t_idx);

/// L(s, t) = phi(X_t) lambda(s, t) for s < t, zero otherwise.
double l_kernel(std::span<const double> phi, std::span<const double> prefix, double theta,
                std::size_t s_idx, std::size_t t_idx);

/// Product-integration weights for the kernel u^gamma, u = t_j - s.
///
/// For a target node t_j, sum_i w_{j,i} g(t_i) equals the exact integral
/// int_0^{t_j} G(s) (t_j - s)^gamma ds of the piecewise-linear interpolant G
/// of g. On a uniform grid the weights depend only on j - i, except at the
/// endpoint i = 0, so two tables of length n_steps describe all targets.
class SingularWeights {
 public:
  SingularWeights(const FbmGrid& grid, double gamma);

  double gamma() const { return gamma_; }
  std::size_t n_steps() const { return near_.size(); }
  double dt() const { return dt_; }

  /// w_{j,i} for 0 <= i <= j.
  double weight(std::size_t j, std::size_t i) const;
  /// sum_i w_{j,i} = t_j^{gamma+1} / (gamma + 1).
  double mass(std::size_t j) const;
  /// sum_{i <= j} w_{j,i} g[i].
  double integrate_to(std::size_t j, std::span<const double> g) const;
  /// sum_{i >= j} of the mirrored weights: int_{t_j}^T G(s) (s - t_j)^gamma ds.
  double integrate_from(std::size_t j, std::span<const double> g) const;
  /// int_0^T G(t) t^gamma dt for the interpolant G of g.
  double integrate_from_origin(std::span<const double> g) const;

 private:
  double gamma_;
  double dt_;
  std::vector<double> near_;  // cell m, node at distance m
  std::vector<double> far_;   // cell m, node at distance m + 1
};

/// Exact double integral int int G(s) G(t) |t - s|^gamma ds dt over [0, T]^2
/// for the piecewise-linear interpolant G of node values g.
///
/// Each pair of cells contributes a bilinear form in the four endpoint values
/// whose coefficients depend only on the cell distance.
class SquareKernelWeights {
 public:
  SquareKernelWeights(const FbmGrid& grid, double gamma);

  double gamma() const { return gamma_; }
  double integrate(std::span<const double> g) const;

 private:
  double gamma_;
  double scale_;  // dt^{2 + gamma}
  // coef_[m][2p + q] = int int l_p(x) l_q(y) |m + y - x|^gamma dx dy over [0,1]^2,
  // l_0 = 1 - x, l_1 = x; x runs over the earlier cell.
  std::vector<std::array<double, 4>> coef_;
};

/// Weights for |t - s|^{2H-2} times an integrand vanishing like
/// (t - s)^vanishing_order at the diagonal; the caller passes the integrand
/// divided by that power. Rejects 2H - 2 + vanishing_order <= -1.
SingularWeights build_singular_weights(const FbmGrid& grid, HurstParam h,
                                       double vanishing_order = 0.0);

/// inner[j] = sum_{i <= j} w_{j,i} exp(theta (P[j] - P[i])) with `weights`
/// built for 2H - 2 (Young regime).
std::vector<double> exp_kernel_inner(std::span<const double> prefix, double theta,
                                     const SingularWeights& weights);

/// C[j] = int_0^{t_j} (1 - exp(theta int_s^{t_j} psi)) |t_j - s|^{2H-2} ds,
/// evaluated with weights of exponent 2H - 1 on the integrand divided by
/// (t_j - s); the diagonal value is the Taylor limit -theta psi(X_{t_j}).
std::vector<double> lambda_correction(const PathKernelData& data, double theta,
                                      const SingularWeights& weights_vanishing);

/// Lambda_t(theta) = -H t^{2H-1} + alpha_H C(t) at grid index t_idx > 0.
/// At t_idx = 0 this is -H 0^{2H-1}: -inf for H < 1/2, -1/2 for H = 1/2.
double big_lambda(const PathKernelData& data, double theta, std::size_t t_idx, HurstParam h,
                  const SingularWeights& weights_vanishing);

/// int_0^T phi(X_t) Lambda_t(theta) dt. The t^{2H-1} part is product-integrated,
/// the correction part uses the trapezoid rule.
double phi_lambda_integral(const PathKernelData& data, double theta, HurstParam h,
                           const SingularWeights& weights_vanishing);

/// Trapezoid rule on a uniform grid.
double trapezoid(std::span<const double> values, double dt);

}  // namespace fracdrift
