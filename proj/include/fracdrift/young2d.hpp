#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "fracdrift/fbm.hpp"
#include "fracdrift/hurst.hpp"
#include "fracdrift/model.hpp"
#include "fracdrift/sde.hpp"

namespace fracdrift {

using PlaneFn = std::function<double(double, double)>;

/// Two-parameter integrand x(s, t) on {s < t} with |x(s, t)| <= c |t - s|^alpha
/// and the matching increment bound.
///
/// `reduced` is x(s, t) / (t - s)^vanishing_order extended continuously to the
/// diagonal. The weighted double integral is product-integrated on it, which
/// keeps the quadrature exact for the power family.
struct TestIntegrand {
  std::string label;
  PlaneFn value;
  PlaneFn reduced;
  double vanishing_order = 0.0;
  double holder_alpha = 0.0;
  double holder_const = 1.0;
};

/// x(s, t) = (t - s)^alpha.
TestIntegrand power_integrand(double alpha);

/// alpha_H int_0^T int_0^t (t - s)^alpha (t - s)^{2H-2} ds dt
///   = alpha_H T^{2H+alpha} / ((2H + alpha - 1)(2H + alpha)).
double power_integrand_limit(double alpha, HurstParam h, double t_final);

/// L(s, t) = phi(X_t)(exp(theta int_s^t psi) - 1) read off a sampled path.
/// Arguments are snapped to the nearest node of the path grid.
TestIntegrand l_kernel_integrand(const SamplePath& path, const ModelSpec& model, double theta,
                                 double holder_alpha);

/// R(s,t) - R(s,v) - (R(u,t) - R(u,v)).
double rectangular_increment(double s, double t, double u, double v, HurstParam h);

/// Increment over the cell [t_i, t_{i+1}] x [t_j, t_{j+1}] of a uniform grid,
/// from the four-power closed form.
double rectangular_increment_cell(std::size_t i, std::size_t j, double dt, HurstParam h);

struct RiemannSum {
  double total = 0.0;
  /// Contribution of the band i in {j - 1, j}.
  double diagonal_band = 0.0;
};

/// sum_{j < n} sum_{i <= j} x(t_i, t_j) Delta_{(t_i,t_j),(t_{i+1},t_{j+1})} R
/// on the uniform dissection of [0, T] with n cells.
RiemannSum riemann_sum_split(const TestIntegrand& x, HurstParam h, std::size_t n, double t_final);
double riemann_sum(const TestIntegrand& x, HurstParam h, std::size_t n, double t_final);

/// alpha_H int_0^T int_0^t x(s, t) |t - s|^{2H-2} ds dt on `grid`.
double weighted_double_integral(const TestIntegrand& x, HurstParam h, const FbmGrid& grid);

struct HolderCheck {
  double worst_bound_ratio = 0.0;      // max |x| / (c |t-s|^alpha)
  double worst_increment_ratio = 0.0;  // max |dx| / (c (|s-u|^alpha + |t-v|^alpha))
  bool holds() const { return worst_bound_ratio <= 1.0 + 1e-12 && worst_increment_ratio <= 1.0 + 1e-12; }
};

/// Spot-checks both Holder conditions on a lattice with `points` nodes per axis.
HolderCheck check_holder_conditions(const TestIntegrand& x, double t_final, std::size_t points);

struct ConvergenceRow {
  std::size_t n;
  double riemann_sum;
  double reference;
  double abs_error;
};

std::vector<ConvergenceRow> convergence_study(const TestIntegrand& x, HurstParam h,
                                              double t_final, double reference,
                                              const std::vector<std::size_t>& sizes);

/// CSV with header n,riemann_sum,reference,abs_error.
void write_convergence_csv(std::ostream& out, const std::vector<ConvergenceRow>& rows);

}  // namespace fracdrift
