#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "fracdrift/experiment.hpp"
#include "fracdrift/fbm.hpp"
#include "fracdrift/model.hpp"
#include "fracdrift/sde.hpp"

namespace fracdrift::testing {

/// Path with X_t = f(t) on the grid and a zero driving path.
inline SamplePath function_path(const FbmGrid& grid, const std::function<double(double)>& f) {
  SamplePath p{grid, std::vector<double>(grid.size(), 0.0), std::vector<double>(grid.size()), f(0.0),
               std::nullopt};
  for (std::size_t k = 0; k < grid.size(); ++k) p.x_path[k] = f(grid.time(k));
  return p;
}

inline SamplePath constant_path(const FbmGrid& grid, double c) {
  return function_path(grid, [c](double) { return c; });
}

/// b = -(2 + tanh x), sigma = 2 + tanh x, so psi = 0 and phi = -2 sigma^2 sech^2 <= 0.
inline ModelSpec psi_free_model() {
  ModelSpec m;
  m.name = "psi_free";
  m.sigma = [](double x) { return 2.0 + std::tanh(x); };
  m.sigma_prime = [](double x) {
    const double c = std::cosh(x);
    return 1.0 / (c * c);
  };
  m.b = [](double x) { return -(2.0 + std::tanh(x)); };
  m.b_prime = [](double x) {
    const double c = std::cosh(x);
    return -1.0 / (c * c);
  };
  m.sup_phi = 2.0 * 9.0;
  m.sup_psi = 0.0;
  m.sigma_floor = 1.0;
  m.flags = {true, true, true, true};
  return m;
}

/// b = 0, sigma = 1: phi = psi = pi = 0.
inline ModelSpec null_drift_model() {
  ModelSpec m;
  m.name = "null_drift";
  m.b = [](double) { return 0.0; };
  m.b_prime = [](double) { return 0.0; };
  m.sigma = [](double) { return 1.0; };
  m.sigma_prime = [](double) { return 0.0; };
  m.b_antideriv = [](double) { return 0.0; };
  m.sup_phi = 0.0;
  m.sup_psi = 0.0;
  m.sigma_floor = 1.0;
  m.flags = {true, true, true, true};
  return m;
}

inline std::vector<SamplePath> simulate(const ModelSpec& model, double h, double theta0,
                                        std::size_t n_steps, std::size_t n_paths,
                                        std::uint64_t seed, double t_final = 1.0, double x0 = 1.0) {
  return simulate_cohort(model, HurstParam(h), theta0, x0, FbmGrid(t_final, n_steps), n_paths, seed)
      .paths;
}

// D_s X_t from the first variation J of the scheme: D_s X_t = sigma(X_s) J_t / J_s with
// log J accumulated along the path by the same second-order expansion as the solver.
inline double variation_oracle(const SamplePath& p, const ModelSpec& m, double theta, std::size_t s,
                        std::size_t t) {
  const double dt = p.grid.dt();
  double log_j = 0.0;
  for (std::size_t k = s; k < t; ++k) {
    const double x = p.x_path[k];
    const double db = p.b_path[k + 1] - p.b_path[k];
    const double e = 1e-5;
    const double sigma_second = (m.sigma_prime(x + e) - m.sigma_prime(x - e)) / (2 * e);
    log_j += theta * m.b_prime(x) * dt + m.sigma_prime(x) * db +
             0.5 * sigma_second * m.sigma(x) * db * db;
  }
  return m.sigma(p.x_path[s]) * std::exp(log_j);
}

/// Piecewise-linear interpolant of node values on a uniform grid.
inline double interpolate(const std::vector<double>& values, double dt, double t) {
  const double pos = t / dt;
  std::size_t k = static_cast<std::size_t>(std::floor(pos));
  if (k + 1 >= values.size()) k = values.size() - 2;
  const double w = pos - static_cast<double>(k);
  return (1.0 - w) * values[k] + w * values[k + 1];
}

/// Adaptive quadrature for bounded integrands with endpoint kinks.
inline double singular_quad(const std::function<double(double)>& f, double a, double b,
                            double tol = 1e-10) {
  if (b <= a) return 0.0;
  boost::math::quadrature::tanh_sinh<double> q;
  return q.integrate(f, a, b, tol);
}

/// int_0^len g(u) u^gamma du for gamma > -1 and bounded g, via v = u^{gamma+1}.
inline double power_weight_quad(const std::function<double(double)>& g, double len, double gamma,
                                double tol = 1e-10) {
  if (len <= 0.0) return 0.0;
  const double e = 1.0 / (gamma + 1.0);
  return singular_quad([&](double v) { return g(std::pow(v, e)); }, 0.0, std::pow(len, gamma + 1.0),
                       tol) * e;
}

inline double smooth_quad(const std::function<double(double)>& f, double a, double b) {
  if (b <= a) return 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 15, 1e-13);
}

/// int_0^{cells dt} G(t) |t - s|^gamma dt in closed form for the piecewise-linear
/// G through `values`.
inline double linear_power_integral(const std::vector<double>& values, double dt, double gamma,
                                    double s, std::size_t cells) {
  auto s1 = [gamma](double x) {
    return std::copysign(std::pow(std::abs(x), gamma + 1.0), x) / (gamma + 1.0);
  };
  auto s2 = [gamma](double x) { return std::pow(std::abs(x), gamma + 2.0) / (gamma + 2.0); };
  double total = 0.0;
  for (std::size_t l = 0; l < cells; ++l) {
    const double a = l * dt, b = (l + 1) * dt;
    const double c1 = (values[l + 1] - values[l]) / dt, c0 = values[l] - c1 * a;
    total += (c0 + c1 * s) * (s1(b - s) - s1(a - s)) + c1 * (s2(b - s) - s2(a - s));
  }
  return total;
}

/// int int_{[0,T]^2} G(s) G(t) |t - s|^gamma ds dt for the piecewise-linear G
/// through `values`: inner integral in closed form, outer by adaptive quadrature
/// cell by cell.
inline double kernel_double_integral(const std::vector<double>& values, double dt, double gamma) {
  const std::size_t n = values.size() - 1;
  double total = 0.0;
  for (std::size_t k = 0; k < n; ++k)
    total += singular_quad(
        [&](double s) {
          return interpolate(values, dt, s) * linear_power_integral(values, dt, gamma, s, n);
        },
        k * dt, (k + 1) * dt, 1e-12);
  return total;
}

/// alpha_H^2 int int_{[0,T]^2} int_0^v int_0^u |u - ub|^{2H-2} |v - vb|^{2H-2}
/// phi(v) phi(u) dub dvb du dv as a literal sum over cell quadruples.
inline double quadruple_phi_integral(const std::vector<double>& phi, double dt, double h) {
  const std::size_t n = phi.size() - 1;
  const double gamma = 2.0 * h - 2.0, alpha = h * (2.0 * h - 1.0);
  // a[k][kb] = int_{cell k} phi(u) int_{cell kb, ub < u} (u - ub)^gamma dub du.
  std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t kb = 0; kb <= k; ++kb) {
      const double lo = kb * dt, hi = (kb + 1) * dt;
      a[k][kb] = singular_quad(
          [&](double u) {
            const double top = std::pow(u - lo, gamma + 1.0);
            const double bottom = kb < k ? std::pow(u - hi, gamma + 1.0) : 0.0;
            return interpolate(phi, dt, u) * (top - bottom) / (gamma + 1.0);
          },
          k * dt, (k + 1) * dt, 1e-12);
    }
  double total = 0.0;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t kb = 0; kb < n; ++kb)
      for (std::size_t l = 0; l < n; ++l)
        for (std::size_t lb = 0; lb < n; ++lb) total += a[k][kb] * a[l][lb];
  return alpha * alpha * total;
}

/// Y_N evaluated term by term with the two oracles above.
inline double brute_force_y_n(const std::vector<SamplePath>& paths, const ModelSpec& model,
                              double h) {
  double total = 0.0;
  for (const auto& p : paths) {
    std::vector<double> abs_pi(p.x_path.size()), phi(p.x_path.size());
    for (std::size_t k = 0; k < abs_pi.size(); ++k) {
      abs_pi[k] = std::abs(model.pi(p.x_path[k]));
      phi[k] = model.phi(p.x_path[k]);
    }
    const double dt = p.grid.dt();
    total += h * (2.0 * h - 1.0) * kernel_double_integral(abs_pi, dt, 2.0 * h - 2.0) +
             quadruple_phi_integral(phi, dt, h);
  }
  const double t = paths.front().grid.t_final();
  return total / (static_cast<double>(paths.size()) * t * t);
}

}  // namespace fracdrift::testing
