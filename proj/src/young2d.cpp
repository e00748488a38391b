#include "fracdrift/young2d.hpp"

#include <cmath>
#include <cstdio>
#include <memory>
#include <ostream>
#include <stdexcept>

#include "fracdrift/kernels.hpp"

namespace fracdrift {

TestIntegrand power_integrand(double alpha) {
  TestIntegrand x;
  x.label = "power_" + std::to_string(alpha);
  x.value = [alpha](double s, double t) { return t > s ? std::pow(t - s, alpha) : 0.0; };
  x.reduced = [](double, double) { return 1.0; };
  x.vanishing_order = alpha;
  x.holder_alpha = alpha;
  x.holder_const = 1.0;
  return x;
}

double power_integrand_limit(double alpha, HurstParam h, double t_final) {
  const double e = 2.0 * h.value() + alpha;
  return h.alpha() * std::pow(t_final, e) / ((e - 1.0) * e);
}

TestIntegrand l_kernel_integrand(const SamplePath& path, const ModelSpec& model, double theta,
                                 double holder_alpha) {
  auto data = std::make_shared<PathKernelData>(prepare_kernel_data(path, model));
  const double dt = path.grid.dt();
  const std::size_t n = path.grid.n_steps();
  auto index = [dt, n](double s) {
    const double k = std::round(s / dt);
    if (k < 0.0) return std::size_t{0};
    return std::min(static_cast<std::size_t>(k), n);
  };
  TestIntegrand x;
  x.label = "l_kernel";
  x.value = [data, index, theta](double s, double t) {
    return l_kernel(data->phi, data->prefix, theta, index(s), index(t));
  };
  x.reduced = [data, index, theta, dt](double s, double t) {
    const std::size_t i = index(s), j = index(t);
    if (i >= j) return data->phi[j] * theta * data->psi[j];
    return l_kernel(data->phi, data->prefix, theta, i, j) / (dt * static_cast<double>(j - i));
  };
  x.vanishing_order = 1.0;
  x.holder_alpha = holder_alpha;
  x.holder_const = 1.0;
  return x;
}

double rectangular_increment(double s, double t, double u, double v, HurstParam h) {
  return fbm_covariance(s, t, h) - fbm_covariance(s, v, h) -
         (fbm_covariance(u, t, h) - fbm_covariance(u, v, h));
}

double rectangular_increment_cell(std::size_t i, std::size_t j, double dt, HurstParam h) {
  const double two_h = 2.0 * h.value();
  const double ti = dt * static_cast<double>(i), ti1 = dt * static_cast<double>(i + 1);
  const double tj = dt * static_cast<double>(j), tj1 = dt * static_cast<double>(j + 1);
  return 0.5 * (std::pow(std::abs(ti1 - tj), two_h) + std::pow(std::abs(tj1 - ti), two_h) -
                std::pow(std::abs(ti1 - tj1), two_h) - std::pow(std::abs(ti - tj), two_h));
}

RiemannSum riemann_sum_split(const TestIntegrand& x, HurstParam h, std::size_t n, double t_final) {
  if (n == 0) throw std::invalid_argument("riemann_sum needs n >= 1");
  const double dt = t_final / static_cast<double>(n);
  // On a uniform grid the cell increment depends only on d = j - i and equals
  // dt^{2H} times the fGn autocovariance at lag d.
  const double scale = std::pow(dt, 2.0 * h.value());
  std::vector<double> cell(n);
  for (std::size_t d = 0; d < n; ++d) cell[d] = scale * fgn_autocovariance(d, h);
  RiemannSum out;
  for (std::size_t j = 0; j < n; ++j) {
    const double tj = dt * static_cast<double>(j);
    for (std::size_t i = 0; i <= j; ++i) {
      const double term = x.value(dt * static_cast<double>(i), tj) * cell[j - i];
      out.total += term;
      if (j - i <= 1) out.diagonal_band += term;
    }
  }
  return out;
}

double riemann_sum(const TestIntegrand& x, HurstParam h, std::size_t n, double t_final) {
  return riemann_sum_split(x, h, n, t_final).total;
}

double weighted_double_integral(const TestIntegrand& x, HurstParam h, const FbmGrid& grid) {
  // Lag form: int_0^T u^gamma F(u) du with F(u) = int_0^{T-u} reduced(s, s + u) ds.
  // F is smooth in u, so the lag integral is product-integrated and F uses the
  // trapezoid rule.
  const SingularWeights weights = build_singular_weights(grid, h, x.vanishing_order);
  const std::size_t n = grid.n_steps();
  std::vector<double> lag(n + 1, 0.0), g;
  for (std::size_t d = 0; d < n; ++d) {
    g.resize(n - d + 1);
    for (std::size_t i = 0; i + d <= n; ++i) g[i] = x.reduced(grid.time(i), grid.time(i + d));
    lag[d] = trapezoid(g, grid.dt());
  }
  return h.alpha() * weights.integrate_from_origin(lag);
}

HolderCheck check_holder_conditions(const TestIntegrand& x, double t_final, std::size_t points) {
  HolderCheck check;
  const double a = x.holder_alpha, c = x.holder_const;
  std::vector<double> ts(points);
  for (std::size_t k = 0; k < points; ++k) ts[k] = t_final * k / static_cast<double>(points - 1);
  for (std::size_t j = 1; j < points; ++j) {
    for (std::size_t i = 0; i < j; ++i) {
      const double s = ts[i], t = ts[j];
      check.worst_bound_ratio =
          std::max(check.worst_bound_ratio, std::abs(x.value(s, t)) / (c * std::pow(t - s, a)));
    }
  }
  // Ordered quadruples s < u < t < v.
  for (std::size_t is = 0; is < points; ++is)
    for (std::size_t iu = is + 1; iu < points; ++iu)
      for (std::size_t it = iu + 1; it < points; ++it)
        for (std::size_t iv = it + 1; iv < points; ++iv) {
          const double s = ts[is], u = ts[iu], t = ts[it], v = ts[iv];
          const double lhs = std::abs(x.value(s, t) - x.value(u, v));
          const double rhs = c * (std::pow(u - s, a) + std::pow(v - t, a));
          check.worst_increment_ratio = std::max(check.worst_increment_ratio, lhs / rhs);
        }
  return check;
}

std::vector<ConvergenceRow> convergence_study(const TestIntegrand& x, HurstParam h,
                                              double t_final, double reference,
                                              const std::vector<std::size_t>& sizes) {
  std::vector<ConvergenceRow> rows;
  for (std::size_t n : sizes) {
    const double value = riemann_sum(x, h, n, t_final);
    rows.push_back({n, value, reference, std::abs(value - reference)});
  }
  return rows;
}

void write_convergence_csv(std::ostream& out, const std::vector<ConvergenceRow>& rows) {
  out << "n,riemann_sum,reference,abs_error\n";
  char buf[128];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g\n", r.n, r.riemann_sum, r.reference,
                  r.abs_error);
    out << buf;
  }
}

}  // namespace fracdrift
