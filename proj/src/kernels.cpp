#include "fracdrift/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss.hpp>

namespace fracdrift {

std::vector<double> psi_prefix(const SamplePath& path, const ModelSpec& model) {
  const std::size_t size = path.x_path.size();
  const double dt = path.grid.dt();
  std::vector<double> prefix(size, 0.0);
  double prev = model.psi(path.x_path[0]);
  for (std::size_t k = 1; k < size; ++k) {
    const double cur = model.psi(path.x_path[k]);
    prefix[k] = prefix[k - 1] + 0.5 * dt * (prev + cur);
    prev = cur;
  }
  return prefix;
}

PathKernelData prepare_kernel_data(const SamplePath& path, const ModelSpec& model) {
  PathKernelData d;
  d.phi.reserve(path.x_path.size());
  d.psi.reserve(path.x_path.size());
  for (double x : path.x_path) {
    d.phi.push_back(model.phi(x));
    d.psi.push_back(model.psi(x));
  }
  d.prefix.assign(path.x_path.size(), 0.0);
  const double dt = path.grid.dt();
  for (std::size_t k = 1; k < d.psi.size(); ++k) {
    d.prefix[k] = d.prefix[k - 1] + 0.5 * dt * (d.psi[k - 1] + d.psi[k]);
  }
  return d;
}

double malliavin_derivative(const SamplePath& path, const ModelSpec& model,
                            std::span<const double> prefix, double theta0,
                            std::size_t s_idx, std::size_t t_idx) {
  if (s_idx >= t_idx) return 0.0;
  return model.sigma(path.x_path[t_idx]) * std::exp(theta0 * (prefix[t_idx] - prefix[s_idx]));
}

double malliavin_derivative(const SamplePath& path, const ModelSpec& model, double theta0,
                            std::size_t s_idx, std::size_t t_idx) {
  const auto prefix = psi_prefix(path, model);
  return malliavin_derivative(path, model, prefix, theta0, s_idx, t_idx);
}

double lambda_bar(std::span<const double> prefix, double theta, std::size_t s_idx,
                  std::size_t t_idx) {
  if (s_idx > t_idx) throw std::invalid_argument("lambda_bar needs s_idx <= t_idx");
  return std::exp(theta * (prefix[t_idx] - prefix[s_idx]));
}

double lambda(std::span<const double> prefix, double theta, std::size_t s_idx, std::size_t t_idx) {
  if (s_idx > t_idx) throw std::invalid_argument("lambda needs s_idx <= t_idx");
  return std::expm1(theta * (prefix[t_idx] - prefix[s_idx]));
}

double l_kernel(std::span<const double> phi, std::span<const double> prefix, double theta,
                std::size_t s_idx, std::size_t t_idx) {
  if (s_idx >= t_idx) return 0.0;
  return phi[t_idx] * lambda(prefix, theta, s_idx, t_idx);
}

SingularWeights::SingularWeights(const FbmGrid& grid, double gamma)
    : gamma_(gamma), dt_(grid.dt()) {
  if (!(gamma > -1.0)) throw std::invalid_argument("kernel exponent must exceed -1");
  const std::size_t n = grid.n_steps();
  near_.resize(n);
  far_.resize(n);
  const double scale = std::pow(dt_, gamma + 1.0);
  using boost::math::quadrature::gauss;
  // Cell m covers distances [m dt, (m + 1) dt]; v in [0, 1] is the offset in cell units.
  near_[0] = scale / ((gamma + 1.0) * (gamma + 2.0));
  if (n > 0) far_[0] = scale / (gamma + 2.0);
  for (std::size_t m = 1; m < n; ++m) {
    const double md = static_cast<double>(m);
    // The integrand is analytic on [0, 1] with its nearest singularity at
    // v = -m, so a 20-point rule is exact to rounding.
    near_[m] = scale * gauss<double, 20>::integrate(
                           [=](double v) { return (1.0 - v) * std::pow(md + v, gamma); }, 0.0, 1.0);
    far_[m] = scale * gauss<double, 20>::integrate(
                          [=](double v) { return v * std::pow(md + v, gamma); }, 0.0, 1.0);
  }
}

double SingularWeights::weight(std::size_t j, std::size_t i) const {
  if (i > j) throw std::out_of_range("weight needs i <= j");
  if (j == 0) return 0.0;
  const std::size_t d = j - i;
  if (d == 0) return near_[0];
  if (i == 0) return far_[d - 1];
  return near_[d] + far_[d - 1];
}

double SingularWeights::mass(std::size_t j) const {
  const double t = dt_ * static_cast<double>(j);
  return std::pow(t, gamma_ + 1.0) / (gamma_ + 1.0);
}

double SingularWeights::integrate_to(std::size_t j, std::span<const double> g) const {
  if (j == 0) return 0.0;
  double acc = near_[0] * g[j] + far_[j - 1] * g[0];
  for (std::size_t i = 1; i < j; ++i) {
    const std::size_t d = j - i;
    acc += (near_[d] + far_[d - 1]) * g[i];
  }
  return acc;
}

double SingularWeights::integrate_from(std::size_t j, std::span<const double> g) const {
  const std::size_t n = n_steps();
  if (j >= n) return 0.0;
  double acc = near_[0] * g[j] + far_[n - j - 1] * g[n];
  for (std::size_t i = j + 1; i < n; ++i) {
    const std::size_t d = i - j;
    acc += (near_[d] + far_[d - 1]) * g[i];
  }
  return acc;
}

double SingularWeights::integrate_from_origin(std::span<const double> g) const {
  const std::size_t n = n_steps();
  if (g.size() != n + 1) throw std::invalid_argument("integrand length does not match weights");
  double acc = near_[0] * g[0] + far_[n - 1] * g[n];
  for (std::size_t k = 1; k < n; ++k) acc += (near_[k] + far_[k - 1]) * g[k];
  return acc;
}

SingularWeights build_singular_weights(const FbmGrid& grid, HurstParam h, double vanishing_order) {
  const double gamma = 2.0 * h.value() - 2.0 + vanishing_order;
  if (!(gamma > -1.0)) {
    throw std::invalid_argument(
        "kernel |t - s|^{2H-2} is not integrable for H <= 1/2; pass a vanishing order");
  }
  return SingularWeights(grid, gamma);
}

std::vector<double> exp_kernel_inner(std::span<const double> prefix, double theta,
                                     const SingularWeights& weights) {
  const std::size_t size = prefix.size();
  std::vector<double> inner(size, 0.0);
  const auto [lo, hi] = std::minmax_element(prefix.begin(), prefix.end());
  const double spread = std::abs(theta) * (*hi - *lo);
  if (spread < 600.0) {
    // exp(theta (P_j - P_i)) = exp(theta (P_j - c)) exp(-theta (P_i - c)).
    const double center = 0.5 * (*hi + *lo);
    std::vector<double> down(size);
    for (std::size_t i = 0; i < size; ++i) down[i] = std::exp(-theta * (prefix[i] - center));
    for (std::size_t j = 1; j < size; ++j) {
      inner[j] = std::exp(theta * (prefix[j] - center)) * weights.integrate_to(j, down);
    }
    return inner;
  }
  std::vector<double> g(size);
  for (std::size_t j = 1; j < size; ++j) {
    for (std::size_t i = 0; i <= j; ++i) g[i] = std::exp(theta * (prefix[j] - prefix[i]));
    inner[j] = weights.integrate_to(j, g);
  }
  return inner;
}

std::vector<double> lambda_correction(const PathKernelData& data, double theta,
                                      const SingularWeights& weights_vanishing) {
  const std::size_t size = data.prefix.size();
  if (weights_vanishing.n_steps() + 1 != size) {
    throw std::invalid_argument("weights do not match the path grid");
  }
  const double dt = weights_vanishing.dt();
  std::vector<double> out(size, 0.0);
  std::vector<double> y(size);
  for (std::size_t j = 1; j < size; ++j) {
    for (std::size_t i = 0; i < j; ++i) {
      const double gap = dt * static_cast<double>(j - i);
      y[i] = -std::expm1(theta * (data.prefix[j] - data.prefix[i])) / gap;
    }
    y[j] = -theta * data.psi[j];
    out[j] = weights_vanishing.integrate_to(j, y);
  }
  return out;
}

double big_lambda(const PathKernelData& data, double theta, std::size_t t_idx, HurstParam h,
                  const SingularWeights& weights_vanishing) {
  const double hv = h.value();
  if (t_idx == 0) {
    return hv == 0.5 ? -0.5 : -std::numeric_limits<double>::infinity();
  }
  const double dt = weights_vanishing.dt();
  std::vector<double> y(t_idx + 1);
  for (std::size_t i = 0; i < t_idx; ++i) {
    const double gap = dt * static_cast<double>(t_idx - i);
    y[i] = -std::expm1(theta * (data.prefix[t_idx] - data.prefix[i])) / gap;
  }
  y[t_idx] = -theta * data.psi[t_idx];
  const double t = dt * static_cast<double>(t_idx);
  return -hv * std::pow(t, 2.0 * hv - 1.0) +
         h.alpha() * weights_vanishing.integrate_to(t_idx, y);
}

double phi_lambda_integral(const PathKernelData& data, double theta, HurstParam h,
                           const SingularWeights& weights_vanishing) {
  const auto corr = lambda_correction(data, theta, weights_vanishing);
  std::vector<double> g(corr.size());
  for (std::size_t k = 0; k < g.size(); ++k) g[k] = data.phi[k] * corr[k];
  const double singular = weights_vanishing.integrate_from_origin(data.phi);
  return -h.value() * singular + h.alpha() * trapezoid(g, weights_vanishing.dt());
}

double trapezoid(std::span<const double> values, double dt) {
  if (values.size() < 2) return 0.0;
  double acc = 0.5 * (values.front() + values.back());
  for (std::size_t k = 1; k + 1 < values.size(); ++k) acc += values[k];
  return acc * dt;
}

namespace {

// w_pq(z) = int l_p(x) l_q(x + z) dx over x, x + z in [0, 1]; a cubic in z on
// each side of 0, so two-point Gauss in x is exact.
double overlap(int p, int q, double z) {
  const double lo = std::max(0.0, -z), hi = std::min(1.0, 1.0 - z);
  if (hi <= lo) return 0.0;
  auto basis = [](int k, double x) { return k == 0 ? 1.0 - x : x; };
  const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
  const double node = half / std::sqrt(3.0);
  return half * (basis(p, mid - node) * basis(q, mid - node + z) +
                 basis(p, mid + node) * basis(q, mid + node + z));
}

// int_0^1 y^gamma q(y) dy for the cubic q through its values at 0, 1/3, 2/3, 1.
double cubic_power_moment(const std::function<double(double)>& q, double gamma) {
  Eigen::Matrix4d v;
  Eigen::Vector4d rhs;
  for (int r = 0; r < 4; ++r) {
    const double y = r / 3.0;
    for (int c = 0; c < 4; ++c) v(r, c) = std::pow(y, c);
    rhs(r) = q(y);
  }
  const Eigen::Vector4d a = v.partialPivLu().solve(rhs);
  double acc = 0.0;
  for (int c = 0; c < 4; ++c) acc += a(c) / (gamma + c + 1.0);
  return acc;
}

}  // namespace

SquareKernelWeights::SquareKernelWeights(const FbmGrid& grid, double gamma)
    : gamma_(gamma), scale_(std::pow(grid.dt(), 2.0 + gamma)), coef_(grid.n_steps()) {
  if (!(gamma > -1.0)) throw std::invalid_argument("kernel exponent must exceed -1");
  using boost::math::quadrature::gauss;
  for (std::size_t m = 0; m < coef_.size(); ++m) {
    const double shift = static_cast<double>(m);
    for (int p = 0; p < 2; ++p)
      for (int q = 0; q < 2; ++q) {
        auto w = [p, q](double z) { return overlap(p, q, z); };
        double value;
        if (m == 0) {
          // |z|^gamma on both sides of the diagonal.
          value = cubic_power_moment([&](double y) { return w(-y); }, gamma) +
                  cubic_power_moment(w, gamma);
        } else if (m == 1) {
          // Singular at z = -1 only; y = 1 + z.
          value = cubic_power_moment([&](double y) { return w(y - 1.0); }, gamma) +
                  gauss<double, 20>::integrate(
                      [&](double z) { return std::pow(1.0 + z, gamma) * w(z); }, 0.0, 1.0);
        } else {
          auto f = [&](double z) { return std::pow(shift + z, gamma) * w(z); };
          value = gauss<double, 20>::integrate(f, -1.0, 0.0) + gauss<double, 20>::integrate(f, 0.0, 1.0);
        }
        coef_[m][2 * p + q] = value;
      }
  }
}

double SquareKernelWeights::integrate(std::span<const double> g) const {
  const std::size_t n = coef_.size();
  if (g.size() != n + 1) throw std::invalid_argument("node values do not match the grid");
  double acc = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    const double s0 = g[a], s1 = g[a + 1];
    const auto& d = coef_[0];
    acc += s0 * s0 * d[0] + s0 * s1 * (d[1] + d[2]) + s1 * s1 * d[3];
    double off = 0.0;
    for (std::size_t b = a + 1; b < n; ++b) {
      const auto& c = coef_[b - a];
      const double t0 = g[b], t1 = g[b + 1];
      off += s0 * (t0 * c[0] + t1 * c[1]) + s1 * (t0 * c[2] + t1 * c[3]);
    }
    acc += 2.0 * off;
  }
  return scale_ * acc;
}

}  // namespace fracdrift
