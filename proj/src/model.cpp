#include "fracdrift/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace fracdrift {

namespace {

constexpr double kSignSlack = 1e-12;

// Lattice mapped through sinh so both the origin and the far field are covered.
std::vector<double> lattice(double lo, double hi, std::size_t points) {
  std::vector<double> xs;
  xs.reserve(points + 2);
  const double scale = 1.0;
  const double a = std::asinh(lo / scale);
  const double b = std::asinh(hi / scale);
  for (std::size_t i = 0; i < points; ++i) {
    const double u = a + (b - a) * static_cast<double>(i) / static_cast<double>(points - 1);
    xs.push_back(scale * std::sinh(u));
  }
  if (lo <= 0.0 && hi >= 0.0) xs.push_back(0.0);
  return xs;
}

double golden_max(const ScalarFn& f, double lo, double hi) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = std::abs(f(c)), fd = std::abs(f(d));
  for (int it = 0; it < 200 && (b - a) > 1e-13 * (1.0 + std::abs(a)); ++it) {
    if (fc > fd) {
      b = d; d = c; fd = fc;
      c = b - g * (b - a); fc = std::abs(f(c));
    } else {
      a = c; c = d; fc = fd;
      d = a + g * (b - a); fd = std::abs(f(d));
    }
  }
  return std::max(fc, fd);
}

ModelSpec finish(ModelSpec m, double lo, double hi) {
  m.sup_phi = sup_abs_on_interval([&m](double x) { return m.phi(x); }, lo, hi, 200001);
  m.sup_psi = sup_abs_on_interval([&m](double x) { return m.psi(x); }, lo, hi, 200001);
  return m;
}

ModelSpec linear_drift(std::string name, ScalarFn sigma, ScalarFn sigma_prime, double floor) {
  ModelSpec m;
  m.name = std::move(name);
  m.b = [](double x) { return -x; };
  m.b_prime = [](double) { return -1.0; };
  m.b_antideriv = [](double x) { return -0.5 * x * x; };
  m.sigma = std::move(sigma);
  m.sigma_prime = std::move(sigma_prime);
  m.sigma_floor = floor;
  m.flags = {true, true, true, false};
  return m;
}

}  // namespace

double sup_abs_on_interval(const ScalarFn& f, double lo, double hi, std::size_t points) {
  if (!(lo < hi)) throw std::invalid_argument("sup_abs_on_interval needs lo < hi");
  if (points < 3) points = 3;
  auto xs = lattice(lo, hi, points);
  std::sort(xs.begin(), xs.end());
  double best = 0.0;
  std::size_t arg = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double v = std::abs(f(xs[i]));
    if (v > best) {
      best = v;
      arg = i;
    }
  }
  const double left = xs[arg == 0 ? 0 : arg - 1];
  const double right = xs[std::min(arg + 1, xs.size() - 1)];
  if (right > left) best = std::max(best, golden_max(f, left, right));
  return best;
}

ModelSpec model_a() {
  ModelSpec m = linear_drift("A", [](double) { return 1.0; }, [](double) { return 0.0; }, 1.0);
  m.sup_phi = 1.0;
  m.sup_psi = 1.0;
  return m;
}

ModelSpec model_b() {
  static const ModelSpec cached = finish(
      linear_drift(
          "B", [](double x) { return 1.0 + std::exp(-x * x); },
          [](double x) { return -2.0 * x * std::exp(-x * x); }, 1.0),
      -1e6, 1e6);
  return cached;
}

ModelSpec model_c() {
  // |phi| approaches (3 pi / 2)^2 as x -> +inf without attaining it.
  static const ModelSpec cached = [] {
    ModelSpec m = finish(
        linear_drift(
            "C", [](double x) { return std::numbers::pi + std::atan(x); },
            [](double x) { return 1.0 / (1.0 + x * x); }, std::numbers::pi / 2.0),
        -1e6, 1e6);
    m.sup_phi = std::max(m.sup_phi, std::pow(1.5 * std::numbers::pi, 2));
    return m;
  }();
  return cached;
}

ModelSpec model_by_name(const std::string& name) {
  if (name == "A") return model_a();
  if (name == "B") return model_b();
  if (name == "C") return model_c();
  throw std::invalid_argument("unknown model '" + name + "' (expected A, B or C)");
}

ModelSpec make_custom_model(const CustomModelConfig& c) {
  if (!(c.slope > 0.0)) throw std::invalid_argument("custom drift slope must be positive");
  if (!(c.domain_lo < c.domain_hi)) throw std::invalid_argument("custom domain is empty");
  ModelSpec m;
  m.name = "custom";
  const double a = c.slope;
  if (c.drift == "linear") {
    m.b = [a](double x) { return -a * x; };
    m.b_prime = [a](double) { return -a; };
    m.b_antideriv = [a](double x) { return -0.5 * a * x * x; };
    m.flags.b_bounded = false;
  } else if (c.drift == "tanh") {
    m.b = [a](double x) { return -a * std::tanh(x); };
    m.b_prime = [a](double x) {
      const double ch = std::cosh(x);
      return -a / (ch * ch);
    };
    m.b_antideriv = [a](double x) {
      // log cosh x, stable for large |x|
      const double ax = std::abs(x);
      return -a * (ax + std::log1p(std::exp(-2.0 * ax)) - std::numbers::ln2);
    };
    m.flags.b_bounded = true;
  } else {
    throw std::invalid_argument("unknown drift type '" + c.drift + "'");
  }

  const double lvl = c.level, amp = c.amplitude;
  if (c.diffusion == "constant") {
    m.sigma = [lvl](double) { return lvl; };
    m.sigma_prime = [](double) { return 0.0; };
    m.sigma_floor = std::abs(lvl);
  } else if (c.diffusion == "bump") {
    m.sigma = [lvl, amp](double x) { return lvl + amp * std::exp(-x * x); };
    m.sigma_prime = [amp](double x) { return -2.0 * amp * x * std::exp(-x * x); };
    m.sigma_floor = std::min(std::abs(lvl), std::abs(lvl + amp));
    if (lvl * (lvl + amp) <= 0.0) m.sigma_floor = 0.0;
  } else if (c.diffusion == "arctan") {
    m.sigma = [lvl, amp](double x) { return lvl + amp * std::atan(x); };
    m.sigma_prime = [amp](double x) { return amp / (1.0 + x * x); };
    const double half = std::abs(amp) * std::numbers::pi / 2.0;
    m.sigma_floor = std::abs(lvl) > half ? std::abs(lvl) - half : 0.0;
  } else {
    throw std::invalid_argument("unknown diffusion type '" + c.diffusion + "'");
  }
  if (!(m.sigma_floor > 0.0)) {
    throw std::invalid_argument("custom diffusion is not bounded away from zero");
  }
  if (c.numeric_antiderivative) m.b_antideriv = nullptr;

  m = finish(std::move(m), c.domain_lo, c.domain_hi);
  const ModelCheck check = check_model(m, c.domain_lo, c.domain_hi, 20001);
  m.flags.b_prime_nonpositive = check.max_b_prime <= kSignSlack;
  m.flags.phi_nonpositive = check.max_phi <= kSignSlack;
  m.flags.psi_nonpositive = check.max_psi <= kSignSlack;
  return m;
}

bool ModelCheck::ok() const { return min_abs_sigma > 0.0; }

ModelCheck check_model(const ModelSpec& model, double lo, double hi, std::size_t points) {
  ModelCheck r{std::numeric_limits<double>::infinity(), 0.0, 0.0,
               -std::numeric_limits<double>::infinity(),
               -std::numeric_limits<double>::infinity(),
               -std::numeric_limits<double>::infinity()};
  for (double x : lattice(lo, hi, points)) {
    const double phi = model.phi(x), psi = model.psi(x);
    r.min_abs_sigma = std::min(r.min_abs_sigma, std::abs(model.sigma(x)));
    r.max_abs_phi = std::max(r.max_abs_phi, std::abs(phi));
    r.max_abs_psi = std::max(r.max_abs_psi, std::abs(psi));
    r.max_b_prime = std::max(r.max_b_prime, model.b_prime(x));
    r.max_phi = std::max(r.max_phi, phi);
    r.max_psi = std::max(r.max_psi, psi);
  }
  return r;
}

}  // namespace fracdrift
