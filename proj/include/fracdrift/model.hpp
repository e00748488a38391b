#pragma once

#include <functional>
#include <optional>
#include <string>

namespace fracdrift {

using ScalarFn = std::function<double(double)>;

struct ModelFlags {
  bool b_prime_nonpositive = false;
  bool phi_nonpositive = false;
  bool psi_nonpositive = false;
  bool b_bounded = false;
};

/// Coefficients of dX = theta b(X) dt + sigma(X) dB.
///
/// The transforms pi = b sigma, phi = sigma (sigma b' + sigma' b) and
/// psi = b' - sigma' b / sigma are always derived from the coefficients.
/// sup_phi / sup_psi are the sup norms over the real line (or over the
/// declared domain for custom models); the contraction gate relies on them.
struct ModelSpec {
  std::string name;
  ScalarFn b;
  ScalarFn b_prime;
  ScalarFn sigma;
  ScalarFn sigma_prime;
  /// Closed-form antiderivative of b. Empty means numeric quadrature.
  ScalarFn b_antideriv;
  double sup_phi = 0.0;
  double sup_psi = 0.0;
  /// Declared lower bound of |sigma|.
  double sigma_floor = 0.0;
  ModelFlags flags;

  double pi(double x) const { return b(x) * sigma(x); }
  double phi(double x) const {
    const double s = sigma(x);
    return s * (s * b_prime(x) + sigma_prime(x) * b(x));
  }
  double psi(double x) const { return b_prime(x) - sigma_prime(x) * b(x) / sigma(x); }
  bool has_closed_antiderivative() const { return static_cast<bool>(b_antideriv); }
};

/// b(x) = -x with sigma = 1.
ModelSpec model_a();
/// b(x) = -x with sigma(x) = 1 + exp(-x^2).
ModelSpec model_b();
/// b(x) = -x with sigma(x) = pi + arctan(x).
ModelSpec model_c();
/// "A", "B" or "C".
ModelSpec model_by_name(const std::string& name);

/// Parametric family for user-defined models.
///   drift:     "linear" b = -slope x, or "tanh" b = -slope tanh(x) (bounded)
///   diffusion: "constant" sigma = level, "bump" sigma = level + amplitude e^{-x^2},
///              "arctan" sigma = level + amplitude arctan(x)
struct CustomModelConfig {
  std::string drift = "linear";
  double slope = 1.0;
  std::string diffusion = "constant";
  double level = 1.0;
  double amplitude = 0.0;
  /// Interval on which sup norms and sign flags are evaluated.
  double domain_lo = -50.0;
  double domain_hi = 50.0;
  /// Drop the closed-form antiderivative and integrate b numerically.
  bool numeric_antiderivative = false;
};

ModelSpec make_custom_model(const CustomModelConfig& config);

/// max |f| over a lattice of [lo, hi] refined near the origin, plus a local
/// golden-section polish around the best lattice point.
double sup_abs_on_interval(const ScalarFn& f, double lo, double hi, std::size_t points = 20001);

struct ModelCheck {
  double min_abs_sigma;
  double max_abs_phi;
  double max_abs_psi;
  double max_b_prime;
  double max_phi;
  double max_psi;
  bool ok() const;
};

/// Spot-checks the declared metadata on a lattice of [lo, hi]: sigma floor,
/// sup norms dominate the sampled values, declared sign flags hold.
ModelCheck check_model(const ModelSpec& model, double lo, double hi, std::size_t points = 4001);

}  // namespace fracdrift
