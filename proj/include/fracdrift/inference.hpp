#pragma once

#include <cstddef>
#include <string>

#include "fracdrift/estimator.hpp"

namespace fracdrift {

enum class VarianceProxy { YoungProxy, RoughProxy };

std::string to_string(VarianceProxy proxy);

struct ConfidenceInterval {
  double center = 0.0;
  double half_width = 0.0;
  double level = 0.95;
  VarianceProxy proxy = VarianceProxy::YoungProxy;
  double proxy_value = 0.0;

  double lower() const { return center - half_width; }
  double upper() const { return center + half_width; }
  bool contains(double value) const { return lower() <= value && value <= upper(); }
};

/// Inverse standard normal CDF.
double normal_quantile(double p);

/// Young-regime proxy
///   (1 / N T^2) sum_i [ alpha_H int int |pi(X_s)| |pi(X_t)| |t - s|^{2H-2} ds dt
///                       + H^2 (int_0^T phi(X_u) u^{2H-1} du)^2 ].
double compute_y_n(const Cohort& cohort);

/// Rough-regime proxy
///   (1 / N T^2) sum_i ( |B(X_T) - B(x0)| + theta_max int b(X)^2 + int phi Lambda(theta_max) )^2.
double compute_frak_y_n(const Cohort& cohort, double theta_max);

/// center +- 2 / (sqrt(N) D_N) sqrt(proxy) u_{1 - alpha/4} around the gated
/// estimator. Throws std::domain_error when the gate failed.
ConfidenceInterval build_interval(const EstimationResult& result, VarianceProxy proxy,
                                  double proxy_value, std::size_t n_paths, double level = 0.95);

std::string to_json(const ConfidenceInterval& ci, int indent = 2);

}  // namespace fracdrift
