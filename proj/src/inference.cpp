#include "fracdrift/inference.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include "json.hpp"

namespace fracdrift {

std::string to_string(VarianceProxy proxy) {
  return proxy == VarianceProxy::YoungProxy ? "Y_N" : "FrakY_N";
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("quantile level must lie in (0, 1)");
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

double compute_y_n(const Cohort& cohort) {
  const HurstParam h = cohort.hurst();
  if (h.regime() != Regime::Young) throw RegimeError("Y_N needs H > 1/2");
  const SquareKernelWeights square_weights(cohort.grid(), 2.0 * h.value() - 2.0);
  const SingularWeights& origin = cohort.vanishing_weights();
  const ModelSpec& model = cohort.model();
  const double total = cohort.sum_over_paths([&](std::size_t i) {
    const SamplePath& path = cohort.paths()[i];
    const std::size_t size = path.x_path.size();
    std::vector<double> abs_pi(size);
    for (std::size_t k = 0; k < size; ++k) abs_pi[k] = std::abs(model.pi(path.x_path[k]));
    const double square = h.alpha() * square_weights.integrate(abs_pi);
    const double tail = h.value() * origin.integrate_from_origin(cohort.kernel_data(i).phi);
    return square + tail * tail;
  });
  const double t = cohort.t_final();
  return total / (static_cast<double>(cohort.size()) * t * t);
}

double compute_frak_y_n(const Cohort& cohort, double theta_max) {
  const HurstParam h = cohort.hurst();
  if (h.regime() != Regime::Rough) throw RegimeError("the rough proxy needs H <= 1/2");
  if (!(theta_max > 0.0)) throw std::invalid_argument("theta_max must be positive");
  const double total = cohort.sum_over_paths([&](std::size_t i) {
    const double term = std::abs(cohort.antiderivative_increment(i)) +
                        theta_max * cohort.drift_energy(i) +
                        phi_lambda_integral(cohort.kernel_data(i), theta_max, h,
                                            cohort.vanishing_weights());
    return term * term;
  });
  const double t = cohort.t_final();
  return total / (static_cast<double>(cohort.size()) * t * t);
}

ConfidenceInterval build_interval(const EstimationResult& result, VarianceProxy proxy,
                                  double proxy_value, std::size_t n_paths, double level) {
  if (!result.gate_passed) throw std::domain_error("interval needs a passed contraction gate");
  if (!(result.stats.d_n > 0.0)) throw std::domain_error("interval needs D_N > 0");
  if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("level must lie in (0, 1)");
  if (n_paths == 0) throw std::invalid_argument("interval needs at least one path");
  if (!(proxy_value >= 0.0)) throw std::invalid_argument("proxy value must be nonnegative");
  const double alpha = 1.0 - level;
  ConfidenceInterval ci;
  ci.center = result.theta_bar_gated;
  ci.level = level;
  ci.proxy = proxy;
  ci.proxy_value = proxy_value;
  ci.half_width = 2.0 / (std::sqrt(static_cast<double>(n_paths)) * result.stats.d_n) *
                  std::sqrt(proxy_value) * normal_quantile(1.0 - alpha / 4.0);
  return ci;
}

std::string to_json(const ConfidenceInterval& ci, int indent) {
  nlohmann::ordered_json j;
  j["center"] = ci.center;
  j["half_width"] = ci.half_width;
  j["lower"] = ci.lower();
  j["upper"] = ci.upper();
  j["level"] = ci.level;
  j["proxy"] = to_string(ci.proxy);
  j["proxy_value"] = ci.proxy_value;
  return j.dump(indent);
}

}  // namespace fracdrift
