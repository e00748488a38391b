#include "fracdrift/estimator.hpp"

#include <cmath>
#include <limits>

#include "json.hpp"

#include "fracdrift/parallel.hpp"

namespace fracdrift {

namespace {

FbmGrid checked_grid(std::span<const SamplePath> paths) {
  if (paths.empty()) throw std::invalid_argument("cohort needs at least one path");
  const FbmGrid& grid = paths.front().grid;
  for (const auto& p : paths) {
    if (!(p.grid == grid)) throw std::invalid_argument("cohort paths do not share one grid");
    if (p.x_path.size() != grid.size()) throw std::invalid_argument("path length does not match grid");
  }
  return grid;
}

}  // namespace

Cohort::Cohort(std::span<const SamplePath> paths, const ModelSpec& model, HurstParam h,
               std::size_t threads)
    : paths_(paths),
      model_(model),
      h_(h),
      grid_(checked_grid(paths)),
      threads_(threads),
      vanishing_(build_singular_weights(grid_, h, 1.0)) {
  const std::size_t n = paths.size();
  data_.resize(n);
  energy_.resize(n);
  increment_.resize(n);
  parallel_for(
      n,
      [&](std::size_t i) {
        data_[i] = prepare_kernel_data(paths_[i], model_);
        energy_[i] = quadratic_drift_functional(paths_[i], model_);
        increment_[i] = fracdrift::antiderivative_increment(paths_[i], model_);
      },
      threads_);
  if (h.regime() == Regime::Young) kernel_.push_back(build_singular_weights(grid_, h, 0.0));
}

const SingularWeights& Cohort::kernel_weights() const {
  if (kernel_.empty()) throw RegimeError("|t-s|^{2H-2} weights need H > 1/2");
  return kernel_.front();
}

double Cohort::sum_over_paths(const std::function<double(std::size_t)>& fn) const {
  std::vector<double> parts(size());
  parallel_for(size(), [&](std::size_t i) { parts[i] = fn(i); }, threads_);
  double total = 0.0;
  for (double v : parts) total += v;
  return total;
}

CohortStats compute_stats(const Cohort& cohort) {
  const double n = static_cast<double>(cohort.size());
  const double t = cohort.t_final();
  CohortStats stats;
  stats.n_paths = cohort.size();
  double energy = 0.0, increment = 0.0;
  for (std::size_t i = 0; i < cohort.size(); ++i) {
    energy += cohort.drift_energy(i);
    increment += cohort.antiderivative_increment(i);
  }
  stats.d_n = energy / (n * t);
  if (!(stats.d_n > 0.0)) throw DegenerateCohortError("D_N is zero: drift vanishes along every path");
  stats.i_n = increment / (n * t * stats.d_n);
  stats.m_n = std::exp(cohort.model().sup_psi * std::abs(stats.i_n) * t);
  return stats;
}

double theta_functional_young(const Cohort& cohort, const CohortStats& stats, double r) {
  const HurstParam h = cohort.hurst();
  if (h.regime() != Regime::Young) throw RegimeError("theta_functional_young needs H > 1/2");
  const SingularWeights& weights = cohort.kernel_weights();
  const double theta = r + stats.i_n;
  const double dt = cohort.grid().dt();
  const double total = cohort.sum_over_paths([&](std::size_t i) {
    const PathKernelData& data = cohort.kernel_data(i);
    std::vector<double> g = exp_kernel_inner(data.prefix, theta, weights);
    for (std::size_t k = 0; k < g.size(); ++k) g[k] *= data.phi[k];
    return trapezoid(g, dt);
  });
  const double scale = static_cast<double>(stats.n_paths) * cohort.t_final() * stats.d_n;
  return -h.alpha() * total / scale;
}

double theta_functional_rough(const Cohort& cohort, const CohortStats& stats, double r) {
  const HurstParam h = cohort.hurst();
  if (h.regime() != Regime::Rough) throw RegimeError("theta_functional_rough needs H <= 1/2");
  const double theta = r + stats.i_n;
  const double total = cohort.sum_over_paths([&](std::size_t i) {
    return phi_lambda_integral(cohort.kernel_data(i), theta, h, cohort.vanishing_weights());
  });
  const double scale = static_cast<double>(stats.n_paths) * cohort.t_final() * stats.d_n;
  return total / scale;
}

double theta_functional(const Cohort& cohort, const CohortStats& stats, double r) {
  return cohort.hurst().regime() == Regime::Young ? theta_functional_young(cohort, stats, r)
                                                  : theta_functional_rough(cohort, stats, r);
}

GateReport gate_delta(const CohortStats& stats, const ModelSpec& model, HurstParam h,
                      double t_final, double c_contraction) {
  if (!(c_contraction > 0.0 && c_contraction < 1.0))
    throw std::invalid_argument("contraction constant must lie in (0, 1)");
  if (!(stats.d_n > 0.0)) throw DegenerateCohortError("gate needs D_N > 0");
  GateReport report;
  report.lhs = std::pow(t_final, 2.0 * h.value()) * stats.m_n / stats.d_n;
  const double denom = h.alpha_bar() * model.sup_phi * model.sup_psi;
  report.rhs = denom > 0.0 ? c_contraction / denom : std::numeric_limits<double>::infinity();
  report.passed = report.lhs <= report.rhs;
  return report;
}

FixedPointResult fixed_point(const std::function<double(double)>& functional, double tol,
                             std::size_t max_iter) {
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  if (max_iter == 0) throw std::invalid_argument("max_iter must be positive");
  FixedPointResult out;
  double r = 0.0;
  double previous_step = -1.0;
  for (std::size_t k = 1; k <= max_iter; ++k) {
    const double next = std::max(0.0, functional(r));
    const double step = std::abs(next - r);
    if (previous_step > 1e3 * tol) out.max_step_ratio = std::max(out.max_step_ratio, step / previous_step);
    r = next;
    out.iterations = k;
    out.final_step = step;
    if (!std::isfinite(r)) break;
    if (step <= tol) {
      out.converged = true;
      break;
    }
    previous_step = step;
  }
  out.value = r;
  return out;
}

EstimationResult estimate(const Cohort& cohort, const EstimatorOptions& options) {
  if (!(options.d_trunc > 0.0)) throw std::invalid_argument("d_trunc must be positive");
  EstimationResult result;
  result.regime = cohort.hurst().regime();
  result.stats = compute_stats(cohort);
  result.negative_i_n = result.stats.i_n < 0.0;
  result.gate = gate_delta(result.stats, cohort.model(), cohort.hurst(), cohort.t_final(),
                           options.c_contraction);
  result.gate_passed = result.gate.passed;
  const CohortStats& stats = result.stats;
  const FixedPointResult fp = fixed_point(
      [&](double r) { return theta_functional(cohort, stats, r); }, options.tol, options.max_iter);
  result.r_n = fp.value;
  result.iterations = fp.iterations;
  result.final_step = fp.final_step;
  result.converged = fp.converged;
  result.max_step_ratio = fp.max_step_ratio;
  result.theta_bar = stats.i_n + result.r_n;
  result.theta_bar_gated = result.gate_passed ? result.theta_bar : 0.0;
  result.theta_bar_truncated = stats.d_n >= options.d_trunc ? result.theta_bar_gated : 0.0;
  return result;
}

double empirical_lipschitz(const std::function<double(double)>& functional,
                           std::span<const double> grid) {
  std::vector<double> values(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) values[k] = functional(grid[k]);
  double worst = 0.0;
  for (std::size_t a = 0; a < grid.size(); ++a)
    for (std::size_t b = a + 1; b < grid.size(); ++b) {
      const double gap = std::abs(grid[a] - grid[b]);
      if (gap > 0.0) worst = std::max(worst, std::abs(values[a] - values[b]) / gap);
    }
  return worst;
}

std::string to_json(const EstimationResult& r, int indent) {
  nlohmann::ordered_json j;
  j["regime"] = to_string(r.regime);
  j["stats"] = {{"d_n", r.stats.d_n}, {"i_n", r.stats.i_n}, {"m_n", r.stats.m_n},
                {"n_paths", r.stats.n_paths}};
  j["gate"] = {{"passed", r.gate.passed}, {"lhs", r.gate.lhs},
               {"rhs", std::isfinite(r.gate.rhs) ? nlohmann::ordered_json(r.gate.rhs)
                                                 : nlohmann::ordered_json("inf")}};
  j["r_n"] = r.r_n;
  j["theta_bar"] = r.theta_bar;
  j["gate_passed"] = r.gate_passed;
  j["theta_bar_gated"] = r.theta_bar_gated;
  j["theta_bar_truncated"] = r.theta_bar_truncated;
  j["iterations"] = r.iterations;
  j["final_step"] = r.final_step;
  j["converged"] = r.converged;
  j["max_step_ratio"] = r.max_step_ratio;
  j["negative_i_n"] = r.negative_i_n;
  return j.dump(indent);
}

}  // namespace fracdrift
