#include "fracdrift/sde.hpp"

#include <cmath>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace fracdrift {

SolverError::SolverError(std::size_t step, double last_state)
    : std::runtime_error("non-finite state at step " + std::to_string(step) +
                         " (last finite state " + std::to_string(last_state) + ")"),
      step_(step),
      last_state_(last_state) {}

SamplePath integrate(const ModelSpec& model, double theta0, double x0, const FbmPath& fbm,
                     HurstParam /*h*/) {
  const std::size_t n = fbm.grid.n_steps();
  if (fbm.values.size() != n + 1) throw std::invalid_argument("fBm path does not match its grid");
  const double dt = fbm.grid.dt();
  SamplePath path{fbm.grid, fbm.values, std::vector<double>(n + 1), x0, theta0};
  double x = x0;
  path.x_path[0] = x0;
  for (std::size_t k = 0; k < n; ++k) {
    const double db = fbm.values[k + 1] - fbm.values[k];
    if (!std::isfinite(db)) throw SolverError(k, x);
    const double s = model.sigma(x);
    const double next = x + theta0 * model.b(x) * dt + s * db + 0.5 * s * model.sigma_prime(x) * db * db;
    if (!std::isfinite(next)) throw SolverError(k, x);
    x = next;
    path.x_path[k + 1] = x;
  }
  return path;
}

double quadratic_drift_functional(const SamplePath& path, const ModelSpec& model) {
  const auto& xs = path.x_path;
  const std::size_t n = xs.size() - 1;
  double acc = 0.0;
  for (std::size_t k = 0; k <= n; ++k) {
    const double v = model.b(xs[k]);
    acc += (k == 0 || k == n ? 0.5 : 1.0) * v * v;
  }
  return acc * path.grid.dt();
}

double integrate_drift(const ModelSpec& model, double from, double to) {
  if (from == to) return 0.0;
  using boost::math::quadrature::gauss_kronrod;
  double error = 0.0;
  const double value = gauss_kronrod<double, 31>::integrate(
      [&model](double x) { return model.b(x); }, from, to, 20, 1e-14, &error);
  (void)error;
  return value;
}

double antiderivative_increment(const SamplePath& path, const ModelSpec& model) {
  const double xt = path.terminal();
  if (xt == path.x0) return 0.0;
  if (model.has_closed_antiderivative()) return model.b_antideriv(xt) - model.b_antideriv(path.x0);
  return integrate_drift(model, path.x0, xt);
}

const FbmGrid& common_grid(const std::vector<SamplePath>& paths) {
  if (paths.empty()) throw std::invalid_argument("empty cohort");
  const FbmGrid& g = paths.front().grid;
  for (const auto& p : paths) {
    if (!(p.grid == g)) throw std::invalid_argument("paths do not share a common grid");
    if (p.x_path.size() != g.size()) throw std::invalid_argument("path length does not match grid");
  }
  return g;
}

}  // namespace fracdrift
