#include <cmath>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "fracdrift/estimator.hpp"
#include "fracdrift/inference.hpp"
#include "fracdrift/kernels.hpp"
#include "test_support.hpp"

namespace fracdrift {
namespace {

using testing::constant_path;
using testing::function_path;
using testing::interpolate;
using testing::simulate;

EstimationResult passed_result(double center, double d_n) {
  EstimationResult r;
  r.gate_passed = true;
  r.theta_bar_gated = center;
  r.stats.d_n = d_n;
  return r;
}

TEST(NormalQuantile, SymmetryAndReferenceValue) {
  EXPECT_NEAR(normal_quantile(0.5), 0.0, 1e-15);
  for (double p : {0.01, 0.2, 0.4, 0.9875})
    EXPECT_NEAR(normal_quantile(1.0 - p), -normal_quantile(p), 1e-12);
  // Reference from a 30-digit CDF inversion.
  EXPECT_NEAR(normal_quantile(0.9875), 2.2414027276049446, 1e-8);
  EXPECT_THROW(normal_quantile(0.0), std::invalid_argument);
  EXPECT_THROW(normal_quantile(1.0), std::invalid_argument);
}

TEST(BuildInterval, ReferenceHalfWidth) {
  const ConfidenceInterval ci =
      build_interval(passed_result(1.1, 1.0), VarianceProxy::YoungProxy, 1.0, 50, 0.95);
  EXPECT_NEAR(ci.half_width, 2.0 * 2.2414027276049446 / std::sqrt(50.0), 1e-8);
  EXPECT_NEAR(ci.half_width, 0.63396, 1e-5);
  EXPECT_DOUBLE_EQ(ci.center, 1.1);
  EXPECT_TRUE(ci.contains(1.1 + 0.6));
  EXPECT_FALSE(ci.contains(1.1 + 0.64));
}

TEST(BuildInterval, QuadruplingPathsHalvesWidth) {
  const auto r = passed_result(0.8, 0.7);
  const double w1 = build_interval(r, VarianceProxy::RoughProxy, 2.3, 40).half_width;
  const double w4 = build_interval(r, VarianceProxy::RoughProxy, 2.3, 160).half_width;
  EXPECT_NEAR(w4, 0.5 * w1, 1e-14);
}

TEST(BuildInterval, ZeroProxyIsDegenerate) {
  const ConfidenceInterval ci = build_interval(passed_result(0.9, 2.0), VarianceProxy::YoungProxy, 0.0, 10);
  EXPECT_EQ(ci.half_width, 0.0);
  EXPECT_EQ(ci.lower(), ci.upper());
}

TEST(BuildInterval, RequiresPassedGate) {
  EstimationResult r = passed_result(1.0, 1.0);
  r.gate_passed = false;
  EXPECT_THROW(build_interval(r, VarianceProxy::YoungProxy, 1.0, 10), std::domain_error);
  EXPECT_THROW(build_interval(passed_result(1.0, 1.0), VarianceProxy::YoungProxy, -1.0, 10),
               std::invalid_argument);
}

TEST(YoungProxy, ConstantPathClosedForm) {
  // int int |t - s|^{2H-2} = 2 T^{2H} / (2H (2H - 1)), so the first term is
  // pi^2 T^{2H}; the second is H^2 phi^2 (T^{2H} / 2H)^2.
  const double h = 0.7, t = 1.3, c = 0.4;
  const ModelSpec m = model_b();
  const std::vector<SamplePath> paths{constant_path(FbmGrid(t, 60), c)};
  const double expected = (m.pi(c) * m.pi(c) * std::pow(t, 2 * h) +
                           std::pow(m.phi(c) * std::pow(t, 2 * h) / 2.0, 2)) /
                          (t * t);
  EXPECT_NEAR(compute_y_n(Cohort(paths, m, HurstParam(h))), expected, 1e-10 * expected);
}

TEST(YoungProxy, MatchesBruteForceOnSmoothPaths) {
  const double h = 0.7;
  const FbmGrid grid(1.0, 24);
  const std::vector<SamplePath> paths{
      function_path(grid, [](double t) { return 1.0 + 0.5 * std::sin(3 * t) + 0.2 * t * t; }),
      function_path(grid, [](double t) { return -0.3 + std::cos(5 * t); }),
      function_path(grid, [](double t) { return 2.0 * std::exp(-t); })};
  for (const ModelSpec& m : {model_a(), model_b(), model_c()}) {
    const double fast = compute_y_n(Cohort(paths, m, HurstParam(h)));
    const double brute = testing::brute_force_y_n(paths, m, h);
    EXPECT_NEAR(fast, brute, 1e-3 * brute) << m.name;
    EXPECT_NEAR(fast, brute, 1e-8 * brute) << m.name;
  }
}

TEST(YoungProxy, MatchesBruteForceOnSimulatedPaths) {
  for (double h : {0.6, 0.9}) {
    const auto paths = simulate(model_b(), h, 1.0, 24, 3, 71);
    const double fast = compute_y_n(Cohort(paths, model_b(), HurstParam(h)));
    EXPECT_NEAR(fast, testing::brute_force_y_n(paths, model_b(), h), 1e-8 * fast) << h;
  }
}

TEST(YoungProxy, VanishesWithoutDrift) {
  const auto paths = simulate(testing::null_drift_model(), 0.7, 1.0, 30, 2, 72);
  EXPECT_EQ(compute_y_n(Cohort(paths, testing::null_drift_model(), HurstParam(0.7))), 0.0);
}

TEST(YoungProxy, RegimeMismatch) {
  const auto paths = simulate(model_a(), 0.45, 1.0, 30, 2, 73);
  EXPECT_THROW(compute_y_n(Cohort(paths, model_a(), HurstParam(0.45))), RegimeError);
  EXPECT_THROW(compute_frak_y_n(Cohort(paths, model_a(), HurstParam(0.7)), 2.0), RegimeError);
}

// Variance of the Skorokhod integral at the true parameter, per path:
//   alpha_H int int pi pi |t - s|^{2H-2}
//   + alpha_H^2 int int phi(u) phi(v) E(u, v) E(v, u) du dv,
// E(u, v) = int_0^v |u - ub|^{2H-2} exp(theta0 int_ub^v psi) dub, the trace
// term of D_ub pi(X_v) D_vb pi(X_u). Outer integral by the trapezoid rule on a
// refined grid.
double skorokhod_variance_proxy(const std::vector<SamplePath>& paths, const ModelSpec& m, double h,
                                double theta0) {
  const double gamma = 2 * h - 2, alpha = h * (2 * h - 1);
  double total = 0.0;
  for (const auto& p : paths) {
    const std::size_t size = p.x_path.size();
    const double dt = p.grid.dt();
    std::vector<double> pi(size), phi(size), psi(size), prefix(size, 0.0);
    for (std::size_t k = 0; k < size; ++k) {
      pi[k] = m.pi(p.x_path[k]);
      phi[k] = m.phi(p.x_path[k]);
      psi[k] = m.psi(p.x_path[k]);
      if (k > 0) prefix[k] = prefix[k - 1] + 0.5 * dt * (psi[k] + psi[k - 1]);
    }
    // exp(-theta0 P) on a refined grid; E(u, v) = exp(theta0 P(v)) int_0^v |u - ub|^gamma
    // exp(-theta0 P(ub)) dub with the factor interpolated linearly.
    const std::size_t refine = 4, m_pts = (size - 1) * refine + 1;
    const double du = dt / refine;
    std::vector<double> damp(m_pts), grow(m_pts);
    for (std::size_t a = 0; a < m_pts; ++a) {
      const double pa = interpolate(prefix, dt, a * du);
      damp[a] = std::exp(-theta0 * pa);
      grow[a] = std::exp(theta0 * pa);
    }
    std::vector<double> e(m_pts * m_pts);
    for (std::size_t a = 0; a < m_pts; ++a)
      for (std::size_t b = 0; b < m_pts; ++b)
        e[a * m_pts + b] = grow[b] * testing::linear_power_integral(damp, du, gamma, a * du, b);
    double trace = 0.0;
    for (std::size_t a = 0; a < m_pts; ++a)
      for (std::size_t b = 0; b < m_pts; ++b) {
        const double wa = (a == 0 || a + 1 == m_pts) ? 0.5 : 1.0;
        const double wb = (b == 0 || b + 1 == m_pts) ? 0.5 : 1.0;
        trace += wa * wb * interpolate(phi, dt, a * du) * interpolate(phi, dt, b * du) *
                 e[a * m_pts + b] * e[b * m_pts + a];
      }
    total += alpha * testing::kernel_double_integral(pi, dt, gamma) + alpha * alpha * trace * du * du;
  }
  const double t = paths.front().grid.t_final();
  return total / (static_cast<double>(paths.size()) * t * t);
}

TEST(YoungProxy, DominatesSkorokhodVariance) {
  for (const ModelSpec& m : {model_a(), model_b(), model_c()})
    for (double h : {0.6, 0.8}) {
      const auto paths = simulate(m, h, 1.0, 24, 3, 74);
      const double proxy = compute_y_n(Cohort(paths, m, HurstParam(h)));
      const double truth = skorokhod_variance_proxy(paths, m, h, 1.0);
      EXPECT_GT(truth, 0.0);
      EXPECT_LE(truth, proxy) << m.name << " H=" << h;
    }
}

TEST(RoughProxy, VanishesWithoutDrift) {
  const auto paths = simulate(testing::null_drift_model(), 0.4, 1.0, 30, 2, 75);
  EXPECT_EQ(compute_frak_y_n(Cohort(paths, testing::null_drift_model(), HurstParam(0.4)), 3.0),
            0.0);
}

TEST(RoughProxy, NondecreasingInThetaMax) {
  for (const ModelSpec& m : {model_a(), model_b(), model_c()}) {
    const auto paths = simulate(m, 0.4, 1.0, 100, 6, 76);
    const Cohort cohort(paths, m, HurstParam(0.4));
    double previous = 0.0;
    for (double theta_max : {0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0}) {
      const double v = compute_frak_y_n(cohort, theta_max);
      EXPECT_GE(v, previous) << m.name << " " << theta_max;
      previous = v;
    }
  }
}

TEST(RoughProxy, DuplicatingPathsChangesNothing) {
  const auto paths = simulate(model_c(), 0.4, 1.0, 80, 5, 77);
  std::vector<SamplePath> doubled = paths;
  doubled.insert(doubled.end(), paths.begin(), paths.end());
  const double a = compute_frak_y_n(Cohort(paths, model_c(), HurstParam(0.4)), 3.0);
  const double b = compute_frak_y_n(Cohort(doubled, model_c(), HurstParam(0.4)), 3.0);
  EXPECT_NEAR(a, b, 1e-13 * a);
  EXPECT_THROW(compute_frak_y_n(Cohort(paths, model_c(), HurstParam(0.4)), 0.0),
               std::invalid_argument);
}

TEST(RoughProxy, DominatesPathwiseVariance) {
  // Per path: (int pi dB + int phi Lambda(theta0))^2 with the pathwise integral
  // B(X_T) - B(x0) - theta0 int b^2, against the bound at theta_max >= theta0.
  const double theta0 = 1.0;
  for (const ModelSpec& m : {model_a(), model_b(), model_c()})
    for (double h : {0.4, 0.5}) {
      const auto paths = simulate(m, h, theta0, 150, 8, 78);
      const Cohort cohort(paths, m, HurstParam(h));
      double truth = 0.0;
      for (std::size_t i = 0; i < cohort.size(); ++i) {
        const double pathwise = cohort.antiderivative_increment(i) - theta0 * cohort.drift_energy(i);
        const double v = pathwise + phi_lambda_integral(cohort.kernel_data(i), theta0, HurstParam(h),
                                                        cohort.vanishing_weights());
        truth += v * v;
      }
      truth /= static_cast<double>(cohort.size());
      for (double theta_max : {1.0, 3.0})
        EXPECT_LE(truth, compute_frak_y_n(cohort, theta_max)) << m.name << " H=" << h;
    }
}

TEST(IntervalJson, Fields) {
  const ConfidenceInterval ci = build_interval(passed_result(1.0, 1.0), VarianceProxy::RoughProxy, 4.0, 16);
  const std::string json = to_json(ci);
  EXPECT_NE(json.find("\"proxy\": \"FrakY_N\""), std::string::npos);
  EXPECT_NE(json.find("\"lower\""), std::string::npos);
  EXPECT_EQ(to_string(VarianceProxy::YoungProxy), "Y_N");
}

}  // namespace
}  // namespace fracdrift
