#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "fracdrift/young2d.hpp"
#include "test_support.hpp"

using namespace fracdrift;

namespace {

// Least-squares slope of log(err) against log(n).
double log_slope(const std::vector<double>& n, const std::vector<double>& err) {
  double mx = 0, my = 0;
  for (std::size_t k = 0; k < n.size(); ++k) {
    mx += std::log(n[k]);
    my += std::log(err[k]);
  }
  mx /= n.size();
  my /= n.size();
  double sxy = 0, sxx = 0;
  for (std::size_t k = 0; k < n.size(); ++k) {
    sxy += (std::log(n[k]) - mx) * (std::log(err[k]) - my);
    sxx += (std::log(n[k]) - mx) * (std::log(n[k]) - mx);
  }
  return sxy / sxx;
}

TestIntegrand zero_integrand() {
  TestIntegrand x;
  x.value = [](double, double) { return 0.0; };
  x.reduced = [](double, double) { return 0.0; };
  x.vanishing_order = 1.0;
  x.holder_alpha = 0.3;
  return x;
}

}  // namespace

TEST(RectangularIncrement, DegenerateCellsVanish) {
  const HurstParam h(0.7);
  EXPECT_EQ(rectangular_increment(0.3, 0.8, 0.3, 0.9, h), 0.0);
  EXPECT_NEAR(rectangular_increment(0.2, 0.6, 0.5, 0.6, h), 0.0, 1e-16);
}

TEST(RectangularIncrement, BrownianDisjointCellsVanish) {
  const HurstParam h(0.5);
  // Cells [0.1, 0.3] and [0.5, 0.9] do not overlap.
  EXPECT_NEAR(rectangular_increment(0.1, 0.5, 0.3, 0.9, h), 0.0, 1e-15);
  // Overlap [0.2, 0.3] gives its length.
  EXPECT_NEAR(rectangular_increment(0.1, 0.2, 0.3, 0.6, h), 0.1, 1e-15);
}

TEST(RectangularIncrement, CellClosedFormMatchesCovariance) {
  for (double hv : {0.4, 0.5, 0.7}) {
    const HurstParam h(hv);
    const double dt = 1.0 / 37.0;
    for (std::size_t i : {0u, 3u, 20u})
      for (std::size_t j : {0u, 1u, 4u, 21u, 36u}) {
        const double ti = i * dt, tj = j * dt;
        // Covariance of the increments over [t_i, t_i+1] and [t_j, t_j+1].
        const double generic = rectangular_increment(ti, tj, ti + dt, tj + dt, h);
        EXPECT_NEAR(rectangular_increment_cell(i, j, dt, h), generic, 1e-12);
      }
  }
}

TEST(RiemannSum, MatchesDirectCovarianceSum) {
  const HurstParam h(0.45);
  const TestIntegrand x = power_integrand(0.3);
  const std::size_t n = 40;
  const double dt = 1.0 / n;
  double direct = 0.0;
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i <= j; ++i)
      direct += x.value(i * dt, j * dt) * rectangular_increment_cell(i, j, dt, h);
  EXPECT_NEAR(riemann_sum(x, h, n, 1.0), direct, 1e-13);
  EXPECT_EQ(riemann_sum(zero_integrand(), h, n, 1.0), 0.0);
  EXPECT_THROW(riemann_sum(x, h, 0, 1.0), std::invalid_argument);
}

TEST(RiemannSum, ConvergesToClosedForm) {
  const TestIntegrand x = power_integrand(0.3);
  EXPECT_NEAR(power_integrand_limit(0.3, HurstParam(0.4), 1.0), -8.0 / 11.0, 1e-14);
  // At H = 0.7 the rate alpha + 2H - 1 = 0.7 is fast enough for 1% at n = 2048.
  const HurstParam h(0.7);
  const double limit = power_integrand_limit(0.3, h, 1.0);
  EXPECT_NEAR(riemann_sum(x, h, 2048, 1.0), limit, 0.01 * std::abs(limit));
}

TEST(RiemannSum, ErrorWithinDissectionBound) {
  // |I - limit| <= C |pi_n|^{alpha + 2H - 1}; the constant is fitted at n = 256
  // and must not grow with n.
  for (auto [hv, a] : std::vector<std::pair<double, double>>{{0.4, 0.3}, {0.45, 0.25}, {0.7, 0.3}}) {
    const HurstParam h(hv);
    const double limit = power_integrand_limit(a, h, 1.0);
    const double rate = a + 2 * hv - 1;
    double constant = 0.0;
    for (std::size_t n = 256; n <= 4096; n *= 4) {
      const double scaled = std::abs(riemann_sum(power_integrand(a), h, n, 1.0) - limit) /
                            std::pow(1.0 / n, rate);
      if (constant == 0.0) constant = scaled;
      EXPECT_LE(scaled, 1.05 * constant) << "H=" << hv << " n=" << n;
    }
  }
}

TEST(RiemannSum, ConvergenceOrderAndDiagonalBand) {
  struct Case {
    double h, alpha;
  };
  for (Case c : {Case{0.4, 0.3}, Case{0.7, 0.3}, Case{0.45, 0.3}}) {
    const HurstParam h(c.h);
    const TestIntegrand x = power_integrand(c.alpha);
    const double limit = power_integrand_limit(c.alpha, h, 1.0);
    std::vector<double> ns, errs, bands;
    for (std::size_t n = 256; n <= 4096; n *= 2) {
      const RiemannSum sum = riemann_sum_split(x, h, n, 1.0);
      ns.push_back(static_cast<double>(n));
      errs.push_back(std::abs(sum.total - limit));
      bands.push_back(std::abs(sum.diagonal_band));
    }
    const double rate = c.alpha + 2 * c.h - 1;
    EXPECT_LE(log_slope(ns, errs), -(rate - 0.1)) << "H=" << c.h;
    EXPECT_NEAR(log_slope(ns, bands), -rate, 0.1) << "H=" << c.h;
  }
}

TEST(WeightedDoubleIntegral, ExactForPowerFamily) {
  for (auto [hv, a] : std::vector<std::pair<double, double>>{{0.4, 0.3}, {0.7, 0.5}, {0.45, 0.2}}) {
    const HurstParam h(hv);
    const double w = weighted_double_integral(power_integrand(a), h, FbmGrid(1.0, 64));
    EXPECT_NEAR(w, power_integrand_limit(a, h, 1.0), 1e-12);
  }
  EXPECT_NEAR(weighted_double_integral(power_integrand(0.3), HurstParam(0.4), FbmGrid(1.0, 64)),
              -8.0 / 11.0, 1e-3);
  EXPECT_EQ(weighted_double_integral(zero_integrand(), HurstParam(0.4), FbmGrid(1.0, 16)), 0.0);
}

TEST(WeightedDoubleIntegral, AgreesWithRiemannSumOnFastSuite) {
  // Integrands whose rate alpha + 2H - 1 is at least 0.5; slower members of the
  // suite are reported by the acceptance run.
  const std::size_t n = 4096;
  for (double hv : {0.7, 0.9}) {
    const HurstParam h(hv);
    std::vector<TestIntegrand> suite;
    for (double a : {0.3, 0.5}) suite.push_back(power_integrand(a));
    const auto paths = fracdrift::testing::simulate(model_b(), hv, 1.0, n, 1, 5);
    suite.push_back(l_kernel_integrand(paths[0], model_b(), 1.0, hv - 0.05));
    for (const auto& x : suite) {
      const double r = riemann_sum(x, h, n, 1.0);
      const double w = weighted_double_integral(x, h, FbmGrid(1.0, n));
      EXPECT_NEAR(r, w, 0.01 * std::abs(w)) << x.label << " H=" << hv;
    }
  }
}

TEST(WeightedDoubleIntegral, LKernelAgreesInRoughRegime) {
  // L vanishes linearly at the diagonal, so the rate is 2H even for H < 1/2.
  const std::size_t n = 4096;
  for (double hv : {0.4, 0.45}) {
    const auto paths = fracdrift::testing::simulate(model_b(), hv, 1.0, n, 1, 5);
    const TestIntegrand x = l_kernel_integrand(paths[0], model_b(), 1.0, hv - 0.05);
    const double r = riemann_sum(x, HurstParam(hv), n, 1.0);
    const double w = weighted_double_integral(x, HurstParam(hv), FbmGrid(1.0, n));
    EXPECT_NEAR(r, w, 0.01 * std::abs(w)) << "H=" << hv;
  }
}

TEST(HolderConditions, PowerFamilySatisfiesBoth) {
  for (double a : {0.2, 0.3, 0.5}) {
    const HolderCheck check = check_holder_conditions(power_integrand(a), 1.0, 24);
    EXPECT_TRUE(check.holds()) << a;
    EXPECT_NEAR(check.worst_bound_ratio, 1.0, 1e-12);
  }
  TestIntegrand bad = power_integrand(0.3);
  bad.holder_const = 0.5;
  EXPECT_FALSE(check_holder_conditions(bad, 1.0, 12).holds());
}

TEST(ConvergenceReport, CsvLayout) {
  const HurstParam h(0.4);
  const auto rows = convergence_study(power_integrand(0.3), h, 1.0, -8.0 / 11.0, {64, 128, 256});
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_GT(rows[0].abs_error, rows[2].abs_error);
  std::ostringstream out;
  write_convergence_csv(out, rows);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "n,riemann_sum,reference,abs_error");
  std::getline(in, line);
  EXPECT_EQ(line.substr(0, 3), "64,");
  std::size_t count = 1;
  while (std::getline(in, line)) ++count;
  EXPECT_EQ(count, 3u);
}
