#include <gtest/gtest.h>

#include <cmath>

#include "mpnn_lab/metrics.hpp"
#include "mpnn_lab/rng.hpp"

using namespace mpnn_lab;

TEST(Metrics, Norm2InfHandComputed) {
  Matrix f(2, 2);
  f << 3, -4, 0, 1;
  // rows: max 4 and 1 -> sqrt((16 + 1) / 2)
  EXPECT_DOUBLE_EQ(norm_2inf(f), std::sqrt(8.5));
  EXPECT_THROW(norm_2inf(Matrix(0, 1)), std::invalid_argument);
}

TEST(Metrics, DistXIsAMetric) {
  Rng rng(1);
  for (int t = 0; t < 50; ++t) {
    Matrix a(5, 3), b(5, 3), c(5, 3);
    for (Eigen::Index i = 0; i < 5; ++i)
      for (Eigen::Index j = 0; j < 3; ++j) {
        a(i, j) = rng.normal();
        b(i, j) = rng.normal();
        c(i, j) = rng.normal();
      }
    EXPECT_EQ(dist_x(a, a), 0.0);
    EXPECT_EQ(dist_x(a, b), dist_x(b, a));
    EXPECT_LE(dist_x(a, c), dist_x(a, b) + dist_x(b, c) + 1e-12);
    EXPECT_GE(dist_x(a, b), 0.0);
  }
  EXPECT_THROW(dist_x(Matrix(2, 1), Matrix(3, 1)), std::invalid_argument);
}

TEST(Metrics, DistXBoundsPooledDistance) {
  // The pooled difference is an average of rows, so its sup-norm is at most
  // the 2;inf norm of the row differences.
  Rng rng(2);
  for (int t = 0; t < 50; ++t) {
    Matrix a(7, 2), b(7, 2);
    for (Eigen::Index i = 0; i < 7; ++i)
      for (Eigen::Index j = 0; j < 2; ++j) {
        a(i, j) = rng.normal();
        b(i, j) = rng.normal();
      }
    const Vector pa = a.colwise().mean().transpose(), pb = b.colwise().mean().transpose();
    EXPECT_LE(pooled_dist(pa, pb), dist_x(a, b) + 1e-12);
  }
}

TEST(Metrics, PooledDistIsSupNorm) {
  Vector a(3), b(3);
  a << 1, 2, 3;
  b << 1.5, 0, 3;
  EXPECT_EQ(pooled_dist(a, b), 2.0);
  EXPECT_THROW(pooled_dist(a, Vector(2)), std::invalid_argument);
  EXPECT_THROW(sup_norm(Vector(0)), std::invalid_argument);
}

TEST(Metrics, LogLogFitRecoversPowerLaw) {
  std::vector<double> ns, errs;
  for (int k = 3; k <= 12; ++k) {
    ns.push_back(std::ldexp(1.0, k));
    errs.push_back(5.0 * std::pow(ns.back(), -0.5));
  }
  const auto fit = fit_loglog_slope(ns, errs);
  EXPECT_NEAR(fit.slope, -0.5, 1e-12);
  EXPECT_NEAR(fit.intercept, std::log2(5.0), 1e-12);
  EXPECT_NEAR(fit.residual, 0.0, 1e-12);
}

TEST(Metrics, LogLogFitResidualOfKnownScatter) {
  // log2 errors alternate +-0.1 around a line with slope -1 at four sizes.
  const std::vector<double> ns{2, 4, 8, 16};
  std::vector<double> errs;
  for (std::size_t i = 0; i < ns.size(); ++i) errs.push_back(std::exp2(-std::log2(ns[i]) + (i % 2 ? 0.1 : -0.1)));
  const auto fit = fit_loglog_slope(ns, errs);
  // OLS on x = 1..4, y = -x + (-0.1, 0.1, -0.1, 0.1): slope -1 + 0.04, intercept -0.1,
  // residuals (-0.04, 0.12, -0.12, 0.04)
  EXPECT_NEAR(fit.slope, -0.96, 1e-12);
  EXPECT_NEAR(fit.intercept, -0.1, 1e-12);
  EXPECT_NEAR(fit.residual, std::sqrt(0.008), 1e-12);
}

TEST(Metrics, LogLogFitValidation) {
  EXPECT_THROW(fit_loglog_slope({1}, {1}), std::invalid_argument);
  EXPECT_THROW(fit_loglog_slope({1, 2}, {1}), std::invalid_argument);
  EXPECT_THROW(fit_loglog_slope({1, 2}, {1, 0}), std::invalid_argument);
  EXPECT_THROW(fit_loglog_slope({2, 2}, {1, 3}), std::invalid_argument);
  EXPECT_THROW(fit_loglog_slope({0, 2}, {1, 3}), std::invalid_argument);
}
