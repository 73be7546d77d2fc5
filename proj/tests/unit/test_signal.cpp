#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "mpnn_lab/errors.hpp"
#include "mpnn_lab/signal.hpp"

using namespace mpnn_lab;

namespace {

// Largest observed |f(x) - f(y)| / |x - y| over random nearby pairs.
double lipschitz_probe(const Signal& s, std::uint64_t seed) {
  Rng rng(seed);
  double worst = 0.0;
  for (int i = 0; i < 20000; ++i) {
    const Point x(rng.uniform(), rng.uniform());
    const Point y(std::clamp(x[0] + rng.uniform(-0.01, 0.01), 0.0, 1.0),
                  std::clamp(x[1] + rng.uniform(-0.01, 0.01), 0.0, 1.0));
    const double d = raw_distance(x, y);
    if (d == 0.0) continue;
    worst = std::max(worst, std::abs(eval_signal(s, x)[0] - eval_signal(s, y)[0]) / d);
  }
  return worst;
}

}  // namespace

TEST(Signal, ProductValues) {
  const auto s = product_signal();
  EXPECT_EQ(eval_signal(s, Point(1.0, 1.0))[0], 1.0);
  EXPECT_EQ(eval_signal(s, Point(0.5, 0.25))[0], 0.125);
  EXPECT_EQ(s.sup_f, 1.0);
  EXPECT_DOUBLE_EQ(s.lip_f, std::numbers::sqrt2);
}

TEST(Signal, SumAndCoordinate) {
  EXPECT_EQ(eval_signal(sum_signal(), Point(0.25, 0.5))[0], 0.75);
  EXPECT_EQ(sum_signal().sup_f, 2.0);
  EXPECT_EQ(eval_signal(coordinate_signal(1), Point(0.25, 0.5))[0], 0.5);
  const auto c = constant_signal(-3.0, 2);
  EXPECT_EQ(c.dim, 2u);
  EXPECT_EQ(eval_signal(c, Point(0.1, 0.1))[1], -3.0);
  EXPECT_EQ(c.sup_f, 3.0);
  EXPECT_EQ(c.lip_f, 0.0);
}

TEST(Signal, RecordedLipschitzConstantsDominateProbes) {
  EXPECT_LE(lipschitz_probe(product_signal(), 1), product_signal().lip_f + 1e-12);
  EXPECT_LE(lipschitz_probe(sum_signal(), 2), sum_signal().lip_f + 1e-12);
}

TEST(Signal, BandlimitedIsRealNormalizedAndSeeded) {
  const auto a = bandlimited_signal(5, 64, 8);
  const auto b = bandlimited_signal(5, 64, 8);
  const auto c = bandlimited_signal(6, 64, 8);
  EXPECT_NEAR(a.sup_f, 1.0, 1e-12);
  EXPECT_TRUE(std::isfinite(a.lip_f));
  EXPECT_GT(a.lip_f, 0.0);
  EXPECT_EQ(a.grid->values, b.grid->values);
  EXPECT_NE(a.grid->values, c.grid->values);
  for (double v : a.grid->values) {
    EXPECT_TRUE(std::isfinite(v));
    EXPECT_LE(std::abs(v), 1.0 + 1e-12);
  }
}

TEST(Signal, BandlimitedMatchesDirectDftOracle) {
  // Independent evaluation of one grid value straight from the coefficients.
  const std::size_t n = 32, band = 4;
  const auto g = make_bandlimited_grid(77, n, band);
  Rng rng(77);
  std::vector<std::complex<double>> coef(band * band);
  for (auto& v : coef) {
    const double re = rng.normal();
    const double im = rng.normal();
    v = {re, im};
  }
  std::vector<double> raw(n * n);
  double peak = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      std::complex<double> acc = 0.0;
      for (std::size_t a = 0; a < band; ++a)
        for (std::size_t b = 0; b < band; ++b) {
          const double k1 = static_cast<double>(a) - 2.0, k2 = static_cast<double>(b) - 2.0;
          const double ang = 2.0 * std::numbers::pi * (k1 * static_cast<double>(i) + k2 * static_cast<double>(j)) /
                             static_cast<double>(n);
          acc += coef[a * band + b] * std::complex<double>(std::cos(ang), std::sin(ang));
        }
      raw[i * n + j] = acc.real() / static_cast<double>(n * n);
      peak = std::max(peak, std::abs(raw[i * n + j]));
    }
  for (std::size_t k = 0; k < n * n; ++k) EXPECT_NEAR(g->values[k], raw[k] / peak, 1e-12);
}

TEST(Signal, BandlimitedPointEvaluationUsesNearestCell) {
  const auto s = bandlimited_signal(3, 16, 4);
  EXPECT_EQ(eval_signal(s, Point(0.0, 0.0))[0], s.grid->values[0]);
  EXPECT_EQ(eval_signal(s, Point(1.0, 1.0))[0], s.grid->values.back());
}

TEST(Signal, NoiseRefusesPointEvaluation) {
  const auto s = noise_signal(1.0, 3);
  EXPECT_FALSE(s.point_evaluable());
  EXPECT_FALSE(s.lipschitz());
  EXPECT_TRUE(std::isinf(s.sup_f));
  EXPECT_THROW(eval_signal(s, Point(0.5, 0.5)), UnsupportedSignalError);
}

TEST(Signal, NoiseFeaturesAreSeededPerGraph) {
  const auto s = noise_signal(2.0, 3);
  const auto pts = sample_points(MetricMeasureSpace::unit_square(), 5000, 1);
  const Matrix a = node_features(s, pts, 10);
  const Matrix b = node_features(s, pts, 10);
  const Matrix c = node_features(s, pts, 11);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
  EXPECT_NEAR(a.mean(), 0.0, 5.0 * 2.0 / std::sqrt(5000.0));
  EXPECT_NEAR(std::sqrt((a.array() * a.array()).mean()), 2.0, 0.1);
}

TEST(Signal, ClosedFormFeaturesAreSignalValues) {
  const auto pts = sample_points(MetricMeasureSpace::unit_square(), 10, 1);
  const Matrix f = node_features(product_signal(), pts, 99);
  for (std::size_t i = 0; i < pts.size(); ++i) EXPECT_EQ(f(static_cast<Eigen::Index>(i), 0), pts[i][0] * pts[i][1]);
}

TEST(Signal, Factory) {
  EXPECT_EQ(make_signal("product", 0).name, "product");
  EXPECT_EQ(make_signal("bandlimited", 4).kind, SignalKind::GridBandlimited);
  EXPECT_EQ(make_signal("noise", 4, 0.5).sigma, 0.5);
  EXPECT_EQ(make_signal("sum", 0).name, "sum");
  EXPECT_THROW(make_signal("triangle", 0), std::invalid_argument);
}
