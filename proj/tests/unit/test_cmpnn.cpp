#include <gtest/gtest.h>

#include <memory>

#include "mpnn_lab/cmpnn.hpp"
#include "mpnn_lab/errors.hpp"
#include "mpnn_lab/metrics.hpp"
#include "test_support.hpp"

using namespace mpnn_lab;

TEST(CMPNN, ConstantSignalIsAFixedPointOfMeanAggregation) {
  const auto q = QuadratureSpec::grid(24);
  const auto pts = quadrature_nodes(QuadratureSpec::monte_carlo(50, 3));
  const Matrix out = cmpnn_forward(mean_aggregation_net(1), Kernel::smoothed_ball(0.3, 0.05),
                                   constant_signal(0.35), pts, q);
  for (Eigen::Index i = 0; i < out.rows(); ++i) EXPECT_NEAR(out(i, 0), 0.35, 1e-14);
  EXPECT_NEAR(cmpnn_pool(mean_aggregation_net(1), Kernel::ball_indicator(0.2), constant_signal(0.35), q)[0],
              0.35, 1e-14);
}

TEST(CMPNN, ConstantKernelAggregateIsTheQuadratureMean) {
  // Midpoints integrate x*y exactly: mean over the grid is 1/4.
  const Vector m = continuous_aggregate(Kernel::constant(1.0), product_signal(), neighbor_message(1),
                                        Point(0.3, 0.8), QuadratureSpec::grid(16));
  EXPECT_NEAR(m[0], 0.25, 1e-14);
}

TEST(CMPNN, GridEvaluationEqualsGraphOnQuadratureNodes) {
  const auto q = QuadratureSpec::grid(20);
  const auto nodes = quadrature_nodes(q);
  const Kernel k = Kernel::smoothed_ball(0.3, 0.05);
  const auto net = graphsage_random({1, 8, 4}, 2);
  const SampledGraph g(k, nodes, sample_signal(product_signal(), nodes));
  const Matrix via_graph = gmpnn_forward(net, g);
  const Matrix via_continuum = cmpnn_forward(net, k, product_signal(), nodes, q);
  EXPECT_LT(sup_norm(via_graph - via_continuum), 1e-12);
}

TEST(CMPNN, PoolEqualsMeanOfForwardOnQuadratureNodes) {
  const auto q = QuadratureSpec::monte_carlo(300, 9);
  const Kernel k = Kernel::ball_indicator(0.4);
  const auto net = graphsage_random({1, 6, 3}, 4);
  const Vector pool = cmpnn_pool(net, k, sum_signal(), q);
  const Vector direct = global_pool(cmpnn_forward(net, k, sum_signal(), quadrature_nodes(q), q));
  EXPECT_LT(pooled_dist(pool, direct), 1e-12);
}

TEST(CMPNN, MonteCarloQuadratureConvergesToGridReference) {
  const Kernel k = Kernel::smoothed_ball(0.3, 0.05);
  const auto net = graphsage_random({1, 8, 4}, 1);
  const Vector ref = cmpnn_pool(net, k, product_signal(), QuadratureSpec::grid(64));
  double coarse = 0.0, fine = 0.0;
  for (std::uint64_t s = 0; s < 5; ++s) {
    coarse += pooled_dist(cmpnn_pool(net, k, product_signal(), QuadratureSpec::monte_carlo(64, s)), ref);
    fine += pooled_dist(cmpnn_pool(net, k, product_signal(), QuadratureSpec::monte_carlo(1024, s)), ref);
  }
  EXPECT_LT(fine, coarse);
  EXPECT_LT(fine / 5.0, 0.05);
}

TEST(CMPNN, NoiseSignalIsRejected) {
  const auto q = QuadratureSpec::grid(8);
  const auto s = noise_signal(1.0, 1);
  EXPECT_THROW(cmpnn_pool(mean_aggregation_net(1), Kernel::ball_indicator(0.5), s, q), UnsupportedSignalError);
  EXPECT_THROW(cmpnn_forward(mean_aggregation_net(1), Kernel::ball_indicator(0.5), s, {Point(0.5, 0.5)}, q),
               UnsupportedSignalError);
  EXPECT_THROW(continuous_aggregate(Kernel::ball_indicator(0.5), s, neighbor_message(1), Point(0.5, 0.5), q),
               UnsupportedSignalError);
}

TEST(CMPNN, WidthMismatchIsRejected) {
  const auto q = QuadratureSpec::grid(8);
  EXPECT_THROW(cmpnn_pool(mean_aggregation_net(2), Kernel::ball_indicator(0.5), product_signal(), q),
               std::invalid_argument);
}

TEST(CMPNN, LargeGraphReference) {
  const GraphModel model{Kernel::smoothed_ball(0.3, 0.05), product_signal()};
  auto parent = std::make_shared<const SampledGraph>(sample_graph(model, 500, 7));
  auto net = std::make_shared<const MPNNSpec>(graphsage_random({1, 4, 2}, 3));
  const auto ref = reference_from_large_graph(net, parent);
  const Matrix full = gmpnn_forward(*net, *parent);
  EXPECT_EQ(ref.outputs(), full);
  EXPECT_EQ(ref.pooled(), global_pool(full));
  const auto sub = subsample_graph(*parent, 40, 1);
  const Matrix r = ref.restrict_to(sub.index);
  for (std::size_t k = 0; k < 40; ++k)
    EXPECT_EQ(r.row(static_cast<Eigen::Index>(k)), full.row(static_cast<Eigen::Index>(sub.index[k])));
}
