// Samples a random geometric graph, runs a small GraphSAGE on it and compares
// the pooled output against a larger graph from the same model.

#include <cstdio>

#include "mpnn_lab/mpnn_lab.hpp"

using namespace mpnn_lab;

int main() {
  const GraphModel model{Kernel::ball_indicator(0.3), product_signal(), MetricMeasureSpace::unit_square()};
  const MPNNSpec net = graphsage_random({1, 16, 16}, /*seed=*/7);

  const auto big = sample_graph(model, 2048, /*seed=*/1);
  const Vector ref = global_pool(gmpnn_forward(net, big));

  std::printf("%8s %14s %14s\n", "N", "min degree", "pooled dist");
  for (std::size_t n : {16u, 64u, 256u, 1024u}) {
    const auto g = sample_graph(model, n, /*seed=*/100 + n);
    const Vector out = global_pool(gmpnn_forward(net, g));
    std::printf("%8zu %14.6f %14.6f\n", n, g.degrees().minCoeff(), pooled_dist(out, ref));
  }
  return 0;
}
