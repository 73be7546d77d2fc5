// Prints the minimum node count and the pooled stability bound for a
// smoothed-ball kernel and a 1-layer identity-style network.

#include <cstdio>

#include "mpnn_lab/mpnn_lab.hpp"

using namespace mpnn_lab;

int main() {
  const Kernel k = Kernel::smoothed_ball(0.3, 0.05);
  const auto prof = regularity_profile(k, MetricMeasureSpace::unit_square(), /*dudley_c=*/1.0);
  const std::vector<LayerConstants> layers{{1.0, 1.0, 0.0, 0.0}};
  const auto sig = regularity_of(product_signal());

  std::printf("d_min = %.6f  L_W = %.1f  zeta = %.4f\n", prof.d_min, prof.lip_w, prof.zeta);
  for (double p : {0.05, 0.01}) {
    const auto n = min_nodes(prof, p);
    const auto b = pooled_bound(n, p, layers, prof, sig);
    std::printf("p = %.2f: min N = %llu, pooled bound at min N = %.4f (confidence %.2f)\n", p,
                static_cast<unsigned long long>(n), b.value, b.confidence);
  }
  return 0;
}
