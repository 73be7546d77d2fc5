#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "mpnn_lab/space.hpp"

namespace mpnn_lab {

enum class QuadratureKind { MonteCarlo, Grid };

// Equal-weight quadrature over the uniform measure of a built-in space.
// Grid uses cell midpoints, count = resolution per axis.
struct QuadratureSpec {
  QuadratureKind kind = QuadratureKind::Grid;
  std::size_t count = 64;
  std::uint64_t seed = 0;
  MetricMeasureSpace space = MetricMeasureSpace::unit_square();

  static QuadratureSpec monte_carlo(std::size_t samples, std::uint64_t seed,
                                    MetricMeasureSpace space = MetricMeasureSpace::unit_square()) {
    return {QuadratureKind::MonteCarlo, samples, seed, space};
  }
  static QuadratureSpec grid(std::size_t resolution,
                             MetricMeasureSpace space = MetricMeasureSpace::unit_square()) {
    return {QuadratureKind::Grid, resolution, 0, space};
  }
};

inline std::vector<Point> quadrature_nodes(const QuadratureSpec& q) {
  if (q.count == 0) throw std::invalid_argument("quadrature: node count must be positive");
  if (q.kind == QuadratureKind::MonteCarlo) return sample_points(q.space, q.count, q.seed);
  std::vector<Point> pts;
  const double h = 1.0 / static_cast<double>(q.count);
  if (q.space.coord_dim == 1) {
    pts.reserve(q.count);
    for (std::size_t i = 0; i < q.count; ++i) pts.emplace_back((static_cast<double>(i) + 0.5) * h);
  } else {
    pts.reserve(q.count * q.count);
    for (std::size_t i = 0; i < q.count; ++i)
      for (std::size_t j = 0; j < q.count; ++j)
        pts.emplace_back((static_cast<double>(i) + 0.5) * h, (static_cast<double>(j) + 0.5) * h);
  }
  return pts;
}

}  // namespace mpnn_lab
