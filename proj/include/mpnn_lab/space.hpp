#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "mpnn_lab/rng.hpp"

namespace mpnn_lab {

// A point of a built-in space; holds up to two coordinates.
class Point {
 public:
  Point() = default;
  explicit Point(double x) : c_{x, 0.0}, dim_(1) {}
  Point(double x, double y) : c_{x, y}, dim_(2) {}

  std::size_t size() const noexcept { return dim_; }
  double operator[](std::size_t i) const noexcept { return c_[i]; }
  double& operator[](std::size_t i) noexcept { return c_[i]; }

  friend bool operator==(const Point& a, const Point& b) {
    return a.dim_ == b.dim_ && a.c_ == b.c_;
  }

 private:
  std::array<double, 2> c_{};
  std::size_t dim_ = 0;
};

enum class SpaceKind { UnitSquareUniform, UnitIntervalUniform };

struct MetricMeasureSpace {
  SpaceKind kind = SpaceKind::UnitSquareUniform;
  std::size_t coord_dim = 2;
  double minkowski_dim = 2.0;
  // Reported as 1 for both built-in spaces; the Euclidean diameter of the
  // square is sqrt(2) and the metric is not rescaled.
  double diameter = 1.0;

  static MetricMeasureSpace unit_square() { return {SpaceKind::UnitSquareUniform, 2, 2.0, 1.0}; }
  static MetricMeasureSpace unit_interval() {
    return {SpaceKind::UnitIntervalUniform, 1, 1.0, 1.0};
  }

  bool contains(const Point& x) const {
    if (x.size() != coord_dim) return false;
    for (std::size_t i = 0; i < coord_dim; ++i)
      if (!(x[i] >= 0.0 && x[i] <= 1.0)) return false;
    return true;
  }
};

inline std::string to_string(SpaceKind k) {
  return k == SpaceKind::UnitSquareUniform ? "unit_square" : "unit_interval";
}

inline Point make_point(const MetricMeasureSpace& space, double x, double y = 0.0) {
  return space.coord_dim == 1 ? Point(x) : Point(x, y);
}

// Euclidean distance without dimension checks; hot loops use this.
inline double raw_distance(const Point& x, const Point& y) noexcept {
  const double dx = x[0] - y[0];
  const double dy = x[1] - y[1];
  return std::sqrt(dx * dx + dy * dy);
}

inline double distance(const MetricMeasureSpace& space, const Point& x, const Point& y) {
  if (x.size() != space.coord_dim || y.size() != space.coord_dim)
    throw std::invalid_argument("distance: point dimension does not match the space");
  return raw_distance(x, y);
}

inline Point sample_point(const MetricMeasureSpace& space, Rng& rng) {
  if (space.coord_dim == 1) return Point(rng.uniform());
  const double x = rng.uniform();
  const double y = rng.uniform();
  return Point(x, y);
}

inline std::vector<Point> sample_points(const MetricMeasureSpace& space, std::size_t n,
                                        std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("sample_points: n must be positive");
  Rng rng(seed);
  std::vector<Point> pts;
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) pts.push_back(sample_point(space, rng));
  return pts;
}

// Evenly spaced grid including the boundary (0 and 1 on every axis).
inline std::vector<Point> boundary_grid(const MetricMeasureSpace& space, std::size_t res) {
  if (res < 2) throw std::invalid_argument("boundary_grid: resolution must be at least 2");
  std::vector<Point> pts;
  const double h = 1.0 / static_cast<double>(res - 1);
  if (space.coord_dim == 1) {
    for (std::size_t i = 0; i < res; ++i) pts.emplace_back(static_cast<double>(i) * h);
  } else {
    for (std::size_t i = 0; i < res; ++i)
      for (std::size_t j = 0; j < res; ++j)
        pts.emplace_back(static_cast<double>(i) * h, static_cast<double>(j) * h);
  }
  return pts;
}

}  // namespace mpnn_lab
