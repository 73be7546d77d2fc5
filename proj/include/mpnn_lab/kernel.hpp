#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mpnn_lab/quadrature.hpp"
#include "mpnn_lab/space.hpp"

namespace mpnn_lab {

enum class KernelKind { Constant, BallIndicator, SmoothedBall };

// Isotropic kernel W(x, y) = w(d(x, y)).
struct Kernel {
  KernelKind kind = KernelKind::Constant;
  double c = 1.0;
  double r = 0.0;
  double delta = 0.0;

  static Kernel constant(double c) {
    if (!(c > 0.0)) throw std::invalid_argument("Constant kernel: c must be positive");
    return {KernelKind::Constant, c, 0.0, 0.0};
  }
  static Kernel ball_indicator(double r) {
    if (!(r > 0.0)) throw std::invalid_argument("BallIndicator kernel: r must be positive");
    return {KernelKind::BallIndicator, 1.0, r, 0.0};
  }
  static Kernel smoothed_ball(double r, double delta) {
    if (!(r > 0.0) || !(delta > 0.0) || delta > r)
      throw std::invalid_argument("SmoothedBall kernel: need 0 < delta <= r");
    return {KernelKind::SmoothedBall, 1.0, r, delta};
  }

  // Radial profile w(d).
  double profile(double d) const noexcept {
    switch (kind) {
      case KernelKind::Constant:
        return c;
      case KernelKind::BallIndicator:
        return d < r ? 1.0 : 0.0;
      case KernelKind::SmoothedBall:
        if (d <= r - delta) return 1.0;
        if (d >= r) return 0.0;
        return (r - d) / delta;
    }
    return 0.0;
  }

  double sup() const noexcept { return kind == KernelKind::Constant ? c : 1.0; }

  double lipschitz() const noexcept {
    switch (kind) {
      case KernelKind::Constant:
        return 0.0;
      case KernelKind::BallIndicator:
        return std::numeric_limits<double>::infinity();
      case KernelKind::SmoothedBall:
        return 1.0 / delta;
    }
    return 0.0;
  }

  // Distance beyond which the kernel vanishes; infinity for Constant.
  double support_radius() const noexcept {
    return kind == KernelKind::Constant ? std::numeric_limits<double>::infinity() : r;
  }
};

inline std::string describe(const Kernel& k) {
  switch (k.kind) {
    case KernelKind::Constant:
      return "Constant(" + std::to_string(k.c) + ")";
    case KernelKind::BallIndicator:
      return "BallIndicator(" + std::to_string(k.r) + ")";
    case KernelKind::SmoothedBall:
      return "SmoothedBall(" + std::to_string(k.r) + ", " + std::to_string(k.delta) + ")";
  }
  return "?";
}

inline double eval_kernel(const Kernel& k, const Point& x, const Point& y) {
  if (x.size() != y.size()) throw std::invalid_argument("eval_kernel: dimension mismatch");
  return k.profile(raw_distance(x, y));
}

namespace detail {

// Integral of sqrt(r^2 - t^2) over [0, x] for |x| <= r.
inline double half_chord_integral(double x, double r) {
  const double s = std::sqrt(std::max(0.0, r * r - x * x));
  return 0.5 * (x * s + r * r * std::asin(std::clamp(x / r, -1.0, 1.0)));
}

// Area of {x0 <= x <= x1, y >= h} inside the disc of radius r at the origin; h >= 0.
inline double upper_strip_area(double x0, double x1, double h, double r) {
  if (h >= r) return 0.0;
  const double s = std::sqrt(r * r - h * h);
  const double a0 = std::clamp(x0, -s, s);
  const double a1 = std::clamp(x1, -s, s);
  return half_chord_integral(a1, r) - half_chord_integral(a0, r) - (a1 - a0) * h;
}

// Area of the disc of radius r at the origin intersected with [x0,x1]x[y0,y1].
inline double disc_rect_area(double x0, double x1, double y0, double y1, double r) {
  if (!(x0 < x1) || !(y0 < y1) || !(r > 0.0)) return 0.0;
  if (y0 < 0.0) {
    if (y1 <= 0.0) return disc_rect_area(x0, x1, -y1, -y0, r);
    return disc_rect_area(x0, x1, 0.0, -y0, r) + disc_rect_area(x0, x1, 0.0, y1, r);
  }
  return upper_strip_area(x0, x1, y0, r) - upper_strip_area(x0, x1, y1, r);
}

inline double adaptive_simpson_step(const std::function<double(double)>& f, double a, double b,
                                    double fa, double fm, double fb, double whole, double tol,
                                    int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-14) {
  if (!(a < b)) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson_step(f, a, b, fa, fm, fb, whole, tol, 40);
}

}  // namespace detail

// P(B_rho(x)): exact measure of the open ball around x.
inline double ball_measure(const MetricMeasureSpace& space, const Point& x, double rho) {
  if (rho <= 0.0) return 0.0;
  if (space.coord_dim == 1) return std::min(1.0, x[0] + rho) - std::max(0.0, x[0] - rho);
  return detail::disc_rect_area(-x[0], 1.0 - x[0], -x[1], 1.0 - x[1], rho);
}

// Closed-form kernel degree d_W(x). For the smoothed ball, integration by parts
// turns d_W into the mean of P(B_rho(x)) over rho in [r - delta, r].
inline std::optional<double> exact_kernel_degree(const Kernel& k, const MetricMeasureSpace& space,
                                                 const Point& x) {
  switch (k.kind) {
    case KernelKind::Constant:
      return k.c;
    case KernelKind::BallIndicator:
      return ball_measure(space, x, k.r);
    case KernelKind::SmoothedBall: {
      const auto area = [&](double rho) { return ball_measure(space, x, rho); };
      return detail::integrate(area, k.r - k.delta, k.r) / k.delta;
    }
  }
  return std::nullopt;
}

// Quadrature estimate of d_W(x).
inline double kernel_degree(const Kernel& k, const MetricMeasureSpace& space, const Point& x,
                            const QuadratureSpec& quad) {
  if (x.size() != space.coord_dim) throw std::invalid_argument("kernel_degree: dimension mismatch");
  QuadratureSpec q = quad;
  q.space = space;
  const auto nodes = quadrature_nodes(q);
  double sum = 0.0;
  for (const auto& y : nodes) sum += k.profile(raw_distance(x, y));
  return sum / static_cast<double>(nodes.size());
}

// Minimum of the exact degree over a grid that includes the corners. For the
// ball kernels the infimum sits at a corner, so the estimate is exact there.
inline double estimate_dmin(const Kernel& k, const MetricMeasureSpace& space,
                            std::size_t grid_res) {
  if (grid_res < 2) throw std::invalid_argument("estimate_dmin: grid_res must be at least 2");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& x : boundary_grid(space, grid_res)) {
    const auto d = exact_kernel_degree(k, space, x);
    best = std::min(best, d ? *d : kernel_degree(k, space, x, QuadratureSpec::grid(256, space)));
  }
  return best;
}

inline double empirical_degree(const Kernel& k, const Point& x, const std::vector<Point>& nodes) {
  if (nodes.empty()) throw std::invalid_argument("empirical_degree: empty node list");
  double sum = 0.0;
  for (const auto& y : nodes) sum += eval_kernel(k, x, y);
  return sum / static_cast<double>(nodes.size());
}

inline double zeta_constant(double dudley_c) {
  const double ln2 = std::numbers::ln2;
  return (2.0 / std::numbers::sqrt2) * std::numbers::e * (2.0 / ln2 + 1.0) / std::sqrt(ln2) *
         dudley_c;
}

struct RegularityProfile {
  double sup_w = 1.0;
  double lip_w = 0.0;
  double d_min = 1.0;
  double dim_chi = 2.0;
  double zeta = 1.0;
  double dudley_c = 1.0;

  bool lipschitz() const noexcept { return std::isfinite(lip_w); }
};

inline RegularityProfile regularity_profile(const Kernel& k, const MetricMeasureSpace& space,
                                            double dudley_c, std::size_t grid_res = 11) {
  if (!(dudley_c > 0.0)) throw std::invalid_argument("regularity_profile: dudley_c must be positive");
  RegularityProfile p;
  p.sup_w = k.sup();
  p.lip_w = k.lipschitz();
  p.d_min = estimate_dmin(k, space, grid_res);
  p.dim_chi = space.minkowski_dim;
  p.dudley_c = dudley_c;
  p.zeta = zeta_constant(dudley_c);
  return p;
}

}  // namespace mpnn_lab
