#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "mpnn_lab/errors.hpp"
#include "mpnn_lab/linalg.hpp"
#include "mpnn_lab/rng.hpp"
#include "mpnn_lab/space.hpp"

namespace mpnn_lab {

enum class SignalKind { ClosedForm, GridBandlimited, PerNodeNoise };

struct BandlimitedGrid {
  std::size_t resolution = 256;
  std::vector<double> values;  // row-major, index [i * resolution + j], i along x1

  double at(const Point& x) const {
    const auto cell = [&](double t) {
      const auto i = static_cast<std::size_t>(std::floor(t * static_cast<double>(resolution)));
      return std::min(i, resolution - 1);
    };
    return values[cell(x[0]) * resolution + cell(x[1])];
  }
};

// A metric-space signal f: space -> R^F with its regularity (sup_f, lip_f).
struct Signal {
  SignalKind kind = SignalKind::ClosedForm;
  std::string name;
  std::size_t dim = 1;
  double sup_f = 0.0;
  double lip_f = 0.0;
  std::function<void(const Point&, double*)> closed_form;
  std::shared_ptr<const BandlimitedGrid> grid;
  double sigma = 1.0;
  std::uint64_t seed = 0;

  bool point_evaluable() const noexcept { return kind != SignalKind::PerNodeNoise; }
  bool lipschitz() const noexcept { return std::isfinite(lip_f); }
};

inline Signal custom_signal(std::string name, std::size_t dim, double sup_f, double lip_f,
                            std::function<void(const Point&, double*)> fn) {
  Signal s;
  s.kind = SignalKind::ClosedForm;
  s.name = std::move(name);
  s.dim = dim;
  s.sup_f = sup_f;
  s.lip_f = lip_f;
  s.closed_form = std::move(fn);
  return s;
}

// f(x1, x2) = x1 * x2; Lipschitz constant is the gradient-norm bound sqrt(2).
inline Signal product_signal() {
  return custom_signal("product", 1, 1.0, std::numbers::sqrt2,
                       [](const Point& x, double* out) { out[0] = x[0] * x[1]; });
}

inline Signal sum_signal() {
  return custom_signal("sum", 1, 2.0, std::numbers::sqrt2,
                       [](const Point& x, double* out) { out[0] = x[0] + x[1]; });
}

inline Signal coordinate_signal(std::size_t axis) {
  return custom_signal("x" + std::to_string(axis + 1), 1, 1.0, 1.0,
                       [axis](const Point& x, double* out) { out[0] = x[axis]; });
}

inline Signal constant_signal(double value, std::size_t dim = 1) {
  return custom_signal("constant", dim, std::abs(value), 0.0, [value, dim](const Point&, double* out) {
    for (std::size_t i = 0; i < dim; ++i) out[i] = value;
  });
}

// Real part of the inverse DFT of Gaussian coefficients on the centered
// band x band low-frequency block, rescaled to sup-norm 1.
inline std::shared_ptr<const BandlimitedGrid> make_bandlimited_grid(std::uint64_t seed,
                                                                    std::size_t resolution = 256,
                                                                    std::size_t band = 20) {
  using cd = std::complex<double>;
  Rng rng(seed);
  const long half = static_cast<long>(band) / 2;
  std::vector<long> freqs;
  for (long k = -half; k < -half + static_cast<long>(band); ++k) freqs.push_back(k);
  std::vector<cd> coef(band * band);
  for (auto& v : coef) {
    const double re = rng.normal();
    const double im = rng.normal();
    v = cd(re, im);
  }
  const std::size_t n = resolution;
  const double two_pi_over_n = 2.0 * std::numbers::pi / static_cast<double>(n);
  // Separable evaluation: first sum over k2, then over k1.
  std::vector<cd> partial(band * n);
  for (std::size_t a = 0; a < band; ++a)
    for (std::size_t j = 0; j < n; ++j) {
      cd acc(0.0, 0.0);
      for (std::size_t b = 0; b < band; ++b) {
        const double ang = two_pi_over_n * static_cast<double>(freqs[b] * static_cast<long>(j));
        acc += coef[a * band + b] * cd(std::cos(ang), std::sin(ang));
      }
      partial[a * n + j] = acc;
    }
  auto grid = std::make_shared<BandlimitedGrid>();
  grid->resolution = n;
  grid->values.assign(n * n, 0.0);
  double peak = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      cd acc(0.0, 0.0);
      for (std::size_t a = 0; a < band; ++a) {
        const double ang = two_pi_over_n * static_cast<double>(freqs[a] * static_cast<long>(i));
        acc += partial[a * n + j] * cd(std::cos(ang), std::sin(ang));
      }
      const double v = acc.real() / static_cast<double>(n * n);
      grid->values[i * n + j] = v;
      peak = std::max(peak, std::abs(v));
    }
  if (peak > 0.0)
    for (auto& v : grid->values) v /= peak;
  return grid;
}

inline Signal bandlimited_signal(std::uint64_t seed, std::size_t resolution = 256,
                                 std::size_t band = 20) {
  Signal s;
  s.kind = SignalKind::GridBandlimited;
  s.name = "bandlimited";
  s.dim = 1;
  s.seed = seed;
  s.grid = make_bandlimited_grid(seed, resolution, band);
  const auto& g = *s.grid;
  const std::size_t n = g.resolution;
  double sup = 0.0;
  double jump = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double v = g.values[i * n + j];
      sup = std::max(sup, std::abs(v));
      if (i + 1 < n) jump = std::max(jump, std::abs(g.values[(i + 1) * n + j] - v));
      if (j + 1 < n) jump = std::max(jump, std::abs(g.values[i * n + j + 1] - v));
    }
  s.sup_f = sup;
  s.lip_f = jump * static_cast<double>(n);
  return s;
}

// I.i.d. N(0, sigma^2) values attached to sampled nodes; not a function on the space.
inline Signal noise_signal(double sigma, std::uint64_t seed) {
  Signal s;
  s.kind = SignalKind::PerNodeNoise;
  s.name = "noise";
  s.dim = 1;
  s.sigma = sigma;
  s.seed = seed;
  s.sup_f = std::numeric_limits<double>::infinity();
  s.lip_f = std::numeric_limits<double>::infinity();
  return s;
}

inline void eval_signal_into(const Signal& s, const Point& x, double* out) {
  switch (s.kind) {
    case SignalKind::ClosedForm:
      s.closed_form(x, out);
      return;
    case SignalKind::GridBandlimited:
      out[0] = s.grid->at(x);
      return;
    case SignalKind::PerNodeNoise:
      throw UnsupportedSignalError("noise signal has no pointwise values");
  }
}

inline std::vector<double> eval_signal(const Signal& s, const Point& x) {
  std::vector<double> out(s.dim);
  eval_signal_into(s, x, out.data());
  return out;
}

// Sampling operator: row i = f(points[i]).
inline Matrix sample_signal(const Signal& s, const std::vector<Point>& points) {
  if (!s.point_evaluable()) throw UnsupportedSignalError("noise signal has no pointwise values");
  Matrix m(static_cast<Eigen::Index>(points.size()), static_cast<Eigen::Index>(s.dim));
  for (std::size_t i = 0; i < points.size(); ++i)
    eval_signal_into(s, points[i], m.row(static_cast<Eigen::Index>(i)).data());
  return m;
}

// Node features for a sampled node set; noise draws come from their own sub-stream.
inline Matrix node_features(const Signal& s, const std::vector<Point>& points,
                            std::uint64_t graph_seed) {
  if (s.point_evaluable()) return sample_signal(s, points);
  Rng rng(derive_seed(graph_seed, stream::features, s.seed));
  Matrix m(static_cast<Eigen::Index>(points.size()), static_cast<Eigen::Index>(s.dim));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = rng.normal(0.0, s.sigma);
  return m;
}

enum class SignalFamily { Product, Bandlimited, Noise, Sum };

inline SignalFamily parse_signal_family(const std::string& name) {
  if (name == "product") return SignalFamily::Product;
  if (name == "bandlimited") return SignalFamily::Bandlimited;
  if (name == "noise") return SignalFamily::Noise;
  if (name == "sum") return SignalFamily::Sum;
  throw std::invalid_argument("unknown signal kind '" + name + "'");
}

inline Signal make_signal(SignalFamily kind, std::uint64_t seed, double noise_sigma = 1.0) {
  switch (kind) {
    case SignalFamily::Product:
      return product_signal();
    case SignalFamily::Bandlimited:
      return bandlimited_signal(derive_seed(seed, stream::signal));
    case SignalFamily::Noise:
      return noise_signal(noise_sigma, derive_seed(seed, stream::signal));
    case SignalFamily::Sum:
      return sum_signal();
  }
  throw std::invalid_argument("unknown signal family");
}

inline Signal make_signal(const std::string& kind, std::uint64_t seed, double noise_sigma = 1.0) {
  return make_signal(parse_signal_family(kind), seed, noise_sigma);
}

}  // namespace mpnn_lab
