#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "mpnn_lab/linalg.hpp"

namespace mpnn_lab {

struct ErrorRecord {
  std::size_t n = 0;
  std::size_t trial = 0;
  double dist_value = 0.0;
  double pooled_dist = 0.0;
};

template <class Derived>
double sup_norm(const Eigen::MatrixBase<Derived>& v) {
  if (v.size() == 0) throw std::invalid_argument("sup_norm: empty input");
  return v.cwiseAbs().maxCoeff();
}

// sqrt((1/N) sum_i ||row_i||_inf^2)
inline double norm_2inf(const Matrix& f) {
  if (f.rows() == 0) throw std::invalid_argument("norm_2inf: no rows");
  double s = 0.0;
  for (Eigen::Index i = 0; i < f.rows(); ++i) {
    const double r = f.cols() == 0 ? 0.0 : f.row(i).cwiseAbs().maxCoeff();
    s += r * r;
  }
  return std::sqrt(s / static_cast<double>(f.rows()));
}

// Node-level distance: ||f - g||_{2;inf}.
inline double dist_x(const Matrix& f, const Matrix& g) {
  if (f.rows() != g.rows() || f.cols() != g.cols())
    throw std::invalid_argument("dist_x: shape mismatch");
  return norm_2inf(f - g);
}

// Graph-level distance between pooled outputs: sup-norm of the difference.
inline double pooled_dist(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw std::invalid_argument("pooled_dist: length mismatch");
  return sup_norm(a - b);
}

struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // root-mean-square residual in log2 units
};

// Ordinary least squares of log2(err) on log2(n).
inline LogLogFit fit_loglog_slope(const std::vector<double>& ns, const std::vector<double>& errs) {
  if (ns.size() != errs.size()) throw std::invalid_argument("fit_loglog_slope: length mismatch");
  if (ns.size() < 2) throw std::invalid_argument("fit_loglog_slope: need at least two points");
  const auto m = static_cast<double>(ns.size());
  std::vector<double> x(ns.size()), y(ns.size());
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (!(ns[i] > 0.0)) throw std::invalid_argument("fit_loglog_slope: sizes must be positive");
    if (!(errs[i] > 0.0)) throw std::invalid_argument("fit_loglog_slope: errors must be positive");
    x[i] = std::log2(ns[i]);
    y[i] = std::log2(errs[i]);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("fit_loglog_slope: sizes must not all be equal");
  LogLogFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (fit.intercept + fit.slope * x[i]);
    ss += e * e;
  }
  fit.residual = std::sqrt(ss / m);
  return fit;
}

}  // namespace mpnn_lab
