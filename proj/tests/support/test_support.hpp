#pragma once

// Random networks and graphs for tests, and a direct transcription of the
// gMPNN definition used as an independent oracle.

#include <vector>

#include "mpnn_lab/linalg.hpp"
#include "mpnn_lab/mpnn.hpp"
#include "mpnn_lab/rng.hpp"

namespace mpnn_lab::fixtures {

inline Eigen::MatrixXd gaussian_matrix(Eigen::Index r, Eigen::Index c, Rng& rng, double sd = 1.0) {
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = rng.normal(0.0, sd);
  return m;
}

inline Vector gaussian_vector(Eigen::Index n, Rng& rng, double sd = 1.0) {
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.normal(0.0, sd);
  return v;
}

// dims = (F_0, ..., F_T); message width H_t = F_{t-1} + 1. With nonlinear_phi
// the message MLP has a hidden ReLU layer; otherwise it is affine.
inline MPNNSpec random_mpnn(const std::vector<std::size_t>& dims, bool nonlinear_phi, Rng& rng) {
  std::vector<MPNNLayer> layers;
  for (std::size_t t = 1; t < dims.size(); ++t) {
    const auto f = static_cast<Eigen::Index>(dims[t - 1]);
    const auto h = f + 1;
    const auto out = static_cast<Eigen::Index>(dims[t]);
    std::vector<DenseLayer> phi;
    if (nonlinear_phi) {
      phi.push_back({gaussian_matrix(h + 1, 2 * f, rng), gaussian_vector(h + 1, rng), Activation::ReLU});
      phi.push_back({gaussian_matrix(h, h + 1, rng), gaussian_vector(h, rng), Activation::Identity});
    } else {
      phi.push_back({gaussian_matrix(h, 2 * f, rng), gaussian_vector(h, rng), Activation::Identity});
    }
    const Activation act = t + 1 == dims.size() ? Activation::Identity : Activation::ReLU;
    std::vector<DenseLayer> psi{{gaussian_matrix(out, f + h, rng), gaussian_vector(out, rng), act}};
    layers.push_back({MLPSpec(std::move(phi)), MLPSpec(std::move(psi))});
  }
  return MPNNSpec(std::move(layers));
}

// Symmetric nonnegative weights with about a third of the off-diagonal
// entries zero and a positive diagonal.
inline Eigen::MatrixXd random_weights(Eigen::Index n, Rng& rng) {
  Eigen::MatrixXd w(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    w(i, i) = 0.5 + rng.uniform();
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double u = rng.uniform();
      w(i, j) = w(j, i) = u < 1.0 / 3.0 ? 0.0 : rng.uniform(0.0, 2.0);
    }
  }
  return w;
}

inline Matrix random_features(Eigen::Index n, Eigen::Index f, Rng& rng) {
  Matrix m(n, f);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < f; ++j) m(i, j) = rng.uniform(-1.0, 1.0);
  return m;
}

inline Eigen::VectorXd eval_mlp_naive(const MLPSpec& m, Eigen::VectorXd x) {
  for (const auto& l : m.layers()) {
    x = l.weight * x + l.bias;
    if (l.activation == Activation::ReLU)
      for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = x[i] > 0.0 ? x[i] : 0.0;
  }
  return x;
}

// f_i^(t) = Psi(f_i^(t-1), sum_j w_ij Phi(f_i^(t-1), f_j^(t-1)) / sum_j w_ij), by double loop.
inline Matrix naive_gmpnn(const MPNNSpec& net, const Eigen::MatrixXd& w, const Matrix& features) {
  Eigen::MatrixXd f = features;
  const Eigen::Index n = w.rows();
  for (const auto& layer : net.layers()) {
    const Eigen::Index fin = f.cols();
    Eigen::MatrixXd next(n, static_cast<Eigen::Index>(layer.psi.output_dim()));
    for (Eigen::Index i = 0; i < n; ++i) {
      Eigen::VectorXd msg = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(layer.phi.output_dim()));
      double deg = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        Eigen::VectorXd pair(2 * fin);
        pair << f.row(i).transpose(), f.row(j).transpose();
        msg += w(i, j) * eval_mlp_naive(layer.phi, pair);
        deg += w(i, j);
      }
      Eigen::VectorXd in(fin + msg.size());
      in << f.row(i).transpose(), msg / deg;
      next.row(i) = eval_mlp_naive(layer.psi, in).transpose();
    }
    f = next;
  }
  return f;
}

}  // namespace mpnn_lab::fixtures
