#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mpnn_lab/errors.hpp"
#include "mpnn_lab/graph.hpp"
#include "mpnn_lab/linalg.hpp"
#include "mpnn_lab/mlp.hpp"
#include "mpnn_lab/parallel.hpp"
#include "mpnn_lab/rng.hpp"

namespace mpnn_lab {

struct MPNNLayer {
  MLPSpec phi;  // message: (f_i, f_j) -> R^H
  MLPSpec psi;  // update: (f_i, m_i) -> R^F'
};

class MPNNSpec {
 public:
  MPNNSpec() = default;
  explicit MPNNSpec(std::vector<MPNNLayer> layers) : layers_(std::move(layers)) { validate(); }

  const std::vector<MPNNLayer>& layers() const noexcept { return layers_; }
  std::size_t depth() const noexcept { return layers_.size(); }

  // F_0 .. F_T.
  std::vector<std::size_t> feature_dims() const {
    std::vector<std::size_t> dims{layers_.front().phi.input_dim() / 2};
    for (const auto& l : layers_) dims.push_back(l.psi.output_dim());
    return dims;
  }
  std::size_t input_dim() const { return feature_dims().front(); }
  std::size_t output_dim() const { return feature_dims().back(); }

 private:
  void validate() const {
    if (layers_.empty()) throw std::invalid_argument("MPNNSpec: at least one layer required");
    std::size_t f = layers_.front().phi.input_dim();
    if (f % 2 != 0) throw std::invalid_argument("MPNNSpec: message input must be 2 * F_0");
    f /= 2;
    for (std::size_t t = 0; t < layers_.size(); ++t) {
      const auto& l = layers_[t];
      if (l.phi.input_dim() != 2 * f)
        throw std::invalid_argument("MPNNSpec: layer " + std::to_string(t + 1) +
                                    " message input must be 2 * F_{t-1}");
      if (l.psi.input_dim() != f + l.phi.output_dim())
        throw std::invalid_argument("MPNNSpec: layer " + std::to_string(t + 1) +
                                    " update input must be F_{t-1} + H_{t-1}");
      f = l.psi.output_dim();
    }
  }

  std::vector<MPNNLayer> layers_;
};

struct LayerConstants {
  double lip_phi = 0.0;
  double lip_psi = 0.0;
  double bias_phi = 0.0;
  double bias_psi = 0.0;
};

inline std::vector<LayerConstants> layer_constants(const MPNNSpec& net) {
  std::vector<LayerConstants> out;
  for (const auto& l : net.layers())
    out.push_back({mlp_lipschitz_upper(l.phi), mlp_lipschitz_upper(l.psi), formal_bias(l.phi),
                   formal_bias(l.psi)});
  return out;
}

namespace detail {

// One message-passing step from senders to receivers:
//   m_i = (sum_j w_ij Phi(r_i, s_j)) / (sum_j w_ij),  out_i = Psi(r_i, m_i).
// neighbors(i, fn) must call fn(j, w_ij) for the nonzero weights of receiver i
// in a fixed order; on_zero(i) is called (and must throw) for a zero degree.
template <class Neighbors, class OnZero>
Matrix message_passing_step(const MPNNLayer& layer, const Matrix& recv, const Matrix& send,
                            Neighbors&& neighbors, OnZero&& on_zero) {
  const auto f_in = recv.cols();
  const auto h = static_cast<Eigen::Index>(layer.phi.output_dim());
  const auto f_out = static_cast<Eigen::Index>(layer.psi.output_dim());
  const auto n_recv = static_cast<std::size_t>(recv.rows());
  Matrix out(recv.rows(), f_out);

  if (layer.phi.affine()) {
    // Phi(a, b) = A a + B b + c, so the neighbor sum only needs B s_j.
    const auto [ab, c] = affine_form(layer.phi);
    const Eigen::MatrixXd a_part = ab.leftCols(f_in);
    const Eigen::MatrixXd b_part = ab.rightCols(f_in);
    Matrix g(send.rows(), h);
    for (Eigen::Index j = 0; j < send.rows(); ++j)
      for (Eigen::Index o = 0; o < h; ++o) {
        double acc = 0.0;
        for (Eigen::Index k = 0; k < f_in; ++k) acc += b_part(o, k) * send(j, k);
        g(j, o) = acc;
      }
    parallel_for(n_recv, [&](std::size_t i) {
      std::vector<double> acc(static_cast<std::size_t>(h), 0.0);
      std::vector<double> in(static_cast<std::size_t>(f_in + h));
      std::vector<double> scratch(2 * layer.psi.max_width());
      double deg = 0.0;
      neighbors(i, [&](std::size_t j, double w) {
        deg += w;
        const double* gj = g.row(static_cast<Eigen::Index>(j)).data();
        for (Eigen::Index o = 0; o < h; ++o) acc[static_cast<std::size_t>(o)] += w * gj[o];
      });
      if (!(deg > 0.0)) on_zero(i);
      const auto ii = static_cast<Eigen::Index>(i);
      for (Eigen::Index k = 0; k < f_in; ++k) in[static_cast<std::size_t>(k)] = recv(ii, k);
      for (Eigen::Index o = 0; o < h; ++o) {
        double self = 0.0;
        for (Eigen::Index k = 0; k < f_in; ++k) self += a_part(o, k) * recv(ii, k);
        in[static_cast<std::size_t>(f_in + o)] = self + acc[static_cast<std::size_t>(o)] / deg + c[o];
      }
      layer.psi.apply(in.data(), out.row(ii).data(), scratch.data());
    });
    return out;
  }

  parallel_for(n_recv, [&](std::size_t i) {
    std::vector<double> acc(static_cast<std::size_t>(h), 0.0);
    std::vector<double> pair(static_cast<std::size_t>(2 * f_in));
    std::vector<double> msg(static_cast<std::size_t>(h));
    std::vector<double> in(static_cast<std::size_t>(f_in + h));
    std::vector<double> scratch(2 * std::max(layer.phi.max_width(), layer.psi.max_width()));
    const auto ii = static_cast<Eigen::Index>(i);
    for (Eigen::Index k = 0; k < f_in; ++k) pair[static_cast<std::size_t>(k)] = recv(ii, k);
    double deg = 0.0;
    neighbors(i, [&](std::size_t j, double w) {
      deg += w;
      for (Eigen::Index k = 0; k < f_in; ++k)
        pair[static_cast<std::size_t>(f_in + k)] = send(static_cast<Eigen::Index>(j), k);
      layer.phi.apply(pair.data(), msg.data(), scratch.data());
      for (Eigen::Index o = 0; o < h; ++o)
        acc[static_cast<std::size_t>(o)] += w * msg[static_cast<std::size_t>(o)];
    });
    if (!(deg > 0.0)) on_zero(i);
    for (Eigen::Index k = 0; k < f_in; ++k) in[static_cast<std::size_t>(k)] = recv(ii, k);
    for (Eigen::Index o = 0; o < h; ++o)
      in[static_cast<std::size_t>(f_in + o)] = acc[static_cast<std::size_t>(o)] / deg;
    layer.psi.apply(in.data(), out.row(ii).data(), scratch.data());
  });
  return out;
}

}  // namespace detail

// All layer outputs f^(0) .. f^(T) of the gMPNN on g.
inline std::vector<Matrix> gmpnn_forward_layers(const MPNNSpec& net, const SampledGraph& g) {
  if (static_cast<std::size_t>(g.features().cols()) != net.input_dim())
    throw std::invalid_argument("gmpnn_forward: feature width does not match F_0");
  std::vector<Matrix> out{g.features()};
  for (const auto& layer : net.layers()) {
    const Matrix& f = out.back();
    out.push_back(detail::message_passing_step(
        layer, f, f, [&](std::size_t i, auto&& fn) { g.for_each_neighbor(i, fn); },
        [](std::size_t i) { throw IsolatedNodeError(i); }));
  }
  return out;
}

inline Matrix gmpnn_forward(const MPNNSpec& net, const SampledGraph& g) {
  return std::move(gmpnn_forward_layers(net, g).back());
}

// gMPNN on an arbitrary nonnegative weight matrix (row i lists the weights w_ij).
inline std::vector<Matrix> gmpnn_forward_layers(const MPNNSpec& net, const Eigen::MatrixXd& weights,
                                                const Matrix& features) {
  if (weights.rows() != weights.cols() || weights.rows() != features.rows())
    throw std::invalid_argument("gmpnn_forward: weight matrix must be N x N with N feature rows");
  if (static_cast<std::size_t>(features.cols()) != net.input_dim())
    throw std::invalid_argument("gmpnn_forward: feature width does not match F_0");
  if ((weights.array() < 0.0).any()) throw std::invalid_argument("gmpnn_forward: negative weight");
  std::vector<Matrix> out{features};
  for (const auto& layer : net.layers()) {
    const Matrix& f = out.back();
    out.push_back(detail::message_passing_step(
        layer, f, f,
        [&](std::size_t i, auto&& fn) {
          const auto ii = static_cast<Eigen::Index>(i);
          for (Eigen::Index j = 0; j < weights.cols(); ++j)
            if (weights(ii, j) != 0.0) fn(static_cast<std::size_t>(j), weights(ii, j));
        },
        [](std::size_t i) { throw IsolatedNodeError(i); }));
  }
  return out;
}

inline Matrix gmpnn_forward(const MPNNSpec& net, const Eigen::MatrixXd& weights, const Matrix& features) {
  return std::move(gmpnn_forward_layers(net, weights, features).back());
}

// Mean over rows.
inline Vector global_pool(const Matrix& features) {
  if (features.rows() == 0) throw std::invalid_argument("global_pool: no rows");
  Vector sum = Vector::Zero(features.cols());
  for (Eigen::Index i = 0; i < features.rows(); ++i) sum += features.row(i).transpose();
  return sum / static_cast<double>(features.rows());
}

// Identity message Phi(a, b) = b for feature width f.
inline MLPSpec neighbor_message(std::size_t f) {
  const auto fi = static_cast<Eigen::Index>(f);
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(fi, 2 * fi);
  w.rightCols(fi).setIdentity();
  return single_layer(std::move(w), Vector::Zero(fi));
}

// Update Psi(a, m) = act(W1 a + W2 m).
inline MLPSpec sage_update(const Eigen::MatrixXd& w1, const Eigen::MatrixXd& w2, Activation act) {
  Eigen::MatrixXd w(w1.rows(), w1.cols() + w2.cols());
  w << w1, w2;
  return single_layer(std::move(w), Vector::Zero(w1.rows()), act);
}

// Random GraphSAGE with dims = (F_0, ..., F_T). Weight entries are
// N(0, (init_scale / sqrt(F_{t-1}))^2); ReLU on hidden layers, Identity last.
inline MPNNSpec graphsage_random(const std::vector<std::size_t>& dims, std::uint64_t seed,
                                 double init_scale = 1.0) {
  if (dims.size() < 2) throw std::invalid_argument("graphsage_random: need at least two widths");
  Rng rng(derive_seed(seed, stream::weights));
  std::vector<MPNNLayer> layers;
  for (std::size_t t = 1; t < dims.size(); ++t) {
    const auto fin = static_cast<Eigen::Index>(dims[t - 1]);
    const auto fout = static_cast<Eigen::Index>(dims[t]);
    const double sd = init_scale / std::sqrt(static_cast<double>(fin));
    Eigen::MatrixXd w1(fout, fin), w2(fout, fin);
    for (Eigen::Index i = 0; i < fout; ++i)
      for (Eigen::Index j = 0; j < fin; ++j) w1(i, j) = rng.normal(0.0, sd);
    for (Eigen::Index i = 0; i < fout; ++i)
      for (Eigen::Index j = 0; j < fin; ++j) w2(i, j) = rng.normal(0.0, sd);
    const Activation act = t + 1 == dims.size() ? Activation::Identity : Activation::ReLU;
    layers.push_back({neighbor_message(dims[t - 1]), sage_update(w1, w2, act)});
  }
  return MPNNSpec(std::move(layers));
}

// Single layer with Phi(a, b) = b and Psi(a, m) = m.
inline MPNNSpec mean_aggregation_net(std::size_t f) {
  const auto fi = static_cast<Eigen::Index>(f);
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(fi, 2 * fi);
  w.rightCols(fi).setIdentity();
  return MPNNSpec({MPNNLayer{neighbor_message(f), single_layer(w, Vector::Zero(fi))}});
}

inline MPNNSpec scaled(const MPNNSpec& net, double factor) {
  std::vector<MPNNLayer> layers;
  for (const auto& l : net.layers()) layers.push_back({scaled(l.phi, factor), scaled(l.psi, factor)});
  return MPNNSpec(std::move(layers));
}

}  // namespace mpnn_lab
