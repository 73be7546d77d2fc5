#pragma once

#include <memory>
#include <mutex>
#include <stdexcept>
#include <utility>
#include <vector>

#include "mpnn_lab/errors.hpp"
#include "mpnn_lab/graph.hpp"
#include "mpnn_lab/kernel.hpp"
#include "mpnn_lab/linalg.hpp"
#include "mpnn_lab/mlp.hpp"
#include "mpnn_lab/mpnn.hpp"
#include "mpnn_lab/quadrature.hpp"
#include "mpnn_lab/signal.hpp"

namespace mpnn_lab {

// Quadrature estimate of M_W Phi(f, f)(x); the degree is estimated on the
// same nodes, so a constant message aggregates to itself exactly.
inline Vector continuous_aggregate(const Kernel& k, const Signal& s, const MLPSpec& phi,
                                   const Point& x, const QuadratureSpec& quad) {
  if (!s.point_evaluable()) throw UnsupportedSignalError("continuous_aggregate: signal is not point-evaluable");
  if (phi.input_dim() != 2 * s.dim)
    throw std::invalid_argument("continuous_aggregate: message input must be twice the signal width");
  const auto nodes = quadrature_nodes(quad);
  const std::size_t f = s.dim;
  const std::size_t h = phi.output_dim();
  std::vector<double> pair(2 * f), msg(h), scratch(2 * phi.max_width());
  eval_signal_into(s, x, pair.data());
  Vector acc = Vector::Zero(static_cast<Eigen::Index>(h));
  double deg = 0.0;
  for (const auto& y : nodes) {
    const double w = k.profile(raw_distance(x, y));
    if (w == 0.0) continue;
    deg += w;
    eval_signal_into(s, y, pair.data() + f);
    phi.apply(pair.data(), msg.data(), scratch.data());
    for (std::size_t o = 0; o < h; ++o) acc[static_cast<Eigen::Index>(o)] += w * msg[o];
  }
  if (!(deg > 0.0)) throw DegenerateDegreeError("continuous_aggregate: estimated degree is zero");
  return acc / deg;
}

namespace detail {

inline Matrix continuum_step(const MPNNLayer& layer, const Kernel& k,
                             const std::vector<Point>& recv_pts, const Matrix& recv,
                             const std::vector<Point>& send_pts, const Matrix& send) {
  return message_passing_step(
      layer, recv, send,
      [&](std::size_t i, auto&& fn) {
        const Point& x = recv_pts[i];
        for (std::size_t j = 0; j < send_pts.size(); ++j) {
          const double w = k.profile(raw_distance(x, send_pts[j]));
          if (w != 0.0) fn(j, w);
        }
      },
      [](std::size_t) { throw DegenerateDegreeError("cmpnn: estimated degree is zero"); });
}

}  // namespace detail

// Theta_W(f) at eval_points. Each intermediate f^(t) is represented by its
// values on the quadrature nodes.
inline Matrix cmpnn_forward(const MPNNSpec& net, const Kernel& k, const Signal& s,
                            const std::vector<Point>& eval_points, const QuadratureSpec& quad) {
  if (!s.point_evaluable()) throw UnsupportedSignalError("cmpnn_forward: signal is not point-evaluable");
  if (s.dim != net.input_dim()) throw std::invalid_argument("cmpnn_forward: signal width does not match F_0");
  const auto q = quadrature_nodes(quad);
  Matrix fq = sample_signal(s, q);
  Matrix fe = sample_signal(s, eval_points);
  for (std::size_t t = 0; t < net.depth(); ++t) {
    const auto& layer = net.layers()[t];
    Matrix next_e = detail::continuum_step(layer, k, eval_points, fe, q, fq);
    if (t + 1 < net.depth()) fq = detail::continuum_step(layer, k, q, fq, q, fq);
    fe = std::move(next_e);
  }
  return fe;
}

// Theta^P_W: quadrature mean of Theta_W(f) over the quadrature nodes.
inline Vector cmpnn_pool(const MPNNSpec& net, const Kernel& k, const Signal& s,
                         const QuadratureSpec& quad) {
  if (!s.point_evaluable()) throw UnsupportedSignalError("cmpnn_pool: signal is not point-evaluable");
  if (s.dim != net.input_dim()) throw std::invalid_argument("cmpnn_pool: signal width does not match F_0");
  const auto q = quadrature_nodes(quad);
  Matrix fq = sample_signal(s, q);
  for (const auto& layer : net.layers()) fq = detail::continuum_step(layer, k, q, fq, q, fq);
  return global_pool(fq);
}

// gMPNN output on a large graph, used as a stand-in for Theta_W. The output
// matrix is computed on first access and shared read-only afterwards.
class LargeGraphReference {
 public:
  LargeGraphReference(std::shared_ptr<const MPNNSpec> net, std::shared_ptr<const SampledGraph> parent)
      : state_(std::make_shared<State>()) {
    state_->net = std::move(net);
    state_->parent = std::move(parent);
  }

  const SampledGraph& parent() const { return *state_->parent; }
  const MPNNSpec& net() const { return *state_->net; }

  const Matrix& outputs() const {
    std::call_once(state_->once, [&] { state_->outputs = gmpnn_forward(*state_->net, *state_->parent); });
    return state_->outputs;
  }

  Vector pooled() const { return global_pool(outputs()); }

  // Rows of the reference output selected by a subsample index map.
  Matrix restrict_to(const std::vector<std::size_t>& index) const {
    const Matrix& out = outputs();
    Matrix r(static_cast<Eigen::Index>(index.size()), out.cols());
    for (std::size_t k = 0; k < index.size(); ++k)
      r.row(static_cast<Eigen::Index>(k)) = out.row(static_cast<Eigen::Index>(index[k]));
    return r;
  }

 private:
  struct State {
    std::shared_ptr<const MPNNSpec> net;
    std::shared_ptr<const SampledGraph> parent;
    std::once_flag once;
    Matrix outputs;
  };
  std::shared_ptr<State> state_;
};

inline LargeGraphReference reference_from_large_graph(std::shared_ptr<const MPNNSpec> net,
                                                      std::shared_ptr<const SampledGraph> parent) {
  return LargeGraphReference(std::move(net), std::move(parent));
}

}  // namespace mpnn_lab
