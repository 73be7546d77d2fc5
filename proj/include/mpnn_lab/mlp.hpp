#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mpnn_lab/linalg.hpp"

namespace mpnn_lab {

enum class Activation { Identity, ReLU };

inline std::string to_string(Activation a) { return a == Activation::ReLU ? "relu" : "identity"; }

inline Activation parse_activation(const std::string& s) {
  if (s == "relu") return Activation::ReLU;
  if (s == "identity") return Activation::Identity;
  throw std::invalid_argument("unknown activation '" + s + "'");
}

struct DenseLayer {
  Eigen::MatrixXd weight;  // out x in
  Vector bias;             // out
  Activation activation = Activation::Identity;
};

// x -> act_L(W_L ... act_1(W_1 x + b_1) ... + b_L)
class MLPSpec {
 public:
  MLPSpec() = default;
  explicit MLPSpec(std::vector<DenseLayer> layers) : layers_(std::move(layers)) { validate(); }

  const std::vector<DenseLayer>& layers() const noexcept { return layers_; }
  std::size_t depth() const noexcept { return layers_.size(); }
  std::size_t input_dim() const {
    return layers_.empty() ? 0 : static_cast<std::size_t>(layers_.front().weight.cols());
  }
  std::size_t output_dim() const {
    return layers_.empty() ? 0 : static_cast<std::size_t>(layers_.back().weight.rows());
  }
  std::size_t max_width() const {
    std::size_t w = input_dim();
    for (const auto& l : layers_) w = std::max(w, static_cast<std::size_t>(l.weight.rows()));
    return w;
  }

  bool affine() const {
    return std::all_of(layers_.begin(), layers_.end(),
                       [](const DenseLayer& l) { return l.activation == Activation::Identity; });
  }

  // Forward pass on a raw buffer. scratch must hold 2 * max_width() doubles.
  void apply(const double* in, double* out, double* scratch) const {
    const std::size_t w = max_width();
    double* a = scratch;
    double* b = scratch + w;
    const double* cur = in;
    for (std::size_t li = 0; li < layers_.size(); ++li) {
      const auto& l = layers_[li];
      const auto rows = l.weight.rows();
      const auto cols = l.weight.cols();
      double* dst = li + 1 == layers_.size() ? out : (cur == a ? b : a);
      for (Eigen::Index o = 0; o < rows; ++o) {
        double acc = 0.0;
        for (Eigen::Index k = 0; k < cols; ++k) acc += l.weight(o, k) * cur[k];
        double v = acc + l.bias[o];
        if (l.activation == Activation::ReLU) v = v > 0.0 ? v : 0.0;
        dst[o] = v;
      }
      cur = dst;
    }
  }

 private:
  void validate() const {
    if (layers_.empty()) throw std::invalid_argument("MLPSpec: at least one layer required");
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      const auto& l = layers_[i];
      if (l.weight.rows() == 0 || l.weight.cols() == 0)
        throw std::invalid_argument("MLPSpec: empty weight matrix");
      if (l.bias.size() != l.weight.rows())
        throw std::invalid_argument("MLPSpec: bias length does not match weight rows");
      if (i > 0 && l.weight.cols() != layers_[i - 1].weight.rows())
        throw std::invalid_argument("MLPSpec: layer dimensions do not chain");
    }
  }

  std::vector<DenseLayer> layers_;
};

inline MLPSpec single_layer(Eigen::MatrixXd weight, Vector bias,
                            Activation act = Activation::Identity) {
  return MLPSpec({DenseLayer{std::move(weight), std::move(bias), act}});
}

inline Vector mlp_forward(const MLPSpec& m, const Vector& x) {
  if (static_cast<std::size_t>(x.size()) != m.input_dim())
    throw std::invalid_argument("mlp_forward: input length does not match input_dim");
  Vector out(static_cast<Eigen::Index>(m.output_dim()));
  std::vector<double> scratch(2 * m.max_width());
  m.apply(x.data(), out.data(), scratch.data());
  return out;
}

// Row-wise forward pass; row i of the result equals mlp_forward on row i.
inline Matrix mlp_forward_rows(const MLPSpec& m, const Matrix& x) {
  if (static_cast<std::size_t>(x.cols()) != m.input_dim())
    throw std::invalid_argument("mlp_forward_rows: input width does not match input_dim");
  Matrix out(x.rows(), static_cast<Eigen::Index>(m.output_dim()));
  std::vector<double> scratch(2 * m.max_width());
  for (Eigen::Index i = 0; i < x.rows(); ++i) m.apply(x.row(i).data(), out.row(i).data(), scratch.data());
  return out;
}

// Induced infinity-norm of a matrix: maximum absolute row sum.
inline double induced_inf_norm(const Eigen::MatrixXd& w) {
  if (w.size() == 0) return 0.0;
  return w.cwiseAbs().rowwise().sum().maxCoeff();
}

// Product of induced infinity-norms; an upper bound on the Lipschitz constant
// with respect to the sup-norm because both activations are 1-Lipschitz.
inline double mlp_lipschitz_upper(const MLPSpec& m) {
  double l = 1.0;
  for (const auto& layer : m.layers()) l *= induced_inf_norm(layer.weight);
  return l;
}

inline double formal_bias(const MLPSpec& m) {
  const Vector zero = Vector::Zero(static_cast<Eigen::Index>(m.input_dim()));
  return mlp_forward(m, zero).cwiseAbs().maxCoeff();
}

// Collapses an all-Identity MLP into x -> A x + c.
inline std::pair<Eigen::MatrixXd, Vector> affine_form(const MLPSpec& m) {
  if (!m.affine()) throw std::invalid_argument("affine_form: MLP has nonlinear activations");
  Eigen::MatrixXd a = m.layers().front().weight;
  Vector c = m.layers().front().bias;
  for (std::size_t i = 1; i < m.layers().size(); ++i) {
    const auto& l = m.layers()[i];
    a = (l.weight * a).eval();
    c = (l.weight * c + l.bias).eval();
  }
  return {std::move(a), std::move(c)};
}

inline MLPSpec scaled(const MLPSpec& m, double factor) {
  std::vector<DenseLayer> layers = m.layers();
  for (auto& l : layers) l.weight *= factor;
  return MLPSpec(std::move(layers));
}

}  // namespace mpnn_lab
