#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include "mpnn_lab/kernel.hpp"
#include "mpnn_lab/linalg.hpp"
#include "mpnn_lab/parallel.hpp"
#include "mpnn_lab/rng.hpp"
#include "mpnn_lab/signal.hpp"
#include "mpnn_lab/space.hpp"

namespace mpnn_lab {

// Graphs up to this size keep a materialized dense weight matrix; larger ones
// evaluate W(X_i, X_j) on the fly. Both paths produce identical weights.
inline constexpr std::size_t kDenseLimit = 4096;

enum class WeightStorage { Dense, Implicit };

// A realization (G, f) ~ (W, f). Immutable after construction.
class SampledGraph {
 public:
  SampledGraph(Kernel kernel, std::vector<Point> nodes, Matrix features,
               std::size_t dense_limit = kDenseLimit)
      : kernel_(kernel), nodes_(std::move(nodes)), features_(std::move(features)) {
    if (nodes_.empty()) throw std::invalid_argument("SampledGraph: no nodes");
    if (static_cast<std::size_t>(features_.rows()) != nodes_.size())
      throw std::invalid_argument("SampledGraph: feature rows do not match node count");
    const std::size_t n = nodes_.size();
    storage_ = n <= dense_limit ? WeightStorage::Dense : WeightStorage::Implicit;
    if (storage_ == WeightStorage::Dense) {
      dense_.resize(n * n);
      parallel_for(n, [&](std::size_t i) {
        for (std::size_t j = 0; j < n; ++j)
          dense_[i * n + j] = kernel_.profile(raw_distance(nodes_[i], nodes_[j]));
      });
    }
    row_sums_.resize(static_cast<Eigen::Index>(n));
    parallel_for(n, [&](std::size_t i) {
      double s = 0.0;
      for_each_neighbor(i, [&](std::size_t, double w) { s += w; });
      row_sums_[static_cast<Eigen::Index>(i)] = s;
    });
    degrees_ = row_sums_ / static_cast<double>(n);
  }

  std::size_t size() const noexcept { return nodes_.size(); }
  const Kernel& kernel() const noexcept { return kernel_; }
  const std::vector<Point>& nodes() const noexcept { return nodes_; }
  const Matrix& features() const noexcept { return features_; }
  // Normalized degrees d_G(X_i) = (1/N) sum_j w_ij.
  const Vector& degrees() const noexcept { return degrees_; }
  // Unnormalized degrees sum_j w_ij.
  const Vector& row_sums() const noexcept { return row_sums_; }
  WeightStorage storage() const noexcept { return storage_; }

  double weight(std::size_t i, std::size_t j) const {
    if (storage_ == WeightStorage::Dense) return dense_[i * size() + j];
    return kernel_.profile(raw_distance(nodes_[i], nodes_[j]));
  }

  // Calls fn(j, w_ij) for every nonzero weight of row i in increasing j.
  template <class Fn>
  void for_each_neighbor(std::size_t i, Fn&& fn) const {
    const std::size_t n = size();
    if (storage_ == WeightStorage::Dense) {
      const double* row = dense_.data() + i * n;
      for (std::size_t j = 0; j < n; ++j)
        if (row[j] != 0.0) fn(j, row[j]);
    } else {
      const Point& x = nodes_[i];
      for (std::size_t j = 0; j < n; ++j) {
        const double w = kernel_.profile(raw_distance(x, nodes_[j]));
        if (w != 0.0) fn(j, w);
      }
    }
  }

  Eigen::MatrixXd dense_weights() const {
    const auto n = static_cast<Eigen::Index>(size());
    Eigen::MatrixXd w(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        w(i, j) = weight(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    return w;
  }

  SampledGraph with_features(Matrix features) const {
    return SampledGraph(kernel_, nodes_, std::move(features),
                        storage_ == WeightStorage::Dense ? size() : 0);
  }

 private:
  Kernel kernel_;
  std::vector<Point> nodes_;
  Matrix features_;
  WeightStorage storage_ = WeightStorage::Dense;
  std::vector<double> dense_;
  Vector row_sums_;
  Vector degrees_;
};

// Random graph model (W, f) on a space.
struct GraphModel {
  Kernel kernel;
  Signal signal;
  MetricMeasureSpace space = MetricMeasureSpace::unit_square();
};

inline SampledGraph sample_graph(const GraphModel& model, std::size_t n, std::uint64_t seed,
                                 std::size_t dense_limit = kDenseLimit) {
  auto nodes = sample_points(model.space, n, derive_seed(seed, stream::positions));
  Matrix feats = node_features(model.signal, nodes, seed);
  return SampledGraph(model.kernel, std::move(nodes), std::move(feats), dense_limit);
}

struct Subsample {
  SampledGraph graph;
  std::vector<std::size_t> index;  // index[k] = parent row of subgraph node k
};

// Uniform m-subset without replacement (partial Fisher-Yates). Features travel
// with their nodes.
inline Subsample subsample_graph(const SampledGraph& parent, std::size_t m, std::uint64_t seed,
                                 std::size_t dense_limit = kDenseLimit) {
  const std::size_t n = parent.size();
  if (m == 0 || m > n) throw std::invalid_argument("subsample_graph: need 1 <= m <= N");
  Rng rng(derive_seed(seed, stream::subsample));
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t pick = k + static_cast<std::size_t>(rng.index(n - k));
    std::swap(perm[k], perm[pick]);
  }
  perm.resize(m);
  std::vector<Point> nodes;
  nodes.reserve(m);
  Matrix feats(static_cast<Eigen::Index>(m), parent.features().cols());
  for (std::size_t k = 0; k < m; ++k) {
    nodes.push_back(parent.nodes()[perm[k]]);
    feats.row(static_cast<Eigen::Index>(k)) = parent.features().row(static_cast<Eigen::Index>(perm[k]));
  }
  return Subsample{SampledGraph(parent.kernel(), std::move(nodes), std::move(feats), dense_limit),
                   std::move(perm)};
}

}  // namespace mpnn_lab
