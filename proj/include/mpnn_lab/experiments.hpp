#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "mpnn_lab/bounds.hpp"
#include "mpnn_lab/cmpnn.hpp"
#include "mpnn_lab/graph.hpp"
#include "mpnn_lab/kernel.hpp"
#include "mpnn_lab/metrics.hpp"
#include "mpnn_lab/mpnn.hpp"
#include "mpnn_lab/parallel.hpp"
#include "mpnn_lab/rng.hpp"
#include "mpnn_lab/signal.hpp"

namespace mpnn_lab {

struct MPNNConfig {
  std::size_t hidden = 16;
  std::size_t depth = 2;
  std::size_t output_dim = 16;
  double init_scale = 1.0;
  std::uint64_t seed = 1;

  // (F_0, hidden, ..., hidden, output_dim)
  std::vector<std::size_t> dims(std::size_t input_dim) const {
    if (depth == 0) throw std::invalid_argument("MPNNConfig: depth must be positive");
    std::vector<std::size_t> d{input_dim};
    for (std::size_t t = 1; t < depth; ++t) d.push_back(hidden);
    d.push_back(output_dim);
    return d;
  }

  MPNNSpec build(std::size_t input_dim) const { return graphsage_random(dims(input_dim), seed, init_scale); }
};

inline std::vector<std::size_t> powers_of_two(unsigned lo, unsigned hi) {
  std::vector<std::size_t> v;
  for (unsigned k = lo; k <= hi; ++k) v.push_back(std::size_t{1} << k);
  return v;
}

// ---------------------------------------------------------------- convergence

struct ConvergenceConfig {
  KernelKind kernel_kind = KernelKind::BallIndicator;
  double ramp_width = 0.05;  // SmoothedBall only
  std::vector<double> radii{0.1, 0.5, 0.9};
  std::vector<std::string> signals{"product", "bandlimited", "noise"};
  std::size_t reference_n = std::size_t{1} << 14;
  std::vector<std::size_t> sizes = powers_of_two(1, 13);
  std::size_t trials = 10;
  MPNNConfig mpnn;
  std::uint64_t seed = 0;
  std::size_t fit_min_size = 32;
  double noise_sigma = 1.0;

  void validate() const {
    if (radii.empty()) throw std::invalid_argument("convergence: radii must not be empty");
    if (signals.empty()) throw std::invalid_argument("convergence: signals must not be empty");
    if (sizes.empty()) throw std::invalid_argument("convergence: sizes must not be empty");
    if (trials == 0) throw std::invalid_argument("convergence: trials must be at least 1");
    for (std::size_t i = 0; i < sizes.size(); ++i) {
      if (sizes[i] == 0) throw std::invalid_argument("convergence: sizes must be positive");
      if (i > 0 && sizes[i] <= sizes[i - 1])
        throw std::invalid_argument("convergence: sizes must be strictly increasing");
    }
    if (sizes.back() > reference_n) throw std::invalid_argument("convergence: sizes exceed reference_n");
    for (const auto& s : signals) parse_signal_family(s);
    for (double r : radii) make_kernel(r);
  }

  Kernel make_kernel(double r) const {
    switch (kernel_kind) {
      case KernelKind::BallIndicator:
        return Kernel::ball_indicator(r);
      case KernelKind::SmoothedBall:
        return Kernel::smoothed_ball(r, std::min(ramp_width, r));
      case KernelKind::Constant:
        return Kernel::constant(1.0);
    }
    throw std::invalid_argument("convergence: unknown kernel");
  }
};

struct ConvergenceRecord {
  double r = 0.0;
  std::string signal;
  std::size_t trial = 0;
  std::size_t n = 0;
  double dist_node = 0.0;
  double dist_pooled = 0.0;
};

struct ConvergenceCurve {
  double r = 0.0;
  std::string signal;
  std::vector<std::size_t> sizes;
  std::vector<double> mean_node;
  std::vector<double> mean_pooled;
  std::optional<LogLogFit> fit_node;
  std::optional<LogLogFit> fit_pooled;
};

struct ConvergenceResult {
  std::vector<ConvergenceRecord> records;
  std::vector<ConvergenceCurve> curves;
  std::vector<std::string> diagnostics;

  const ConvergenceCurve& curve(double r, const std::string& signal) const {
    for (const auto& c : curves)
      if (c.r == r && c.signal == signal) return c;
    throw std::out_of_range("no curve for the requested radius and signal");
  }
};

// Seed of trial t; shared by every radius and signal so that curves are paired.
inline std::uint64_t trial_seed(std::uint64_t master, std::size_t trial) {
  return derive_seed(master, stream::trial, trial);
}

inline ConvergenceResult run_convergence(const ConvergenceConfig& cfg) {
  cfg.validate();
  struct Unit {
    std::size_t ri, si, trial;
  };
  std::vector<Unit> units;
  for (std::size_t ri = 0; ri < cfg.radii.size(); ++ri)
    for (std::size_t si = 0; si < cfg.signals.size(); ++si)
      for (std::size_t t = 0; t < cfg.trials; ++t) units.push_back({ri, si, t});

  struct UnitOut {
    std::vector<ConvergenceRecord> records;
    std::string diagnostic;
  };
  std::vector<UnitOut> outs(units.size());

  parallel_for(units.size(), [&](std::size_t u) {
    const auto [ri, si, t] = units[u];
    const double r = cfg.radii[ri];
    const std::string& sname = cfg.signals[si];
    const std::uint64_t ts = trial_seed(cfg.seed, t);
    try {
      const Signal signal = make_signal(sname, ts, cfg.noise_sigma);
      const GraphModel model{cfg.make_kernel(r), signal, MetricMeasureSpace::unit_square()};
      auto net = std::make_shared<const MPNNSpec>(cfg.mpnn.build(signal.dim));
      auto parent = std::make_shared<const SampledGraph>(sample_graph(model, cfg.reference_n, ts));
      const auto ref = reference_from_large_graph(net, parent);
      const Vector ref_pool = ref.pooled();
      for (std::size_t k = 0; k < cfg.sizes.size(); ++k) {
        const std::size_t n = cfg.sizes[k];
        const auto sub = subsample_graph(*parent, n, derive_seed(ts, stream::subsample, k));
        const Matrix out = gmpnn_forward(*net, sub.graph);
        ConvergenceRecord rec;
        rec.r = r;
        rec.signal = sname;
        rec.trial = t;
        rec.n = n;
        rec.dist_node = dist_x(out, ref.restrict_to(sub.index));
        rec.dist_pooled = pooled_dist(global_pool(out), ref_pool);
        outs[u].records.push_back(rec);
      }
    } catch (const IsolatedNodeError& e) {
      outs[u].records.clear();
      outs[u].diagnostic = "r=" + std::to_string(r) + " signal=" + sname + " trial=" +
                           std::to_string(t) + ": " + e.what();
    }
  });

  ConvergenceResult res;
  for (auto& o : outs) {
    res.records.insert(res.records.end(), o.records.begin(), o.records.end());
    if (!o.diagnostic.empty()) res.diagnostics.push_back(o.diagnostic);
  }
  for (std::size_t ri = 0; ri < cfg.radii.size(); ++ri)
    for (std::size_t si = 0; si < cfg.signals.size(); ++si) {
      ConvergenceCurve c;
      c.r = cfg.radii[ri];
      c.signal = cfg.signals[si];
      std::vector<double> fit_n, fit_node, fit_pool;
      for (std::size_t n : cfg.sizes) {
        double sn = 0.0, sp = 0.0;
        std::size_t cnt = 0;
        for (const auto& rec : res.records)
          if (rec.r == c.r && rec.signal == c.signal && rec.n == n) {
            sn += rec.dist_node;
            sp += rec.dist_pooled;
            ++cnt;
          }
        if (cnt == 0) continue;
        c.sizes.push_back(n);
        c.mean_node.push_back(sn / static_cast<double>(cnt));
        c.mean_pooled.push_back(sp / static_cast<double>(cnt));
        if (n >= cfg.fit_min_size && c.mean_node.back() > 0.0 && c.mean_pooled.back() > 0.0) {
          fit_n.push_back(static_cast<double>(n));
          fit_node.push_back(c.mean_node.back());
          fit_pool.push_back(c.mean_pooled.back());
        }
      }
      if (fit_n.size() >= 2) {
        c.fit_node = fit_loglog_slope(fit_n, fit_node);
        c.fit_pooled = fit_loglog_slope(fit_n, fit_pool);
      }
      res.curves.push_back(std::move(c));
    }
  return res;
}

// ------------------------------------------------------------------ stability

struct StabilityConfig {
  Kernel kernel = Kernel::smoothed_ball(0.3, 0.05);
  Signal signal = product_signal();
  MPNNSpec net = mean_aggregation_net(1);
  std::size_t n = 1024;
  std::size_t n_prime = 1024;
  std::size_t trials = 20;
  std::uint64_t seed = 0;
  bool shared_seed = false;  // draw G and G' from the same seed
  std::optional<double> bound_p;
  double dudley_c = 1.0;
  std::size_t grid_res = 11;
};

struct StabilityResult {
  std::vector<double> distances;
  double mean = 0.0;
  double max = 0.0;
  std::optional<TwoGraphBoundValue> bound;
  std::optional<std::uint64_t> min_n;
  std::string bound_status;
};

// Pooled-output distances between independent graphs of sizes N and N'.
inline StabilityResult run_stability_pair(const StabilityConfig& cfg) {
  if (cfg.trials == 0) throw std::invalid_argument("stability: trials must be at least 1");
  StabilityResult res;
  if (cfg.bound_p) {
    const auto space = MetricMeasureSpace::unit_square();
    const auto prof = regularity_profile(cfg.kernel, space, cfg.dudley_c, cfg.grid_res);
    if (!prof.lipschitz()) {
      res.bound_status = "bound unavailable: kernel is not Lipschitz";
    } else if (!cfg.signal.lipschitz() || !std::isfinite(cfg.signal.sup_f)) {
      res.bound_status = "bound unavailable: signal is not Lipschitz";
    } else {
      const auto layers = layer_constants(cfg.net);
      res.min_n = min_nodes(prof, *cfg.bound_p);
      res.bound = two_graph_bound(cfg.n, cfg.n_prime, *cfg.bound_p, layers, prof, regularity_of(cfg.signal));
      res.bound_status = "ok";
    }
  } else {
    res.bound_status = "not requested";
  }
  const GraphModel model{cfg.kernel, cfg.signal, MetricMeasureSpace::unit_square()};
  res.distances.assign(cfg.trials, 0.0);
  parallel_for(cfg.trials, [&](std::size_t t) {
    const std::uint64_t ts = trial_seed(cfg.seed, t);
    const std::uint64_t sa = derive_seed(ts, 0);
    const std::uint64_t sb = cfg.shared_seed ? sa : derive_seed(ts, 1);
    const auto ga = sample_graph(model, cfg.n, sa);
    const auto gb = sample_graph(model, cfg.n_prime, sb);
    res.distances[t] = pooled_dist(global_pool(gmpnn_forward(cfg.net, ga)),
                                   global_pool(gmpnn_forward(cfg.net, gb)));
  });
  double s = 0.0;
  for (double d : res.distances) {
    s += d;
    res.max = std::max(res.max, d);
  }
  res.mean = s / static_cast<double>(cfg.trials);
  return res;
}

// ------------------------------------------------------------- generalization

struct LossSpec {
  double lipschitz = 2.0;  // softmax cross-entropy w.r.t. sup-norm logit perturbations
};

// Cross-entropy of softmax over the first `classes` coordinates.
inline double softmax_cross_entropy(const Vector& output, std::size_t classes, std::size_t label) {
  if (static_cast<std::size_t>(output.size()) < classes)
    throw OutputDimensionError("network output has fewer coordinates than classes");
  if (label >= classes) throw std::invalid_argument("softmax_cross_entropy: label out of range");
  double mx = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < classes; ++k) mx = std::max(mx, output[static_cast<Eigen::Index>(k)]);
  double s = 0.0;
  for (std::size_t k = 0; k < classes; ++k) s += std::exp(output[static_cast<Eigen::Index>(k)] - mx);
  return std::log(s) + mx - output[static_cast<Eigen::Index>(label)];
}

struct LabeledGraph {
  SampledGraph graph;
  std::size_t label = 0;
};

inline std::uint64_t draw_node_count(const NodeLaw& law, Rng& rng) {
  switch (law.kind) {
    case NodeLawKind::Fixed:
      return law.fixed;
    case NodeLawKind::UniformRange:
      return law.lo + rng.index(law.hi - law.lo + 1);
    case NodeLawKind::Categorical: {
      const double u = rng.uniform();
      double acc = 0.0;
      for (std::size_t i = 0; i < law.values.size(); ++i) {
        acc += law.probs[i];
        if (u < acc) return law.values[i];
      }
      return law.values.back();
    }
  }
  return law.fixed;
}

// Stratified training set: exactly gamma_j m graphs of class j, in class order.
inline std::vector<LabeledGraph> sample_training_set(const ClassDistribution& dist, std::size_t m,
                                                     std::uint64_t seed) {
  const auto counts = class_counts(dist, m);
  Rng sizes(derive_seed(seed, stream::node_count));
  std::vector<LabeledGraph> out;
  std::size_t idx = 0;
  for (std::size_t j = 0; j < counts.size(); ++j) {
    const GraphModel model{dist.classes[j].kernel, dist.classes[j].signal, dist.space};
    for (std::size_t k = 0; k < counts[j]; ++k, ++idx) {
      const auto n = static_cast<std::size_t>(draw_node_count(dist.node_law, sizes));
      out.push_back({sample_graph(model, n, derive_seed(seed, stream::positions, idx)), j});
    }
  }
  return out;
}

inline double empirical_risk(const MPNNSpec& net, const std::vector<LabeledGraph>& set,
                             std::size_t classes) {
  if (set.empty()) throw std::invalid_argument("empirical_risk: empty training set");
  if (net.output_dim() < classes) throw OutputDimensionError("network output has fewer coordinates than classes");
  std::vector<double> losses(set.size());
  parallel_for(set.size(), [&](std::size_t i) {
    losses[i] = softmax_cross_entropy(global_pool(gmpnn_forward(net, set[i].graph)), classes, set[i].label);
  });
  double s = 0.0;
  for (double l : losses) s += l;
  return s / static_cast<double>(set.size());
}

// Stratified Monte-Carlo estimate of E[V(Theta^P(G), y)]: each class gets
// round(gamma_j mc_size) fresh graphs and the class means are weighted by gamma_j.
inline double statistical_risk(const MPNNSpec& net, const ClassDistribution& dist,
                               std::size_t mc_size, std::uint64_t seed) {
  dist.validate();
  const std::size_t classes = dist.class_count();
  if (net.output_dim() < classes) throw OutputDimensionError("network output has fewer coordinates than classes");
  if (mc_size == 0) throw std::invalid_argument("statistical_risk: mc_size must be positive");
  double risk = 0.0;
  for (std::size_t j = 0; j < classes; ++j) {
    const double gamma = dist.classes[j].gamma;
    if (gamma == 0.0) continue;
    const auto count = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(gamma * static_cast<double>(mc_size))));
    const GraphModel model{dist.classes[j].kernel, dist.classes[j].signal, dist.space};
    const std::uint64_t cs = derive_seed(seed, stream::labels, j);
    Rng sizes(derive_seed(cs, stream::node_count));
    std::vector<std::size_t> ns(count);
    for (auto& n : ns) n = static_cast<std::size_t>(draw_node_count(dist.node_law, sizes));
    std::vector<double> losses(count);
    parallel_for(count, [&](std::size_t k) {
      const auto g = sample_graph(model, ns[k], derive_seed(cs, stream::positions, k));
      losses[k] = softmax_cross_entropy(global_pool(gmpnn_forward(net, g)), classes, j);
    });
    double s = 0.0;
    for (double l : losses) s += l;
    risk += gamma * s / static_cast<double>(count);
  }
  return risk;
}

struct GapConfig {
  ClassDistribution dist;
  std::size_t m = 20;
  std::size_t trials = 10;
  LossSpec loss;
  std::size_t mc_size = 200;
  std::uint64_t seed = 0;
  MPNNSpec net = graphsage_random({1, 16, 2}, 1);
  bool with_bound = true;
  double dudley_c = 1.0;
  std::size_t grid_res = 11;

  void validate() const {
    dist.validate();
    class_counts(dist, m);
    if (trials == 0) throw std::invalid_argument("generalization: trials must be at least 1");
    if (mc_size < 10 * m) throw std::invalid_argument("generalization: mc_size must be at least 10 m");
  }
};

struct GapRecord {
  std::size_t trial = 0;
  std::size_t m = 0;
  double r_emp = 0.0;
  double r_exp = 0.0;
  double sq_gap = 0.0;
  double bound = std::numeric_limits<double>::quiet_NaN();
};

struct GapResult {
  std::vector<GapRecord> records;
  double r_exp = 0.0;
  double mean_sq_gap = 0.0;
  std::optional<GeneralizationBound> bound;
  std::string bound_status;
};

inline GapResult run_generalization(const GapConfig& cfg) {
  cfg.validate();
  GapResult res;
  const std::size_t classes = cfg.dist.class_count();
  if (cfg.with_bound) {
    std::vector<RegularityProfile> profiles;
    std::vector<SignalRegularity> sigs;
    bool ok = true;
    for (const auto& c : cfg.dist.classes) {
      profiles.push_back(regularity_profile(c.kernel, cfg.dist.space, cfg.dudley_c, cfg.grid_res));
      sigs.push_back(regularity_of(c.signal));
      ok = ok && profiles.back().lipschitz() && c.signal.lipschitz() && std::isfinite(c.signal.sup_f);
    }
    if (ok) {
      res.bound = generalization_bound(cfg.dist, layer_constants(cfg.net), profiles, sigs, cfg.m,
                                       cfg.loss.lipschitz);
      res.bound_status = "ok";
    } else {
      res.bound_status = "bound unavailable: a class kernel or signal is not Lipschitz";
    }
  } else {
    res.bound_status = "not requested";
  }
  res.r_exp = statistical_risk(cfg.net, cfg.dist, cfg.mc_size, derive_seed(cfg.seed, stream::quadrature));
  double s = 0.0;
  for (std::size_t t = 0; t < cfg.trials; ++t) {
    const auto set = sample_training_set(cfg.dist, cfg.m, trial_seed(cfg.seed, t));
    GapRecord rec;
    rec.trial = t;
    rec.m = cfg.m;
    rec.r_emp = empirical_risk(cfg.net, set, classes);
    rec.r_exp = res.r_exp;
    rec.sq_gap = (rec.r_emp - rec.r_exp) * (rec.r_emp - rec.r_exp);
    if (res.bound) rec.bound = res.bound->total;
    s += rec.sq_gap;
    res.records.push_back(rec);
  }
  res.mean_sq_gap = s / static_cast<double>(cfg.trials);
  return res;
}

// ---------------------------------------------------------- degree certificates

// Cell counts of n uniform points on a grid x grid partition of the unit
// square, drawn as a multinomial by sequential binomials. Uses
// std::binomial_distribution, so counts are reproducible per standard library.
inline std::vector<std::uint64_t> uniform_cell_counts(std::uint64_t n, std::size_t grid, std::uint64_t seed) {
  if (grid == 0) throw std::invalid_argument("uniform_cell_counts: grid must be positive");
  const std::size_t cells = grid * grid;
  Rng rng(derive_seed(seed, stream::positions));
  std::vector<std::uint64_t> counts(cells, 0);
  std::uint64_t left = n;
  for (std::size_t c = 0; c + 1 < cells && left > 0; ++c) {
    std::binomial_distribution<std::uint64_t> bin(left, 1.0 / static_cast<double>(cells - c));
    counts[c] = bin(rng.engine());
    left -= counts[c];
  }
  counts[cells - 1] += left;
  return counts;
}

inline std::vector<std::uint64_t> bin_points(const std::vector<Point>& pts, std::size_t grid) {
  std::vector<std::uint64_t> counts(grid * grid, 0);
  const auto cell = [grid](double t) {
    return std::min(static_cast<std::size_t>(t * static_cast<double>(grid)), grid - 1);
  };
  for (const auto& p : pts) {
    if (p.size() != 2) throw std::invalid_argument("bin_points: unit square points required");
    ++counts[cell(p[0]) * grid + cell(p[1])];
  }
  return counts;
}

// Lower bound on min_i d_G(X_i) valid for every placement of the points
// inside their cells. Two points in cells (a, b), (a', b') are at most
// h sqrt((|a-a'|+1)^2 + (|b-b'|+1)^2) apart, and the profile is nonincreasing.
inline double certified_min_degree(const Kernel& k, const std::vector<std::uint64_t>& counts, std::size_t grid) {
  if (counts.size() != grid * grid) throw std::invalid_argument("certified_min_degree: count grid mismatch");
  std::uint64_t n = 0;
  for (auto c : counts) n += c;
  if (n == 0) throw std::invalid_argument("certified_min_degree: no points");
  const double h = 1.0 / static_cast<double>(grid);
  const auto g = static_cast<long>(grid);
  std::vector<double> lw(grid * grid);
  long reach = 0;
  for (long di = 0; di < g; ++di)
    for (long dj = 0; dj < g; ++dj) {
      const double d = h * std::hypot(static_cast<double>(di + 1), static_cast<double>(dj + 1));
      lw[static_cast<std::size_t>(di * g + dj)] = k.profile(d);
      if (lw[static_cast<std::size_t>(di * g + dj)] > 0.0) reach = std::max(reach, std::max(di, dj));
    }
  std::vector<double> bound(grid * grid, std::numeric_limits<double>::infinity());
  parallel_for(grid * grid, [&](std::size_t cell) {
    if (counts[cell] == 0) return;
    const long a = static_cast<long>(cell) / g, b = static_cast<long>(cell) % g;
    double s = 0.0;
    for (long a2 = std::max(0L, a - reach); a2 <= std::min(g - 1, a + reach); ++a2)
      for (long b2 = std::max(0L, b - reach); b2 <= std::min(g - 1, b + reach); ++b2) {
        const auto c2 = counts[static_cast<std::size_t>(a2 * g + b2)];
        if (c2 != 0)
          s += static_cast<double>(c2) * lw[static_cast<std::size_t>(std::labs(a - a2) * g + std::labs(b - b2))];
      }
    bound[cell] = s / static_cast<double>(n);
  });
  return *std::min_element(bound.begin(), bound.end());
}

namespace detail {

// max of sum_k n_k w_k v_k / sum_k n_k w_k over w_k in [lo_k, hi_k]. At the
// optimum the weights above the optimal value sit at hi and the rest at lo,
// so scanning the thresholds of the sorted values is exact.
inline double max_weighted_mean(std::vector<std::array<double, 4>>& items /* n, lo, hi, v */) {
  std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) { return a[3] > b[3]; });
  double num = 0.0, den = 0.0;
  for (const auto& it : items) {
    num += it[0] * it[1] * it[3];
    den += it[0] * it[1];
  }
  double best = den > 0.0 ? num / den : -std::numeric_limits<double>::infinity();
  for (const auto& it : items) {
    num += it[0] * (it[2] - it[1]) * it[3];
    den += it[0] * (it[2] - it[1]);
    if (den > 0.0) best = std::max(best, num / den);
  }
  return best;
}

}  // namespace detail

struct PoolEnclosure {
  double lo = 0.0;
  double hi = 0.0;
};

// Interval containing the pooled output of one mean-aggregation layer
// (Phi(a, b) = b, Psi(a, m) = m) on every graph whose nodes have the given
// grid cell counts, for a scalar Lipschitz signal. Per cell, the signal range
// is f(center) +- L_f h / sqrt(2); weights range over the kernel profile on the
// cell-pair distance range.
inline PoolEnclosure certified_mean_pool(const Kernel& k, const Signal& s,
                                         const std::vector<std::uint64_t>& counts, std::size_t grid) {
  if (s.dim != 1 || !s.point_evaluable() || !s.lipschitz())
    throw UnsupportedSignalError("certified_mean_pool: needs a scalar Lipschitz signal");
  if (counts.size() != grid * grid) throw std::invalid_argument("certified_mean_pool: count grid mismatch");
  std::uint64_t n = 0;
  for (auto c : counts) n += c;
  if (n == 0) throw std::invalid_argument("certified_mean_pool: no points");
  const double h = 1.0 / static_cast<double>(grid);
  const auto g = static_cast<long>(grid);
  std::vector<double> flo(grid * grid), fhi(grid * grid);
  for (long a = 0; a < g; ++a)
    for (long b = 0; b < g; ++b) {
      double v = 0.0;
      eval_signal_into(s, Point((static_cast<double>(a) + 0.5) * h, (static_cast<double>(b) + 0.5) * h), &v);
      const double slack = s.lip_f * h / std::numbers::sqrt2;
      flo[static_cast<std::size_t>(a * g + b)] = std::max(v - slack, -s.sup_f);
      fhi[static_cast<std::size_t>(a * g + b)] = std::min(v + slack, s.sup_f);
    }
  // Weight range by |cell offset|.
  std::vector<double> wlo(grid * grid), whi(grid * grid);
  const auto gap = [](long d) { return static_cast<double>(std::max(0L, d - 1)); };
  for (long di = 0; di < g; ++di)
    for (long dj = 0; dj < g; ++dj) {
      const auto idx = static_cast<std::size_t>(di * g + dj);
      wlo[idx] = k.profile(h * std::hypot(static_cast<double>(di + 1), static_cast<double>(dj + 1)));
      whi[idx] = k.profile(h * std::hypot(gap(di), gap(dj)));
    }
  std::vector<double> cell_lo(grid * grid, 0.0), cell_hi(grid * grid, 0.0);
  parallel_for(grid * grid, [&](std::size_t cell) {
    if (counts[cell] == 0) return;
    const long a = static_cast<long>(cell) / g, b = static_cast<long>(cell) % g;
    std::vector<std::array<double, 4>> up, down;
    for (long a2 = 0; a2 < g; ++a2)
      for (long b2 = 0; b2 < g; ++b2) {
        const auto c2 = static_cast<std::size_t>(a2 * g + b2);
        const auto off = static_cast<std::size_t>(std::labs(a - a2) * g + std::labs(b - b2));
        if (counts[c2] == 0 || whi[off] == 0.0) continue;
        const double cnt = static_cast<double>(counts[c2]);
        // The node itself contributes w(0) = sup w exactly.
        if (c2 == cell) {
          const double self = k.profile(0.0);
          up.push_back({1.0, self, self, fhi[c2]});
          down.push_back({1.0, self, self, -flo[c2]});
          if (counts[c2] == 1) continue;
          up.push_back({cnt - 1.0, wlo[off], whi[off], fhi[c2]});
          down.push_back({cnt - 1.0, wlo[off], whi[off], -flo[c2]});
          continue;
        }
        up.push_back({cnt, wlo[off], whi[off], fhi[c2]});
        down.push_back({cnt, wlo[off], whi[off], -flo[c2]});
      }
    cell_hi[cell] = detail::max_weighted_mean(up);
    cell_lo[cell] = -detail::max_weighted_mean(down);
  });
  PoolEnclosure e;
  for (std::size_t c = 0; c < counts.size(); ++c) {
    e.lo += static_cast<double>(counts[c]) * cell_lo[c];
    e.hi += static_cast<double>(counts[c]) * cell_hi[c];
  }
  e.lo /= static_cast<double>(n);
  e.hi /= static_cast<double>(n);
  return e;
}

}  // namespace mpnn_lab
