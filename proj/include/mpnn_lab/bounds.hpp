#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mpnn_lab/errors.hpp"
#include "mpnn_lab/kernel.hpp"
#include "mpnn_lab/mpnn.hpp"
#include "mpnn_lab/signal.hpp"

namespace mpnn_lab {

struct SignalRegularity {
  double sup_f = 0.0;
  double lip_f = 0.0;
};

inline SignalRegularity regularity_of(const Signal& s) { return {s.sup_f, s.lip_f}; }

struct BoundOptions {
  // Use N^{2T} instead of N^{2T-1} in the remainder polynomial q(N).
  bool remainder_exponent_2T = false;
};

namespace detail {

inline void require_probability(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("bound: p must lie in (0, 1)");
}

inline void require_lipschitz(const RegularityProfile& prof) {
  if (!prof.lipschitz())
    throw NonLipschitzKernelError("bound: kernel is not Lipschitz (L_W is infinite)");
  if (!(prof.d_min > 0.0)) throw std::invalid_argument("bound: d_min must be positive");
}

inline void require_finite(const SignalRegularity& sig) {
  if (!std::isfinite(sig.sup_f) || !std::isfinite(sig.lip_f))
    throw UnsupportedSignalError("bound: signal regularity must be finite");
}

// sqrt(log(2/p))
inline double log_factor(double p) {
  require_probability(p);
  return std::sqrt(std::log(2.0 / p));
}

// Kernel-normalized quantities for W~ = W / d_W.
inline double sup_w_tilde(const RegularityProfile& prof) { return prof.sup_w / prof.d_min; }
inline double lip_w_tilde(const RegularityProfile& prof) {
  return prof.lip_w / prof.d_min + prof.lip_w * prof.sup_w / (prof.d_min * prof.d_min);
}

}  // namespace detail

// Smallest N with sqrt(N) >= 2 (zeta (L_W/d_min) sqrt(dim) + ((sqrt2 |W| + L_W)/d_min) sqrt(log(2/p))).
inline std::uint64_t min_nodes(const RegularityProfile& prof, double p) {
  detail::require_lipschitz(prof);
  const double ell = detail::log_factor(p);
  const double rhs = 2.0 * (prof.zeta * (prof.lip_w / prof.d_min) * std::sqrt(prof.dim_chi) +
                            ((std::numbers::sqrt2 * prof.sup_w + prof.lip_w) / prof.d_min) * ell);
  const double sq = rhs * rhs;
  if (!(sq < 1.8e19)) throw std::overflow_error("min_nodes: required N exceeds 64-bit range");
  auto n = static_cast<std::uint64_t>(std::max(1.0, std::ceil(sq)));
  while (std::sqrt(static_cast<double>(n)) < rhs) ++n;
  while (n > 1 && std::sqrt(static_cast<double>(n - 1)) >= rhs) --n;
  return n;
}

inline double epsilon_d(const RegularityProfile& prof, double p) {
  detail::require_lipschitz(prof);
  const double ell = detail::log_factor(p);
  return prof.zeta * (prof.lip_w * std::sqrt(prof.dim_chi) +
                      (std::numbers::sqrt2 * prof.sup_w + prof.lip_w) * ell);
}

inline double lambda_tilde(const LayerConstants& layer, const SignalRegularity& sig,
                           const RegularityProfile& prof) {
  detail::require_lipschitz(prof);
  detail::require_finite(sig);
  const double a = detail::sup_w_tilde(prof) * sig.lip_f * layer.lip_phi;
  const double b = detail::lip_w_tilde(prof) * (layer.bias_phi + 2.0 * layer.lip_phi * sig.sup_f);
  return std::sqrt(a * a + b * b);
}

inline double epsilon_w(const LayerConstants& layer, const SignalRegularity& sig,
                        const RegularityProfile& prof, double p) {
  const double lt = lambda_tilde(layer, sig, prof);
  const double ell = detail::log_factor(p);
  return prof.zeta * lt * std::sqrt(prof.dim_chi) +
         (std::numbers::sqrt2 * prof.sup_w * (2.0 * layer.lip_phi * sig.sup_f + layer.bias_phi) +
          prof.zeta * lt) *
             ell;
}

// sqrt(N)-scaled error contributed by one layer.
inline double layer_error_D(const LayerConstants& layer, const SignalRegularity& sig_in,
                            const RegularityProfile& prof, double p) {
  const double ed = epsilon_d(prof, p);
  const double ew = epsilon_w(layer, sig_in, prof, p);
  return layer.lip_psi * (4.0 * ed * prof.sup_w *
                              (2.0 * layer.lip_phi * sig_in.sup_f + layer.bias_phi) /
                              (prof.d_min * prof.d_min) +
                          ew);
}

inline double layer_factor_K(const LayerConstants& layer, const RegularityProfile& prof) {
  if (!(prof.d_min > 0.0)) throw std::invalid_argument("layer_factor_K: d_min must be positive");
  const double ratio = prof.sup_w / prof.d_min;
  return std::sqrt(layer.lip_psi * layer.lip_psi +
                   8.0 * ratio * ratio * layer.lip_phi * layer.lip_phi * layer.lip_psi * layer.lip_psi);
}

// eta_T for eta_l = a_l eta_{l-1} + b_l, in closed form.
inline double solve_recurrence(const std::vector<double>& a, const std::vector<double>& b,
                               double eta0) {
  if (a.size() != b.size()) throw std::invalid_argument("solve_recurrence: length mismatch");
  const std::size_t t = a.size();
  double total = 0.0;
  for (std::size_t l = 0; l < t; ++l) {
    double prod = 1.0;
    for (std::size_t k = l + 1; k < t; ++k) prod *= a[k];
    total += b[l] * prod;
  }
  double prod_all = 1.0;
  for (double v : a) prod_all *= v;
  return total + eta0 * prod_all;
}

// Layer-by-layer bounds on ||f^(l)||_inf and L_{f^(l)} and their affine forms in
// (||f||_inf, L_f). Vectors indexed by layer l = 1..T are stored at [l - 1] and
// describe the input f^(l-1) of that layer.
struct RegularityRecursion {
  std::vector<double> sup_bound;  // [0..T]
  std::vector<double> lip_bound;  // [0..T]
  std::vector<double> norm_a, norm_c;  // ||f^(l)|| <= a_l ||f^(l-1)|| + c_l
  std::vector<double> D1, D2;          // ||f^(l-1)|| <= D1 + D2 ||f||
  std::vector<double> Z1, Z2, Z3;      // L_{f^(l-1)} <= Z1 + Z2 ||f|| + Z3 L_f
  double B_prime = 0.0;
  double B_dprime = 1.0;
  double lip_out = 0.0;
};

inline RegularityRecursion signal_regularity_recursions(const std::vector<LayerConstants>& layers,
                                                        const RegularityProfile& prof,
                                                        const SignalRegularity& sig) {
  detail::require_lipschitz(prof);
  detail::require_finite(sig);
  const double rho = prof.sup_w / prof.d_min;
  const double lwt = detail::lip_w_tilde(prof);
  RegularityRecursion r;
  r.sup_bound.push_back(sig.sup_f);
  r.lip_bound.push_back(sig.lip_f);
  double d1 = 0.0, d2 = 1.0, z1 = 0.0, z2 = 0.0, z3 = 1.0;
  for (const auto& L : layers) {
    r.D1.push_back(d1);
    r.D2.push_back(d2);
    r.Z1.push_back(z1);
    r.Z2.push_back(z2);
    r.Z3.push_back(z3);
    const double a = L.lip_psi * (1.0 + 2.0 * rho * L.lip_phi);
    const double c = L.lip_psi * rho * L.bias_phi + L.bias_psi;
    r.norm_a.push_back(a);
    r.norm_c.push_back(c);
    const double alpha = L.lip_psi * (1.0 + rho * L.lip_phi);
    const double beta = L.lip_psi * lwt;
    const double s_in = r.sup_bound.back();
    const double l_in = r.lip_bound.back();
    r.lip_bound.push_back(alpha * l_in + beta * (L.bias_phi + 2.0 * L.lip_phi * s_in));
    r.sup_bound.push_back(a * s_in + c);
    z1 = alpha * z1 + beta * (L.bias_phi + 2.0 * L.lip_phi * d1);
    z2 = alpha * z2 + beta * 2.0 * L.lip_phi * d2;
    z3 = alpha * z3;
    d1 = a * d1 + c;
    d2 = a * d2;
  }
  r.B_prime = solve_recurrence(r.norm_a, r.norm_c, 0.0);
  r.B_dprime = 1.0;
  for (double a : r.norm_a) r.B_dprime *= a;
  r.lip_out = r.lip_bound.back();
  return r;
}

// Coefficients of sqrt(N) * dist <= (C1' + C2' ||f|| + C3' L_f) + sqrt(log 2/p) (C1'' + C2'' ||f|| + C3'' L_f),
// obtained by expanding the layer-wise error terms in (||f||, L_f), plus the
// grouped presentation C1 + C2 (||f|| + L_f) + C3 (1 + ||f|| + L_f) sqrt(log 2/p).
struct NodeConstants {
  double C1p = 0.0, C2p = 0.0, C3p = 0.0;
  double C1pp = 0.0, C2pp = 0.0, C3pp = 0.0;
  double C1 = 0.0, C2 = 0.0, C3 = 0.0;
};

struct PooledConstants {
  double B1 = 0.0, B2 = 0.0, B3 = 0.0;
  double pool_const = 0.0;  // 2 sqrt2 B'
  double pool_sup = 0.0;    // 2 sqrt2 B''
};

struct LayerTerms {
  double E1 = 0.0, E2 = 0.0, E3 = 0.0, E4 = 0.0, E5 = 0.0, E6 = 0.0;
};

inline LayerTerms layer_terms(const LayerConstants& L, const RegularityProfile& prof) {
  const double z = prof.zeta;
  const double sd = std::sqrt(prof.dim_chi);
  const double wt = detail::sup_w_tilde(prof);
  const double lwt = detail::lip_w_tilde(prof);
  const double s2w = std::numbers::sqrt2 * prof.sup_w;
  LayerTerms e;
  e.E1 = z * wt * L.lip_phi * sd;
  e.E2 = 2.0 * z * lwt * L.lip_phi * sd;
  e.E3 = z * wt * L.lip_phi;
  e.E4 = 2.0 * z * lwt * L.lip_phi + 2.0 * s2w * L.lip_phi;
  e.E5 = (s2w + z * lwt) * L.bias_phi;
  e.E6 = z * lwt * L.bias_phi * sd;
  return e;
}

inline std::vector<double> tail_products(const std::vector<double>& k) {
  std::vector<double> out(k.size(), 1.0);
  for (std::size_t l = k.size(); l-- > 1;) out[l - 1] = out[l] * k[l];
  return out;
}

inline NodeConstants node_bound_constants(const std::vector<LayerConstants>& layers,
                                          const RegularityProfile& prof,
                                          const SignalRegularity& sig) {
  const auto rec = signal_regularity_recursions(layers, prof, sig);
  std::vector<double> ks;
  for (const auto& L : layers) ks.push_back(layer_factor_K(L, prof));
  const auto tail = tail_products(ks);
  const double z = prof.zeta;
  const double sd = std::sqrt(prof.dim_chi);
  const double u = 4.0 * prof.sup_w / (prof.d_min * prof.d_min);
  const double s2w = std::numbers::sqrt2 * prof.sup_w;
  NodeConstants c;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& L = layers[l];
    const auto e = layer_terms(L, prof);
    const double d1 = rec.D1[l], d2 = rec.D2[l];
    const double z1 = rec.Z1[l], z2 = rec.Z2[l], z3 = rec.Z3[l];
    const double w = L.lip_psi * tail[l];
    // degree-estimation part: u * eps_d * (2 L_phi s + |Phi(0,0)|)
    const double deg_const = u * z * prof.lip_w * sd;
    const double deg_log = u * z * (s2w + prof.lip_w);
    c.C1p += w * (deg_const * (2.0 * L.lip_phi * d1 + L.bias_phi) + e.E1 * z1 + e.E2 * d1 + e.E6);
    c.C2p += w * (deg_const * 2.0 * L.lip_phi * d2 + e.E1 * z2 + e.E2 * d2);
    c.C3p += w * (e.E1 * z3);
    c.C1pp += w * (deg_log * (2.0 * L.lip_phi * d1 + L.bias_phi) + e.E3 * z1 + e.E4 * d1 + e.E5);
    c.C2pp += w * (deg_log * 2.0 * L.lip_phi * d2 + e.E3 * z2 + e.E4 * d2);
    c.C3pp += w * (e.E3 * z3);
  }
  c.C1 = c.C1p;
  c.C2 = std::max(c.C2p, c.C3p);
  c.C3 = std::max({c.C1pp, c.C2pp, c.C3pp});
  return c;
}

inline PooledConstants pooled_bound_constants(const std::vector<LayerConstants>& layers,
                                              const RegularityProfile& prof,
                                              const SignalRegularity& sig) {
  const auto c = node_bound_constants(layers, prof, sig);
  const auto rec = signal_regularity_recursions(layers, prof, sig);
  PooledConstants b;
  b.pool_const = 2.0 * std::numbers::sqrt2 * rec.B_prime;
  b.pool_sup = 2.0 * std::numbers::sqrt2 * rec.B_dprime;
  b.B1 = c.C1;
  b.B2 = c.C2;
  b.B3 = std::max({c.C1pp + b.pool_const, c.C2pp + b.pool_sup, c.C3pp});
  return b;
}

struct BoundValue {
  double value = 0.0;
  double confidence = 0.0;
};

struct TwoGraphBoundValue {
  double value = 0.0;
  double confidence_printed = 0.0;    // 1 - 2(3Tp + 1), as stated
  double confidence_corrected = 0.0;  // 1 - 2(3T + 1)p
};

namespace detail {

inline void require_min_nodes(std::uint64_t n, const RegularityProfile& prof, double p) {
  const auto need = min_nodes(prof, p);
  if (n < need) throw ConditionViolatedError(n, need);
}

// sqrt(N)-scaled node and pooled coefficients at a given p.
inline std::pair<double, double> scaled_coefficients(const std::vector<LayerConstants>& layers,
                                                     const RegularityProfile& prof,
                                                     const SignalRegularity& sig, double p) {
  const auto c = node_bound_constants(layers, prof, sig);
  const auto rec = signal_regularity_recursions(layers, prof, sig);
  const double ell = log_factor(p);
  const double s = sig.sup_f, lf = sig.lip_f;
  const double node = (c.C1p + c.C2p * s + c.C3p * lf) + ell * (c.C1pp + c.C2pp * s + c.C3pp * lf);
  const double pool = node + ell * 2.0 * std::numbers::sqrt2 * (rec.B_prime + s * rec.B_dprime);
  return {node, pool};
}

}  // namespace detail

inline BoundValue node_level_bound(std::uint64_t n, double p,
                                   const std::vector<LayerConstants>& layers,
                                   const RegularityProfile& prof, const SignalRegularity& sig) {
  detail::require_min_nodes(n, prof, p);
  const double t = static_cast<double>(layers.size());
  return {detail::scaled_coefficients(layers, prof, sig, p).first / std::sqrt(static_cast<double>(n)),
          1.0 - 3.0 * t * p};
}

inline BoundValue pooled_bound(std::uint64_t n, double p, const std::vector<LayerConstants>& layers,
                               const RegularityProfile& prof, const SignalRegularity& sig) {
  detail::require_min_nodes(n, prof, p);
  const double t = static_cast<double>(layers.size());
  return {detail::scaled_coefficients(layers, prof, sig, p).second / std::sqrt(static_cast<double>(n)),
          1.0 - (3.0 * t + 1.0) * p};
}

inline TwoGraphBoundValue two_graph_bound(std::uint64_t n, std::uint64_t n_prime, double p,
                                          const std::vector<LayerConstants>& layers,
                                          const RegularityProfile& prof,
                                          const SignalRegularity& sig) {
  detail::require_min_nodes(n, prof, p);
  detail::require_min_nodes(n_prime, prof, p);
  const double t = static_cast<double>(layers.size());
  const double coeff = detail::scaled_coefficients(layers, prof, sig, p).second;
  TwoGraphBoundValue b;
  b.value = coeff * (1.0 / std::sqrt(static_cast<double>(n)) + 1.0 / std::sqrt(static_cast<double>(n_prime)));
  b.confidence_printed = 1.0 - 2.0 * (3.0 * t * p + 1.0);
  b.confidence_corrected = 1.0 - 2.0 * (3.0 * t + 1.0) * p;
  return b;
}

// ||f^(T)||_{2;inf}^2 <= sum_l c_l prod_{l'>l} a_l'(N) + ||f||^2 prod_l a_l(N) with
// a_l(N) = 16 L_psi^2 (1 + N^2 |W|^2 L_phi^2 / d_min^2), c_l = 16 L_psi^2 |Phi(0,0)|^2 + 16 |Psi(0,0)|^2.
// Since a_l(N) <= N^2 a^_l for N >= 1, this is at most N^{2T} (A' + A'' ||f||^2).
struct DeterministicBound {
  double A_prime = 0.0;
  double A_dprime = 0.0;
  double value = 0.0;     // the recursion evaluated at N
  double envelope = 0.0;  // N^{2T} (A' + A'' ||f||^2)
};

inline DeterministicBound deterministic_output_bound(const std::vector<LayerConstants>& layers,
                                                     const RegularityProfile& prof, std::uint64_t n,
                                                     double sup_f) {
  if (!(prof.d_min > 0.0)) throw std::invalid_argument("deterministic_output_bound: d_min must be positive");
  if (n == 0) throw std::invalid_argument("deterministic_output_bound: N must be positive");
  const double rho = prof.sup_w / prof.d_min;
  const double nn = static_cast<double>(n);
  std::vector<double> a_hat, a_n, c;
  for (const auto& L : layers) {
    const double psi2 = 16.0 * L.lip_psi * L.lip_psi;
    a_hat.push_back(psi2 * (1.0 + rho * rho * L.lip_phi * L.lip_phi));
    a_n.push_back(psi2 * (1.0 + nn * nn * rho * rho * L.lip_phi * L.lip_phi));
    c.push_back(psi2 * L.bias_phi * L.bias_phi + 16.0 * L.bias_psi * L.bias_psi);
  }
  DeterministicBound d;
  d.A_prime = solve_recurrence(a_hat, c, 0.0);
  d.A_dprime = 1.0;
  for (double v : a_hat) d.A_dprime *= v;
  d.value = solve_recurrence(a_n, c, sup_f * sup_f);
  d.envelope = std::pow(nn, 2.0 * static_cast<double>(layers.size())) *
               (d.A_prime + d.A_dprime * sup_f * sup_f);
  return d;
}

struct ExpectedBound {
  double leading = 0.0;
  double remainder = 0.0;
  double total = 0.0;
  double H_prime = 0.0;
  double H_dprime = 0.0;
  double N0 = 0.0;
};

// Leading sqrt(pi)(3T+1)(H' + H'')^2 / N plus the tail remainder exp(-N0^2) q(N),
// N0 = D1 + D2 sqrt(N) being the largest sqrt(log 2/p) allowed by the minimum-N
// condition at this N. For N0 < 1 the Gaussian tail estimate does not apply and
// the tail integral is bounded by sqrt(pi).
inline ExpectedBound expected_sq_bound(std::uint64_t n, const std::vector<LayerConstants>& layers,
                                       const RegularityProfile& prof, const SignalRegularity& sig,
                                       const BoundOptions& opt = {}) {
  detail::require_lipschitz(prof);
  detail::require_finite(sig);
  if (n == 0) throw std::invalid_argument("expected_sq_bound: N must be positive");
  const auto c = node_bound_constants(layers, prof, sig);
  const auto rec = signal_regularity_recursions(layers, prof, sig);
  const auto det = deterministic_output_bound(layers, prof, n, sig.sup_f);
  const double s = sig.sup_f, lf = sig.lip_f;
  const double t = static_cast<double>(layers.size());
  const double nn = static_cast<double>(n);
  ExpectedBound e;
  e.H_prime = c.C1p + c.C2p * s + c.C3p * lf;
  e.H_dprime = c.C1pp + c.C2pp * s + c.C3pp * lf +
               2.0 * std::numbers::sqrt2 * (rec.B_prime + s * rec.B_dprime);
  e.leading = std::sqrt(std::numbers::pi) * (3.0 * t + 1.0) * (e.H_prime + e.H_dprime) *
              (e.H_prime + e.H_dprime) / nn;
  const double denom = std::numbers::sqrt2 * prof.sup_w + prof.lip_w;
  const double n0_const = -prof.zeta * prof.lip_w * std::sqrt(prof.dim_chi) / denom;
  const double n0_slope = prof.d_min / (2.0 * denom);
  e.N0 = n0_const + n0_slope * std::sqrt(nn);
  const double exponent = 2.0 * t - (opt.remainder_exponent_2T ? 0.0 : 1.0);
  const double inner = det.A_prime + det.A_dprime * s * s + rec.B_prime + s * rec.B_dprime;
  const double q = std::pow(nn, exponent) * inner * inner;
  const double tail = e.N0 >= 1.0 ? std::exp(-e.N0 * e.N0) : std::sqrt(std::numbers::pi);
  e.remainder = q == 0.0 ? 0.0 : tail * q;
  e.total = e.leading + e.remainder;
  return e;
}

enum class NodeLawKind { Fixed, UniformRange, Categorical };

// Law of the node count of a sampled graph; finite support.
struct NodeLaw {
  NodeLawKind kind = NodeLawKind::Fixed;
  std::uint64_t fixed = 64;
  std::uint64_t lo = 0, hi = 0;
  std::vector<std::uint64_t> values;
  std::vector<double> probs;

  static NodeLaw fixed_at(std::uint64_t n) { return {NodeLawKind::Fixed, n, 0, 0, {}, {}}; }
  static NodeLaw uniform_range(std::uint64_t lo, std::uint64_t hi) {
    if (lo == 0 || hi < lo) throw std::invalid_argument("NodeLaw: need 1 <= lo <= hi");
    return {NodeLawKind::UniformRange, 0, lo, hi, {}, {}};
  }
  static NodeLaw categorical(std::vector<std::uint64_t> v, std::vector<double> p) {
    if (v.empty() || v.size() != p.size()) throw std::invalid_argument("NodeLaw: bad categorical law");
    double s = 0.0;
    for (double x : p) {
      if (!(x >= 0.0)) throw std::invalid_argument("NodeLaw: negative probability");
      s += x;
    }
    if (std::abs(s - 1.0) > 1e-9) throw std::invalid_argument("NodeLaw: probabilities must sum to 1");
    for (auto x : v)
      if (x == 0) throw std::invalid_argument("NodeLaw: node counts must be positive");
    return {NodeLawKind::Categorical, 0, 0, 0, std::move(v), std::move(p)};
  }

  std::vector<std::pair<std::uint64_t, double>> support() const {
    std::vector<std::pair<std::uint64_t, double>> out;
    switch (kind) {
      case NodeLawKind::Fixed:
        out.emplace_back(fixed, 1.0);
        break;
      case NodeLawKind::UniformRange: {
        const double w = 1.0 / static_cast<double>(hi - lo + 1);
        for (auto n = lo; n <= hi; ++n) out.emplace_back(n, w);
        break;
      }
      case NodeLawKind::Categorical:
        for (std::size_t i = 0; i < values.size(); ++i) out.emplace_back(values[i], probs[i]);
        break;
    }
    return out;
  }

  template <class F>
  double expectation(F&& f) const {
    double e = 0.0;
    for (const auto& [n, w] : support()) e += w * f(n);
    return e;
  }
};

struct ClassSpec {
  Kernel kernel;
  Signal signal;
  double gamma = 1.0;
};

struct ClassDistribution {
  std::vector<ClassSpec> classes;
  NodeLaw node_law;
  MetricMeasureSpace space = MetricMeasureSpace::unit_square();

  std::size_t class_count() const noexcept { return classes.size(); }

  void validate() const {
    if (classes.empty()) throw std::invalid_argument("ClassDistribution: no classes");
    double s = 0.0;
    for (const auto& c : classes) {
      if (!(c.gamma >= 0.0)) throw std::invalid_argument("ClassDistribution: negative class probability");
      s += c.gamma;
    }
    if (std::abs(s - 1.0) > 1e-9) throw std::invalid_argument("ClassDistribution: class probabilities must sum to 1");
  }
};

// Graphs per class for a training set of size m; each gamma_j m must be an integer.
inline std::vector<std::size_t> class_counts(const ClassDistribution& dist, std::size_t m) {
  dist.validate();
  std::vector<std::size_t> counts;
  for (const auto& c : dist.classes) {
    const double x = c.gamma * static_cast<double>(m);
    const double r = std::round(x);
    if (std::abs(x - r) > 1e-9)
      throw RepresentativenessError("training set of size " + std::to_string(m) +
                                    " cannot hold gamma_j * m graphs of every class");
    counts.push_back(static_cast<std::size_t>(r));
  }
  return counts;
}

struct GeneralizationBound {
  double C = 0.0;
  double regularity_factor = 0.0;  // (1 + max ||f^j|| + max L_{f^j})^2
  double expected_inv_n = 0.0;
  double leading = 0.0;
  double remainder = 0.0;
  double total = 0.0;
};

// Gamma sqrt(pi) L_V^2 (3T+1) C (1 + max||f|| + max L_f)^2 E[1/N] plus
// Gamma L_V^2 E[max_j R_j(N)], where R_j is the per-class remainder of expected_sq_bound.
inline GeneralizationBound generalization_bound(const ClassDistribution& dist,
                                                const std::vector<LayerConstants>& layers,
                                                const std::vector<RegularityProfile>& profiles,
                                                const std::vector<SignalRegularity>& sigs,
                                                std::size_t m, double loss_lipschitz,
                                                const BoundOptions& opt = {}) {
  class_counts(dist, m);
  const std::size_t g = dist.class_count();
  if (profiles.size() != g || sigs.size() != g)
    throw std::invalid_argument("generalization_bound: need one profile and signal per class");
  double cmax = 0.0, smax = 0.0, lmax = 0.0;
  for (std::size_t j = 0; j < g; ++j) {
    const auto c = node_bound_constants(layers, profiles[j], sigs[j]);
    const auto rec = signal_regularity_recursions(layers, profiles[j], sigs[j]);
    cmax = std::max(cmax, c.C1 + c.C2 + c.C3 + rec.B_prime + rec.B_dprime);
    smax = std::max(smax, sigs[j].sup_f);
    lmax = std::max(lmax, sigs[j].lip_f);
  }
  GeneralizationBound b;
  const double gamma = static_cast<double>(g);
  const double t = static_cast<double>(layers.size());
  const double lv2 = loss_lipschitz * loss_lipschitz;
  b.C = 8.0 * cmax * cmax;
  b.regularity_factor = (1.0 + smax + lmax) * (1.0 + smax + lmax);
  b.expected_inv_n = dist.node_law.expectation([](std::uint64_t n) { return 1.0 / static_cast<double>(n); });
  b.leading = gamma * std::sqrt(std::numbers::pi) * lv2 * (3.0 * t + 1.0) * b.C *
              b.regularity_factor * b.expected_inv_n;
  b.remainder = gamma * lv2 * dist.node_law.expectation([&](std::uint64_t n) {
    double r = 0.0;
    for (std::size_t j = 0; j < g; ++j)
      r = std::max(r, expected_sq_bound(n, layers, profiles[j], sigs[j], opt).remainder);
    return r;
  });
  b.total = b.leading + b.remainder;
  return b;
}

struct LayerReport {
  double sup_in = 0.0, lip_in = 0.0;
  double lambda_tilde = 0.0, eps_w = 0.0, D = 0.0, K = 0.0;
  double D1 = 0.0, D2 = 0.0, Z1 = 0.0, Z2 = 0.0, Z3 = 0.0;
};

// Every constant of the stability bounds for one setup at one p.
struct BoundReport {
  RegularityProfile profile;
  SignalRegularity signal;
  double p = 0.0;
  std::size_t T = 0;
  double eps_d = 0.0;
  std::vector<LayerReport> layers;
  double B_prime = 0.0, B_dprime = 0.0, lip_out = 0.0;
  NodeConstants node;
  PooledConstants pooled;
  double A_prime = 0.0, A_dprime = 0.0;
  std::uint64_t min_n = 0;
  double node_coefficient = 0.0;    // sqrt(N) * node-level bound
  double pooled_coefficient = 0.0;  // sqrt(N) * pooled bound
  double failure_node = 0.0;        // 3T
  double failure_pooled = 0.0;      // 3T + 1
  double failure_two_graph = 0.0;   // 2(3T + 1)
};

inline BoundReport bound_report(const std::vector<LayerConstants>& layers, const RegularityProfile& prof,
                                const SignalRegularity& sig, double p) {
  BoundReport r;
  r.profile = prof;
  r.signal = sig;
  r.p = p;
  r.T = layers.size();
  r.eps_d = epsilon_d(prof, p);
  const auto rec = signal_regularity_recursions(layers, prof, sig);
  for (std::size_t l = 0; l < layers.size(); ++l) {
    LayerReport lr;
    lr.sup_in = rec.sup_bound[l];
    lr.lip_in = rec.lip_bound[l];
    const SignalRegularity in{lr.sup_in, lr.lip_in};
    lr.lambda_tilde = lambda_tilde(layers[l], in, prof);
    lr.eps_w = epsilon_w(layers[l], in, prof, p);
    lr.D = layer_error_D(layers[l], in, prof, p);
    lr.K = layer_factor_K(layers[l], prof);
    lr.D1 = rec.D1[l];
    lr.D2 = rec.D2[l];
    lr.Z1 = rec.Z1[l];
    lr.Z2 = rec.Z2[l];
    lr.Z3 = rec.Z3[l];
    r.layers.push_back(lr);
  }
  r.B_prime = rec.B_prime;
  r.B_dprime = rec.B_dprime;
  r.lip_out = rec.lip_out;
  r.node = node_bound_constants(layers, prof, sig);
  r.pooled = pooled_bound_constants(layers, prof, sig);
  const auto det = deterministic_output_bound(layers, prof, 1, sig.sup_f);
  r.A_prime = det.A_prime;
  r.A_dprime = det.A_dprime;
  r.min_n = min_nodes(prof, p);
  const auto [node, pool] = detail::scaled_coefficients(layers, prof, sig, p);
  r.node_coefficient = node;
  r.pooled_coefficient = pool;
  const double t = static_cast<double>(r.T);
  r.failure_node = 3.0 * t;
  r.failure_pooled = 3.0 * t + 1.0;
  r.failure_two_graph = 2.0 * (3.0 * t + 1.0);
  return r;
}

}  // namespace mpnn_lab
