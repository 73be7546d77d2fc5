#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "mpnn_lab/bounds.hpp"
#include "mpnn_lab/experiments.hpp"
#include "mpnn_lab/graph.hpp"
#include "mpnn_lab/kernel.hpp"
#include "mpnn_lab/mlp.hpp"
#include "mpnn_lab/mpnn.hpp"

namespace mpnn_lab {

using json = nlohmann::json;

// Shortest text that round-trips the double; "inf", "-inf", "nan" otherwise.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Doubles as JSON; non-finite values become strings so the file stays valid JSON.
inline json json_number(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

inline double number_from_json(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw std::invalid_argument("expected a number, got " + j.dump());
}

// Writes to a sibling temporary file and renames it into place.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw std::runtime_error("failed writing " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

// ------------------------------------------------------------------------ CSV

inline std::string convergence_csv(const ConvergenceResult& res) {
  std::ostringstream os;
  os << "r,signal,trial,n,dist_node,dist_pooled\n";
  for (const auto& rec : res.records)
    os << format_double(rec.r) << ',' << rec.signal << ',' << rec.trial << ',' << rec.n << ','
       << format_double(rec.dist_node) << ',' << format_double(rec.dist_pooled) << '\n';
  return os.str();
}

// One row per curve and level; curves with too few fit points are skipped.
inline std::string slopes_csv(const ConvergenceResult& res) {
  std::ostringstream os;
  os << "r,signal,level,slope,intercept,residual\n";
  const auto row = [&](const ConvergenceCurve& c, const char* level, const LogLogFit& f) {
    os << format_double(c.r) << ',' << c.signal << ',' << level << ',' << format_double(f.slope) << ','
       << format_double(f.intercept) << ',' << format_double(f.residual) << '\n';
  };
  for (const auto& c : res.curves) {
    if (c.fit_node) row(c, "node", *c.fit_node);
    if (c.fit_pooled) row(c, "pooled", *c.fit_pooled);
  }
  return os.str();
}

inline std::string gap_csv(const GapResult& res) {
  std::ostringstream os;
  os << "trial,m,r_emp,r_exp,sq_gap,bound\n";
  for (const auto& r : res.records)
    os << r.trial << ',' << r.m << ',' << format_double(r.r_emp) << ',' << format_double(r.r_exp) << ','
       << format_double(r.sq_gap) << ',' << format_double(r.bound) << '\n';
  return os.str();
}

inline std::string stability_csv(const StabilityResult& res, std::size_t n, std::size_t n_prime) {
  std::ostringstream os;
  os << "trial,n,n_prime,dist_pooled\n";
  for (std::size_t t = 0; t < res.distances.size(); ++t)
    os << t << ',' << n << ',' << n_prime << ',' << format_double(res.distances[t]) << '\n';
  return os.str();
}

// ------------------------------------------------------------------------ SVG

// Log-log plot of the node-level mean error curves with their fitted lines.
inline std::string convergence_svg(const ConvergenceResult& res, const std::string& title = "node-level error") {
  constexpr double W = 800, H = 600, left = 80, right = 220, top = 50, bottom = 70;
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& c : res.curves)
    for (std::size_t k = 0; k < c.sizes.size(); ++k) {
      if (!(c.mean_node[k] > 0.0)) continue;
      const double lx = std::log2(static_cast<double>(c.sizes[k]));
      const double ly = std::log2(c.mean_node[k]);
      x0 = std::min(x0, lx);
      x1 = std::max(x1, lx);
      y0 = std::min(y0, ly);
      y1 = std::max(y1, ly);
    }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = -1, y1 = 0;
  x0 = std::floor(x0), x1 = std::ceil(x1), y0 = std::floor(y0), y1 = std::ceil(y1);
  if (x1 <= x0) x1 = x0 + 1;
  if (y1 <= y0) y1 = y0 + 1;
  const double pw = W - left - right, ph = H - top - bottom;
  const auto px = [&](double lx) { return left + (lx - x0) / (x1 - x0) * pw; };
  const auto py = [&](double ly) { return top + (y1 - ly) / (y1 - y0) * ph; };
  const auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return std::string(buf);
  };
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\" viewBox=\"0 0 800 600\">\n";
  os << "<rect width=\"800\" height=\"600\" fill=\"white\"/>\n";
  os << "<text x=\"" << num(left + pw / 2) << "\" y=\"30\" text-anchor=\"middle\" font-size=\"16\">" << title
     << "</text>\n";
  os << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(pw) << "\" height=\"" << num(ph)
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double t = x0; t <= x1; t += 1.0)
    os << "<text x=\"" << num(px(t)) << "\" y=\"" << num(top + ph + 20) << "\" text-anchor=\"middle\" font-size=\"12\">"
       << static_cast<long>(t) << "</text>\n";
  const double ystep = std::max(1.0, std::ceil((y1 - y0) / 10.0));
  for (double t = y0; t <= y1; t += ystep)
    os << "<text x=\"" << num(left - 8) << "\" y=\"" << num(py(t) + 4) << "\" text-anchor=\"end\" font-size=\"12\">"
       << static_cast<long>(t) << "</text>\n";
  os << "<text x=\"" << num(left + pw / 2) << "\" y=\"" << num(H - 25)
     << "\" text-anchor=\"middle\" font-size=\"14\">log2 N</text>\n";
  os << "<text x=\"20\" y=\"" << num(top + ph / 2) << "\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 20 "
     << num(top + ph / 2) << ")\">log2 error</text>\n";
  std::size_t ci = 0;
  for (const auto& c : res.curves) {
    const char* color = palette[ci % 10];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    bool first = true;
    for (std::size_t k = 0; k < c.sizes.size(); ++k) {
      if (!(c.mean_node[k] > 0.0)) continue;
      if (!first) os << ' ';
      first = false;
      os << num(px(std::log2(static_cast<double>(c.sizes[k])))) << ',' << num(py(std::log2(c.mean_node[k])));
    }
    os << "\"/>\n";
    std::string label = "r=" + num(c.r) + " " + c.signal;
    if (c.fit_node) {
      const auto& f = *c.fit_node;
      double a = x1, b = x0;
      for (std::size_t k = 0; k < c.sizes.size(); ++k) {
        const double lx = std::log2(static_cast<double>(c.sizes[k]));
        a = std::min(a, lx);
        b = std::max(b, lx);
      }
      os << "<line x1=\"" << num(px(a)) << "\" y1=\"" << num(py(f.intercept + f.slope * a)) << "\" x2=\"" << num(px(b))
         << "\" y2=\"" << num(py(f.intercept + f.slope * b)) << "\" stroke=\"" << color
         << "\" stroke-dasharray=\"6,4\"/>\n";
      label += " slope " + num(f.slope);
    }
    const double ly = top + 20 + 20 * static_cast<double>(ci);
    os << "<line x1=\"" << num(W - right + 15) << "\" y1=\"" << num(ly) << "\" x2=\"" << num(W - right + 40)
       << "\" y2=\"" << num(ly) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << num(W - right + 45) << "\" y=\"" << num(ly + 4) << "\" font-size=\"12\">" << label
       << "</text>\n";
    ++ci;
  }
  os << "</svg>\n";
  return os.str();
}

// ----------------------------------------------------------------------- JSON

inline json to_json(const Kernel& k) {
  switch (k.kind) {
    case KernelKind::Constant:
      return {{"kind", "constant"}, {"c", k.c}};
    case KernelKind::BallIndicator:
      return {{"kind", "ball_indicator"}, {"r", k.r}};
    case KernelKind::SmoothedBall:
      return {{"kind", "smoothed_ball"}, {"r", k.r}, {"delta", k.delta}};
  }
  return {};
}

inline Kernel kernel_from_json(const json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "constant") return Kernel::constant(j.value("c", 1.0));
  if (kind == "ball_indicator" || kind == "ball") return Kernel::ball_indicator(j.at("r").get<double>());
  if (kind == "smoothed_ball") return Kernel::smoothed_ball(j.at("r").get<double>(), j.at("delta").get<double>());
  throw std::invalid_argument("unknown kernel kind '" + kind + "'");
}

inline json to_json(const RegularityProfile& p) {
  return {{"sup_w", json_number(p.sup_w)}, {"lip_w", json_number(p.lip_w)}, {"d_min", json_number(p.d_min)},
          {"dim", json_number(p.dim_chi)},  {"zeta", json_number(p.zeta)},   {"dudley_c", json_number(p.dudley_c)}};
}

inline json to_json(const MLPSpec& m) {
  json layers = json::array();
  for (const auto& l : m.layers()) {
    json w = json::array();
    for (Eigen::Index i = 0; i < l.weight.rows(); ++i) {
      json row = json::array();
      for (Eigen::Index k = 0; k < l.weight.cols(); ++k) row.push_back(l.weight(i, k));
      w.push_back(std::move(row));
    }
    json b = json::array();
    for (Eigen::Index i = 0; i < l.bias.size(); ++i) b.push_back(l.bias[i]);
    layers.push_back({{"weight", std::move(w)}, {"bias", std::move(b)}, {"activation", to_string(l.activation)}});
  }
  return {{"layers", std::move(layers)}};
}

inline MLPSpec mlp_from_json(const json& j) {
  std::vector<DenseLayer> layers;
  for (const auto& lj : j.at("layers")) {
    const auto& w = lj.at("weight");
    const auto rows = static_cast<Eigen::Index>(w.size());
    const auto cols = rows == 0 ? Eigen::Index{0} : static_cast<Eigen::Index>(w.at(0).size());
    DenseLayer l;
    l.weight.resize(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
      const auto& row = w.at(static_cast<std::size_t>(i));
      if (static_cast<Eigen::Index>(row.size()) != cols) throw std::invalid_argument("MLP weight rows differ in length");
      for (Eigen::Index k = 0; k < cols; ++k) l.weight(i, k) = row.at(static_cast<std::size_t>(k)).get<double>();
    }
    const auto& b = lj.at("bias");
    l.bias.resize(static_cast<Eigen::Index>(b.size()));
    for (std::size_t i = 0; i < b.size(); ++i) l.bias[static_cast<Eigen::Index>(i)] = b[i].get<double>();
    l.activation = parse_activation(lj.value("activation", std::string("identity")));
    layers.push_back(std::move(l));
  }
  return MLPSpec(std::move(layers));
}

inline json to_json(const MPNNSpec& net) {
  json layers = json::array();
  for (const auto& l : net.layers()) layers.push_back({{"phi", to_json(l.phi)}, {"psi", to_json(l.psi)}});
  return {{"layers", std::move(layers)}};
}

inline MPNNSpec mpnn_from_json(const json& j) {
  std::vector<MPNNLayer> layers;
  for (const auto& lj : j.at("layers")) layers.push_back({mlp_from_json(lj.at("phi")), mlp_from_json(lj.at("psi"))});
  return MPNNSpec(std::move(layers));
}

inline json to_json(const LayerConstants& c) {
  return {{"lip_phi", c.lip_phi}, {"lip_psi", c.lip_psi}, {"bias_phi", c.bias_phi}, {"bias_psi", c.bias_psi}};
}

inline LayerConstants layer_constants_from_json(const json& j) {
  return {j.at("lip_phi").get<double>(), j.at("lip_psi").get<double>(), j.value("bias_phi", 0.0),
          j.value("bias_psi", 0.0)};
}

// Nodes, features and degrees; the weighted edge list (i <= j) is included
// up to max_edges_n nodes.
inline json to_json(const SampledGraph& g, std::size_t max_edges_n = 2048) {
  json j;
  j["n"] = g.size();
  j["kernel"] = to_json(g.kernel());
  j["storage"] = g.storage() == WeightStorage::Dense ? "dense" : "implicit";
  json nodes = json::array();
  for (const auto& p : g.nodes()) {
    json c = json::array();
    for (std::size_t i = 0; i < p.size(); ++i) c.push_back(p[i]);
    nodes.push_back(std::move(c));
  }
  j["nodes"] = std::move(nodes);
  json feats = json::array();
  for (Eigen::Index i = 0; i < g.features().rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < g.features().cols(); ++k) row.push_back(g.features()(i, k));
    feats.push_back(std::move(row));
  }
  j["features"] = std::move(feats);
  json deg = json::array();
  for (Eigen::Index i = 0; i < g.degrees().size(); ++i) deg.push_back(g.degrees()[i]);
  j["degrees"] = std::move(deg);
  if (g.size() <= max_edges_n) {
    json edges = json::array();
    for (std::size_t i = 0; i < g.size(); ++i)
      g.for_each_neighbor(i, [&](std::size_t k, double w) {
        if (k >= i) edges.push_back(json::array({i, k, w}));
      });
    j["edges"] = std::move(edges);
  } else {
    j["edges"] = nullptr;
  }
  return j;
}

inline json to_json(const BoundValue& b) {
  return {{"value", json_number(b.value)}, {"confidence", json_number(b.confidence)}};
}

inline json to_json(const BoundReport& r) {
  json layers = json::array();
  for (const auto& l : r.layers)
    layers.push_back({{"sup_in", json_number(l.sup_in)},
                      {"lip_in", json_number(l.lip_in)},
                      {"lambda_tilde", json_number(l.lambda_tilde)},
                      {"eps_w", json_number(l.eps_w)},
                      {"D", json_number(l.D)},
                      {"K", json_number(l.K)},
                      {"D1", json_number(l.D1)},
                      {"D2", json_number(l.D2)},
                      {"Z1", json_number(l.Z1)},
                      {"Z2", json_number(l.Z2)},
                      {"Z3", json_number(l.Z3)}});
  json j;
  j["profile"] = to_json(r.profile);
  j["signal"] = {{"sup_f", json_number(r.signal.sup_f)}, {"lip_f", json_number(r.signal.lip_f)}};
  j["p"] = r.p;
  j["T"] = r.T;
  j["eps_d"] = json_number(r.eps_d);
  j["layers"] = std::move(layers);
  j["B_prime"] = json_number(r.B_prime);
  j["B_dprime"] = json_number(r.B_dprime);
  j["lip_out"] = json_number(r.lip_out);
  j["node_constants"] = {{"C1_prime", json_number(r.node.C1p)},   {"C2_prime", json_number(r.node.C2p)},
                         {"C3_prime", json_number(r.node.C3p)},   {"C1_dprime", json_number(r.node.C1pp)},
                         {"C2_dprime", json_number(r.node.C2pp)}, {"C3_dprime", json_number(r.node.C3pp)},
                         {"C1", json_number(r.node.C1)},          {"C2", json_number(r.node.C2)},
                         {"C3", json_number(r.node.C3)}};
  j["pooled_constants"] = {{"B1", json_number(r.pooled.B1)},
                           {"B2", json_number(r.pooled.B2)},
                           {"B3", json_number(r.pooled.B3)},
                           {"pool_const", json_number(r.pooled.pool_const)},
                           {"pool_sup", json_number(r.pooled.pool_sup)}};
  j["A_prime"] = json_number(r.A_prime);
  j["A_dprime"] = json_number(r.A_dprime);
  j["min_nodes"] = r.min_n;
  j["node_coefficient"] = json_number(r.node_coefficient);
  j["pooled_coefficient"] = json_number(r.pooled_coefficient);
  j["failure_multiplier"] = {{"node", r.failure_node}, {"pooled", r.failure_pooled}, {"two_graph", r.failure_two_graph}};
  return j;
}

inline json to_json(const GeneralizationBound& b) {
  return {{"C", json_number(b.C)},
          {"regularity_factor", json_number(b.regularity_factor)},
          {"expected_inv_n", json_number(b.expected_inv_n)},
          {"leading", json_number(b.leading)},
          {"remainder", json_number(b.remainder)},
          {"total", json_number(b.total)}};
}

inline json to_json(const TwoGraphBoundValue& b) {
  return {{"value", json_number(b.value)},
          {"confidence_printed", json_number(b.confidence_printed)},
          {"confidence_corrected", json_number(b.confidence_corrected)}};
}

}  // namespace mpnn_lab
