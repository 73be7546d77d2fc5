// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance                 run every criterion
//   acceptance --criterion 5   run one criterion
//
// Exit status is 0 when every criterion that ran passed.

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mpnn_lab/mpnn_lab.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;
using namespace mpnn_lab;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

// Desk profile shared by criteria 1-3: BallIndicator, 2-layer GraphSAGE of width 16,
// reference 2^12, sizes 2^5..2^11, 10 trials.
ConvergenceConfig desk_convergence() {
  ConvergenceConfig c;
  c.kernel_kind = KernelKind::BallIndicator;
  c.reference_n = std::size_t{1} << 12;
  c.sizes = powers_of_two(5, 11);
  c.trials = 10;
  c.mpnn = MPNNConfig{16, 2, 16, 1.0, 1};
  c.fit_min_size = 32;
  c.seed = 0;
  return c;
}

Outcome criterion_1() {
  auto cfg = desk_convergence();
  cfg.radii = {0.5};
  cfg.signals = {"product"};
  const auto res = run_convergence(cfg);
  const auto& c = res.curve(0.5, "product");
  if (!c.fit_node) return {false, "no slope could be fitted"};
  const double s = c.fit_node->slope;
  return {s >= -1.2 && s <= -0.40, "node-level slope " + fmt(s) + " (required in [-1.2, -0.40]), residual " +
                                       fmt(c.fit_node->residual)};
}

// Pass condition is on the product signal. The other two protocol signals are
// reported alongside since the radius effect is much stronger for them.
Outcome criterion_2() {
  const std::vector<std::string> signals{"product", "bandlimited", "noise"};
  std::vector<int> wins(signals.size(), 0);
  std::string values;
  for (std::uint64_t rep = 0; rep < 10; ++rep) {
    auto cfg = desk_convergence();
    cfg.radii = {0.1, 0.9};
    cfg.signals = signals;
    cfg.sizes = {256};
    cfg.fit_min_size = 256;
    cfg.seed = rep;
    const auto res = run_convergence(cfg);
    for (std::size_t s = 0; s < signals.size(); ++s) {
      const double small = res.curve(0.1, signals[s]).mean_node.at(0);
      const double large = res.curve(0.9, signals[s]).mean_node.at(0);
      wins[s] += small > large;
      if (s == 0) values += (rep ? " " : "") + fmt(small, 3) + "/" + fmt(large, 3);
    }
  }
  return {wins[0] >= 9, std::to_string(wins[0]) + "/10 repeats with err(r=0.1) > err(r=0.9) at n=256 for product [r=0.1/r=0.9: " +
                            values + "]; bandlimited " + std::to_string(wins[1]) + "/10, noise " +
                            std::to_string(wins[2]) + "/10"};
}

Outcome criterion_3() {
  auto cfg = desk_convergence();
  cfg.radii = {0.5};
  cfg.signals = {"product", "noise"};
  const auto res = run_convergence(cfg);
  const auto& prod = res.curve(0.5, "product");
  const auto& noise = res.curve(0.5, "noise");
  if (!noise.fit_node) return {false, "no slope could be fitted for the noise signal"};
  bool above = prod.sizes == noise.sizes;
  double min_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; above && i < noise.sizes.size(); ++i) {
    above = noise.mean_node[i] > prod.mean_node[i];
    min_ratio = std::min(min_ratio, noise.mean_node[i] / prod.mean_node[i]);
  }
  const double s = noise.fit_node->slope;
  return {s < 0.0 && above, "noise slope " + fmt(s) + ", noise curve above product at every n: " +
                                (above ? "yes" : "no") + " (smallest ratio " + fmt(min_ratio, 3) + ")"};
}

Outcome criterion_4() {
  Rng rng(20240);
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const auto net = fixtures::random_mpnn({2, 4, 3}, t % 2 == 0, rng);
    const Eigen::MatrixXd w = fixtures::random_weights(6, rng);
    const Matrix f = fixtures::random_features(6, 2, rng);
    worst = std::max(worst, sup_norm(gmpnn_forward(net, w, f) - fixtures::naive_gmpnn(net, w, f)));
  }
  return {worst <= 1e-12, "largest sup-norm difference over 20 graphs " + fmt(worst)};
}

// At N = max(min_nodes(0.01), 2^10) the graph is far too large to realize, so
// each trial draws the multinomial cell counts of N uniform nodes on a 32 x 32
// grid and encloses the pooled output of every graph with those counts. The
// certified distance to the 2^12-node proxy bounds the measured one.
Outcome criterion_5() {
  const Kernel k = Kernel::smoothed_ball(0.3, 0.05);
  const Signal s = product_signal();
  const auto net = mean_aggregation_net(1);
  const auto layers = layer_constants(net);
  if (layers[0].lip_phi != 1.0 || layers[0].lip_psi != 1.0) return {false, "network constants are not 1"};
  const double p = 0.01;
  const auto prof = regularity_profile(k, MetricMeasureSpace::unit_square(), 1.0);
  const std::uint64_t n = std::max<std::uint64_t>(min_nodes(prof, p), 1024);
  const double bound = pooled_bound(n, p, layers, prof, regularity_of(s)).value;
  const std::size_t grid = 32;
  int ok = 0;
  double worst = 0.0, widest = 0.0;
  for (std::size_t t = 0; t < 200; ++t) {
    const std::uint64_t ts = trial_seed(5, t);
    const auto proxy = sample_graph({k, s}, std::size_t{1} << 12, derive_seed(ts, 1));
    const double ref = global_pool(gmpnn_forward(net, proxy))[0];
    const auto e = certified_mean_pool(k, s, uniform_cell_counts(n, grid, derive_seed(ts, 0)), grid);
    const double dist = std::max(std::abs(e.hi - ref), std::abs(ref - e.lo));
    worst = std::max(worst, dist);
    widest = std::max(widest, e.hi - e.lo);
    ok += dist <= bound;
  }
  return {ok == 200, std::to_string(ok) + "/200 trials within the pooled bound " + fmt(bound) + " at N=" +
                         std::to_string(n) + "; largest certified distance " + fmt(worst) +
                         ", widest enclosure " + fmt(widest)};
}

Outcome criterion_6() {
  const auto prof = regularity_profile(Kernel::smoothed_ball(0.3, 0.05), MetricMeasureSpace::unit_square(), 1.0);
  Rng rng(6);
  double closed_err = 0.0;
  for (int t = 0; t < 50; ++t) {
    std::vector<LayerConstants> layers;
    for (int l = 0; l < 4; ++l)
      layers.push_back({rng.uniform(0.1, 2.0), rng.uniform(0.1, 2.0), rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0)});
    const SignalRegularity sig{rng.uniform(0.1, 2.0), rng.uniform(0.0, 2.0)};
    const auto rec = signal_regularity_recursions(layers, prof, sig);
    double eta = sig.sup_f, prod = 1.0, affine = 0.0;
    for (const auto& L : layers) {
      const double a = L.lip_psi * (1.0 + 2.0 * (prof.sup_w / prof.d_min) * L.lip_phi);
      const double c = L.lip_psi * (prof.sup_w / prof.d_min) * L.bias_phi + L.bias_psi;
      eta = a * eta + c;
      affine = a * affine + c;
      prod *= a;
    }
    closed_err = std::max({closed_err, std::abs(rec.B_prime - affine) / std::max(1.0, affine),
                           std::abs(rec.B_dprime - prod) / std::max(1.0, prod),
                           std::abs(rec.B_prime + rec.B_dprime * sig.sup_f - eta) / std::max(1.0, eta)});
  }
  bool unrolled = true;
  for (int t = 0; t < 50; ++t) {
    const std::vector<double> a{rng.uniform(0.0, 3.0), rng.uniform(0.0, 3.0), rng.uniform(0.0, 3.0)};
    const std::vector<double> b{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    const double e0 = rng.uniform(-1.0, 1.0);
    const double manual = a[2] * (a[1] * (a[0] * e0 + b[0]) + b[1]) + b[2];
    const double closed = solve_recurrence(a, b, e0);
    unrolled = unrolled && std::abs(manual - closed) <= 1e-12 * (1.0 + std::abs(manual));
  }
  const bool seven = solve_recurrence({2, 2, 2}, {1, 1, 1}, 0.0) == 7.0;

  RegularityProfile w;
  w.sup_w = 1.0;
  w.lip_w = 0.0;
  w.d_min = 1.0;
  w.dim_chi = 2.0;
  w.zeta = 1.0;
  const double pw = 2.0 / std::numbers::e;
  const LayerConstants L{1.0, 1.0, 0.0, 0.0};
  const SignalRegularity sig{1.0, 0.0};
  const double r2 = std::numbers::sqrt2;
  const double worked_err = std::max({std::abs(epsilon_d(w, pw) - r2), std::abs(epsilon_w(L, sig, w, pw) - 2.0 * r2),
                                      std::abs(layer_error_D(L, sig, w, pw) - 10.0 * r2),
                                      std::abs(layer_factor_K(L, w) - 3.0)});
  const bool pass = closed_err <= 1e-12 && unrolled && seven && worked_err <= 1e-12;
  return {pass, "closed-form relative error " + fmt(closed_err) + ", recurrence unrolling " +
                    (unrolled && seven ? "matches" : "differs") + ", worked-value error " + fmt(worked_err)};
}

Outcome criterion_7() {
  const ClassDistribution base{{{Kernel::smoothed_ball(0.15, 0.03), product_signal(), 0.5},
                                {Kernel::smoothed_ball(0.3, 0.05), sum_signal(), 0.5}},
                               NodeLaw::fixed_at(64)};
  const auto net = graphsage_random({1, 16, 2}, 1);
  int shrinks = 0;
  bool dominated = true;
  double max_ratio = 0.0;
  std::string pairs;
  for (std::uint64_t rep = 0; rep < 10; ++rep) {
    double mean[2] = {0.0, 0.0};
    const std::uint64_t sizes[2] = {64, 512};
    for (int i = 0; i < 2; ++i) {
      GapConfig cfg;
      cfg.dist = base;
      cfg.dist.node_law = NodeLaw::fixed_at(sizes[i]);
      cfg.m = 20;
      cfg.trials = 10;
      cfg.mc_size = 200;
      cfg.seed = rep;
      cfg.net = net;
      const auto res = run_generalization(cfg);
      mean[i] = res.mean_sq_gap;
      if (!res.bound) return {false, "bound unavailable: " + res.bound_status};
      for (const auto& r : res.records) {
        dominated = dominated && r.sq_gap <= res.bound->total;
        max_ratio = std::max(max_ratio, r.sq_gap / res.bound->total);
      }
    }
    shrinks += mean[1] < mean[0];
    pairs += (rep ? " " : "") + fmt(mean[1], 3) + "/" + fmt(mean[0], 3);
  }
  return {shrinks >= 8 && dominated,
          std::to_string(shrinks) + "/10 repeats with gap(N=512) < gap(N=64) [N=512/N=64: " + pairs +
              "]; bound dominates every squared gap: " + (dominated ? "yes" : "no") + " (largest gap/bound " +
              fmt(max_ratio, 3) + ")"};
}

// Degrees at N = min_nodes(0.05) certified from the multinomial cell counts of
// the N nodes on a 64 x 64 grid; a certified value >= d_min / 2 implies the
// realized minimum degree is too.
Outcome criterion_8() {
  const Kernel k = Kernel::smoothed_ball(0.3, 0.05);
  const auto prof = regularity_profile(k, MetricMeasureSpace::unit_square(), 1.0);
  const std::uint64_t n = min_nodes(prof, 0.05);
  const std::size_t grid = 64;
  int ok = 0;
  double lowest = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < 200; ++t) {
    const double cert = certified_min_degree(k, uniform_cell_counts(n, grid, trial_seed(8, t)), grid);
    lowest = std::min(lowest, cert);
    ok += cert >= prof.d_min / 2.0;
  }
  return {ok >= 190, std::to_string(ok) + "/200 trials with certified min degree >= d_min/2 = " +
                         fmt(prof.d_min / 2.0) + " at N=" + std::to_string(n) + "; lowest certificate " +
                         fmt(lowest)};
}

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string("'") + MPNN_LAB_CLI_PATH + "' " + args + " > '" + log.string() + "' 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome criterion_9() {
  const fs::path root = fs::temp_directory_path() / "mpnn_lab_acceptance_9";
  fs::remove_all(root);
  fs::create_directories(root);
  const std::string configs = MPNN_LAB_CONFIG_DIR;
  struct Case {
    std::string command, config;
    std::vector<std::string> csvs;
  };
  const std::vector<Case> cases{{"convergence", "convergence_smoke.json", {"convergence.csv", "slopes.csv"}},
                                {"stability", "stability_smoke.json", {"stability.csv"}},
                                {"generalization", "generalization_smoke.json", {"gap.csv"}}};
  std::string detail;
  bool pass = true;
  for (const auto& c : cases) {
    const auto first = root / (c.command + "_first");
    const auto again = root / (c.command + "_again");
    const int a = run_cli(c.command + " --config '" + configs + "/" + c.config + "' --out '" + first.string() + "'",
                          root / "log.txt");
    const int b = run_cli(c.command + " --config '" + (first / "manifest.json").string() + "' --out '" +
                              again.string() + "'",
                          root / "log.txt");
    bool same = a == 0 && b == 0;
    for (const auto& f : c.csvs) {
      const auto x = slurp(first / f), y = slurp(again / f);
      same = same && !x.empty() && x == y;
    }
    pass = pass && same;
    detail += (detail.empty() ? "" : ", ") + c.command + (same ? " identical" : " DIFFERS");
  }
  fs::remove_all(root);
  return {pass, detail};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mpnn-lab acceptance suite"};
  int only = 0;
  app.add_option("--criterion", only, "run a single criterion (1-9)")->check(CLI::Range(1, 9));
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"convergence rate of the product signal", criterion_1},
      {"error decreases with the radius", criterion_2},
      {"noise signal converges more slowly", criterion_3},
      {"gMPNN matches the naive oracle", criterion_4},
      {"pooled stability bound is sound", criterion_5},
      {"constant chain is self-consistent", criterion_6},
      {"generalization gap trend and bound", criterion_7},
      {"degree concentration", criterion_8},
      {"manifest reruns are byte-identical", criterion_9}};

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (only != 0 && static_cast<std::size_t>(only) != i + 1) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << ": " << criteria[i].first << " -- "
              << o.detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
