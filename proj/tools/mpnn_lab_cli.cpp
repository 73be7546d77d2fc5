// mpnn-lab: command-line front end for the experiments.
//
// Exit codes: 0 success, 2 configuration or schema error, 3 precondition
// violation (for example N below the minimum-N condition of a requested bound),
// 1 anything else.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "mpnn_lab/mpnn_lab.hpp"

namespace fs = std::filesystem;
using namespace mpnn_lab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitPrecondition = 3;

struct Options {
  std::string config;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  bool json_summary = false;
  std::string schema;
};

struct Failure {
  int code;
  std::string message;
};

using Artifacts = std::map<std::string, std::string>;

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{kExitConfig, path + ": cannot read file"};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::pair<std::size_t, std::size_t> line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

json parse_document(const std::string& path) {
  const std::string text = read_text(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_col(text, e.byte);
    throw Failure{kExitConfig, path + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + e.what()};
  }
}

std::string report_text(const SchemaReport& rep) {
  std::string s;
  for (const auto& e : rep.errors) s += "error: " + e + "\n";
  for (const auto& w : rep.warnings) s += "warning: " + w + "\n";
  return s;
}

// Loads, unwraps and validates a configuration, then resolves defaults and the seed.
json load_config(const std::string& command, const Options& opt) {
  if (opt.config.empty()) throw Failure{kExitConfig, "--config is required"};
  json doc = unwrap_manifest(parse_document(opt.config));
  if (doc.is_object() && doc.contains("command") && doc["command"].is_string() &&
      doc["command"].get<std::string>() != command)
    throw Failure{kExitConfig, opt.config + ": field 'command' is '" + doc["command"].get<std::string>() +
                                   "' but the '" + command + "' command was invoked"};
  const auto rep = validate_config(command, doc);
  std::cerr << report_text(rep);
  if (!rep.ok()) throw Failure{kExitConfig, opt.config + ": configuration does not match the " + command + " schema"};
  return resolve_config(command, doc, opt.seed);
}

void write_artifacts(const fs::path& dir, const Artifacts& files) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Failure{kExitFailure, dir.string() + ": cannot create output directory: " + ec.message()};
  for (const auto& [name, content] : files) write_file_atomic(dir / name, content);
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

// ------------------------------------------------------------------ commands

json cmd_sample_graph(const json& cfg, Artifacts& out) {
  const Kernel k = kernel_from_json(cfg.at("kernel"));
  const Signal s = signal_from_json(cfg.at("signal"));
  const auto n = cfg.at("n").get<std::size_t>();
  if (n == 0) throw ConfigError("n must be positive");
  const auto g = sample_graph(GraphModel{k, s, MetricMeasureSpace::unit_square()}, n, cfg.at("seed").get<std::uint64_t>());
  out["graph.json"] = dump(to_json(g));
  return {{"n", g.size()},
          {"min_degree", g.degrees().minCoeff()},
          {"max_degree", g.degrees().maxCoeff()},
          {"storage", g.storage() == WeightStorage::Dense ? "dense" : "implicit"}};
}

json cmd_convergence(const json& cfg, Artifacts& out) {
  const auto c = convergence_config_from_json(cfg);
  const auto res = run_convergence(c);
  for (const auto& d : res.diagnostics) std::cerr << "diagnostic: " << d << "\n";
  out["convergence.csv"] = convergence_csv(res);
  out["slopes.csv"] = slopes_csv(res);
  out["plot.svg"] = convergence_svg(res);
  json curves = json::array();
  for (const auto& cv : res.curves) {
    json e = {{"r", cv.r}, {"signal", cv.signal}};
    e["slope_node"] = cv.fit_node ? json(cv.fit_node->slope) : json(nullptr);
    e["slope_pooled"] = cv.fit_pooled ? json(cv.fit_pooled->slope) : json(nullptr);
    curves.push_back(std::move(e));
  }
  return {{"records", res.records.size()}, {"curves", std::move(curves)}, {"diagnostics", res.diagnostics}};
}

json cmd_stability(const json& cfg, Artifacts& out) {
  const auto c = stability_config_from_json(cfg);
  const auto res = run_stability_pair(c);
  out["stability.csv"] = stability_csv(res, c.n, c.n_prime);
  json summary = {{"mean", res.mean}, {"max", res.max}, {"bound_status", res.bound_status}};
  if (res.bound) {
    const auto prof = regularity_profile(c.kernel, MetricMeasureSpace::unit_square(), c.dudley_c, c.grid_res);
    json rep;
    rep["report"] = to_json(bound_report(layer_constants(c.net), prof, regularity_of(c.signal), *c.bound_p));
    rep["two_graph"] = to_json(*res.bound);
    rep["n"] = c.n;
    rep["n_prime"] = c.n_prime;
    out["bound_report.json"] = dump(rep);
    summary["bound"] = json_number(res.bound->value);
  }
  return summary;
}

json cmd_bounds(const json& cfg, Artifacts& out) {
  const Kernel k = kernel_from_json(cfg.at("kernel"));
  const Signal s = signal_from_json(cfg.at("signal"));
  std::vector<LayerConstants> layers;
  if (cfg.contains("net")) {
    layers = layer_constants(net_from_json(cfg.at("net"), s.dim));
  } else {
    for (const auto& lj : cfg.at("layer_constants")) layers.push_back(layer_constants_from_json(lj));
    if (layers.empty()) throw ConfigError("layer_constants must not be empty");
  }
  const double p = cfg.at("p").get<double>();
  const auto prof = regularity_profile(k, MetricMeasureSpace::unit_square(), cfg.at("dudley_c").get<double>(),
                                       cfg.at("grid_res").get<std::size_t>());
  if (!prof.lipschitz()) throw NonLipschitzKernelError("bounds require a Lipschitz kernel; got " + describe(k));
  if (!s.lipschitz() || !std::isfinite(s.sup_f))
    throw UnsupportedSignalError("bounds require a bounded Lipschitz signal; got " + s.name);
  const auto sig = regularity_of(s);
  json rep;
  rep["kernel"] = to_json(k);
  rep["signal_kind"] = s.name;
  rep["layer_constants"] = json::array();
  for (const auto& l : layers) rep["layer_constants"].push_back(to_json(l));
  rep["report"] = to_json(bound_report(layers, prof, sig, p));
  json summary = {{"min_nodes", min_nodes(prof, p)}};
  if (cfg.contains("n")) {
    const auto n = cfg.at("n").get<std::uint64_t>();
    json ev;
    ev["n"] = n;
    ev["node"] = to_json(node_level_bound(n, p, layers, prof, sig));
    ev["pooled"] = to_json(pooled_bound(n, p, layers, prof, sig));
    const auto det = deterministic_output_bound(layers, prof, n, sig.sup_f);
    ev["deterministic"] = {{"A_prime", json_number(det.A_prime)}, {"A_dprime", json_number(det.A_dprime)},
                           {"value", json_number(det.value)}, {"envelope", json_number(det.envelope)}};
    const auto ex = expected_sq_bound(n, layers, prof, sig);
    ev["expected_sq"] = {{"leading", json_number(ex.leading)}, {"remainder", json_number(ex.remainder)},
                         {"total", json_number(ex.total)}};
    if (cfg.contains("n_prime")) {
      ev["n_prime"] = cfg.at("n_prime");
      ev["two_graph"] = to_json(two_graph_bound(n, cfg.at("n_prime").get<std::uint64_t>(), p, layers, prof, sig));
    }
    summary["pooled"] = ev["pooled"]["value"];
    rep["evaluated"] = std::move(ev);
  }
  out["bound_report.json"] = dump(rep);
  return summary;
}

json cmd_generalization(const json& cfg, Artifacts& out) {
  const auto c = gap_config_from_json(cfg);
  const auto res = run_generalization(c);
  out["gap.csv"] = gap_csv(res);
  json summary = {{"r_exp", res.r_exp}, {"mean_sq_gap", res.mean_sq_gap}, {"bound_status", res.bound_status}};
  if (res.bound) {
    out["bound_report.json"] = dump({{"generalization", to_json(*res.bound)}, {"m", c.m}});
    summary["bound"] = json_number(res.bound->total);
  }
  return summary;
}

int run_command(const std::string& command, const Options& opt) {
  if (opt.threads) set_thread_count(*opt.threads);
  try {
    const json cfg = load_config(command, opt);
    Artifacts files;
    json summary;
    if (command == "sample-graph") summary = cmd_sample_graph(cfg, files);
    else if (command == "convergence") summary = cmd_convergence(cfg, files);
    else if (command == "stability") summary = cmd_stability(cfg, files);
    else if (command == "bounds") summary = cmd_bounds(cfg, files);
    else if (command == "generalization") summary = cmd_generalization(cfg, files);
    files["manifest.json"] = dump(make_manifest(command, cfg));
    write_artifacts(opt.out, files);
    if (opt.json_summary) {
      json j = {{"command", command}, {"status", "ok"}, {"out", opt.out}, {"summary", summary}};
      j["artifacts"] = json::array();
      for (const auto& [name, _] : files) j["artifacts"].push_back(name);
      std::cout << j.dump() << "\n";
    }
    return kExitOk;
  } catch (const Failure& f) {
    std::cerr << "mpnn-lab: " << f.message << "\n";
    return f.code;
  } catch (const ConditionViolatedError& e) {
    std::cerr << "mpnn-lab: precondition violated: " << e.what() << "\n";
    return kExitPrecondition;
  } catch (const NonLipschitzKernelError& e) {
    std::cerr << "mpnn-lab: precondition violated: " << e.what() << "\n";
    return kExitPrecondition;
  } catch (const UnsupportedSignalError& e) {
    std::cerr << "mpnn-lab: precondition violated: " << e.what() << "\n";
    return kExitPrecondition;
  } catch (const IsolatedNodeError& e) {
    std::cerr << "mpnn-lab: precondition violated: " << e.what() << "\n";
    return kExitPrecondition;
  } catch (const DegenerateDegreeError& e) {
    std::cerr << "mpnn-lab: precondition violated: " << e.what() << "\n";
    return kExitPrecondition;
  } catch (const json::exception& e) {
    std::cerr << "mpnn-lab: configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "mpnn-lab: configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "mpnn-lab: " << e.what() << "\n";
    return kExitFailure;
  }
}

int run_validate(const Options& opt) {
  try {
    if (opt.config.empty()) throw Failure{kExitConfig, "--config is required"};
    const json doc = unwrap_manifest(parse_document(opt.config));
    std::string command = opt.schema;
    if (command.empty() && doc.is_object() && doc.contains("command") && doc["command"].is_string())
      command = doc["command"].get<std::string>();
    if (command.empty())
      throw Failure{kExitConfig, opt.config + ": no 'command' field; pass --schema to choose one"};
    const auto rep = validate_config(command, doc);
    if (opt.json_summary) {
      std::cout << json{{"command", command}, {"errors", rep.errors}, {"warnings", rep.warnings}}.dump() << "\n";
    } else {
      std::cout << report_text(rep);
    }
    return rep.ok() ? kExitOk : kExitConfig;
  } catch (const Failure& f) {
    std::cerr << "mpnn-lab: " << f.message << "\n";
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "mpnn-lab: " << e.what() << "\n";
    return kExitConfig;
  }
}

void add_common(CLI::App* sub, Options& opt) {
  sub->add_option("--config", opt.config, "configuration JSON or a run manifest")->required();
  sub->add_option("--out", opt.out, "output directory")->capture_default_str();
  sub->add_option("--seed", opt.seed, "master seed (overrides the configuration)");
  sub->add_option("--threads", opt.threads, "worker threads (default: $MPNN_LAB_THREADS or 1)")
      ->check(CLI::PositiveNumber);
  sub->add_flag("--json", opt.json_summary, "print a machine-readable summary on standard output");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Message passing networks on random graph models: sampling, convergence, stability and bounds"};
  app.name("mpnn-lab");
  app.require_subcommand(1);
  Options opt;
  std::map<std::string, CLI::App*> subs;
  const std::map<std::string, std::string> help{
      {"sample-graph", "sample one graph from a random graph model and write graph.json"},
      {"convergence", "subsampling convergence experiment (convergence.csv, slopes.csv, plot.svg)"},
      {"stability", "pooled-output distance between independently sampled graphs (stability.csv)"},
      {"bounds", "evaluate the stability-bound constants (bound_report.json)"},
      {"generalization", "measured generalization gap against its bound (gap.csv)"}};
  for (const auto& name : command_names()) {
    auto* sub = app.add_subcommand(name, help.at(name));
    add_common(sub, opt);
    subs[name] = sub;
  }
  auto* val = app.add_subcommand("validate-config", "schema check of a configuration file; no execution");
  val->add_option("--config", opt.config, "configuration JSON or a run manifest")->required();
  val->add_option("--schema", opt.schema, "command whose schema to use (default: the 'command' field)");
  val->add_flag("--json", opt.json_summary, "print the report as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "mpnn-lab: " << e.what() << "\n\n" << app.help();
    return kExitConfig;
  }

  if (val->parsed()) return run_validate(opt);
  for (const auto& [name, sub] : subs)
    if (sub->parsed()) return run_command(name, opt);
  std::cerr << app.help();
  return kExitConfig;
}
