#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mpnn_lab/experiments.hpp"
#include "mpnn_lab/io.hpp"

namespace mpnn_lab {

inline constexpr const char* kToolName = "mpnn-lab";
inline constexpr const char* kToolVersion = "0.1.0";

// Schema or value problem in a configuration document.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// ------------------------------------------------------------------- schemas

struct SchemaReport {
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
  bool ok() const noexcept { return errors.empty(); }
};

enum class FieldType { Number, UInt, String, Boolean, Array, Object };

struct Field {
  const char* name;
  FieldType type;
  bool required;
};

namespace detail {

inline const char* type_name(FieldType t) {
  switch (t) {
    case FieldType::Number: return "number";
    case FieldType::UInt: return "non-negative integer";
    case FieldType::String: return "string";
    case FieldType::Boolean: return "boolean";
    case FieldType::Array: return "array";
    case FieldType::Object: return "object";
  }
  return "?";
}

inline bool has_type(const json& v, FieldType t) {
  switch (t) {
    case FieldType::Number: return v.is_number();
    case FieldType::UInt: return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
    case FieldType::String: return v.is_string();
    case FieldType::Boolean: return v.is_boolean();
    case FieldType::Array: return v.is_array();
    case FieldType::Object: return v.is_object();
  }
  return false;
}

inline std::string join_path(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

// Checks presence and JSON type of the listed fields and warns about the rest.
inline void check_fields(const json& j, const std::string& path, const std::vector<Field>& fields,
                         SchemaReport& rep) {
  if (!j.is_object()) {
    rep.errors.push_back((path.empty() ? std::string("config") : path) + ": expected an object");
    return;
  }
  for (const auto& f : fields) {
    const auto it = j.find(f.name);
    if (it == j.end()) {
      if (f.required) rep.errors.push_back(join_path(path, f.name) + ": missing required field");
      continue;
    }
    if (!has_type(*it, f.type))
      rep.errors.push_back(join_path(path, f.name) + ": expected " + type_name(f.type));
  }
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const auto& f : fields) known = known || it.key() == f.name;
    if (!known) rep.warnings.push_back(join_path(path, it.key()) + ": unknown field (ignored)");
  }
}

inline void check_array_of(const json& j, const std::string& path, FieldType t, SchemaReport& rep) {
  if (!j.is_array()) return;
  for (std::size_t i = 0; i < j.size(); ++i)
    if (!has_type(j[i], t))
      rep.errors.push_back(path + "[" + std::to_string(i) + "]: expected " + type_name(t));
}

inline void check_kernel(const json& j, const std::string& path, SchemaReport& rep) {
  check_fields(j, path, {{"kind", FieldType::String, true}, {"r", FieldType::Number, false},
                         {"delta", FieldType::Number, false}, {"c", FieldType::Number, false}}, rep);
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) return;
  const auto kind = j["kind"].get<std::string>();
  if (kind == "ball_indicator" || kind == "ball") {
    if (!j.contains("r")) rep.errors.push_back(join_path(path, "r") + ": missing required field");
  } else if (kind == "smoothed_ball") {
    if (!j.contains("r")) rep.errors.push_back(join_path(path, "r") + ": missing required field");
    if (!j.contains("delta")) rep.errors.push_back(join_path(path, "delta") + ": missing required field");
  } else if (kind != "constant") {
    rep.errors.push_back(join_path(path, "kind") + ": unknown kernel kind '" + kind + "'");
  }
}

inline void check_signal(const json& j, const std::string& path, SchemaReport& rep) {
  check_fields(j, path, {{"kind", FieldType::String, true}, {"seed", FieldType::UInt, false},
                         {"sigma", FieldType::Number, false}, {"value", FieldType::Number, false},
                         {"axis", FieldType::UInt, false}}, rep);
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) return;
  const auto kind = j["kind"].get<std::string>();
  for (const char* k : {"product", "sum", "bandlimited", "noise", "constant", "coordinate"})
    if (kind == k) return;
  rep.errors.push_back(join_path(path, "kind") + ": unknown signal kind '" + kind + "'");
}

inline void check_net(const json& j, const std::string& path, SchemaReport& rep) {
  check_fields(j, path, {{"kind", FieldType::String, true}, {"dims", FieldType::Array, false},
                         {"seed", FieldType::UInt, false}, {"init_scale", FieldType::Number, false},
                         {"width", FieldType::UInt, false}, {"layers", FieldType::Array, false}}, rep);
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) return;
  const auto kind = j["kind"].get<std::string>();
  if (kind == "graphsage") {
    if (!j.contains("dims")) rep.errors.push_back(join_path(path, "dims") + ": missing required field");
    if (j.contains("dims")) check_array_of(j["dims"], join_path(path, "dims"), FieldType::UInt, rep);
  } else if (kind == "explicit") {
    if (!j.contains("layers")) rep.errors.push_back(join_path(path, "layers") + ": missing required field");
  } else if (kind != "mean") {
    rep.errors.push_back(join_path(path, "kind") + ": unknown network kind '" + kind + "'");
  }
}

inline void check_node_law(const json& j, const std::string& path, SchemaReport& rep) {
  check_fields(j, path, {{"kind", FieldType::String, true}, {"n", FieldType::UInt, false},
                         {"lo", FieldType::UInt, false}, {"hi", FieldType::UInt, false},
                         {"values", FieldType::Array, false}, {"probs", FieldType::Array, false}}, rep);
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) return;
  const auto kind = j["kind"].get<std::string>();
  const auto need = [&](const char* k) {
    if (!j.contains(k)) rep.errors.push_back(join_path(path, k) + ": missing required field");
  };
  if (kind == "fixed") {
    need("n");
  } else if (kind == "uniform") {
    need("lo");
    need("hi");
  } else if (kind == "categorical") {
    need("values");
    need("probs");
  } else {
    rep.errors.push_back(join_path(path, "kind") + ": unknown node law '" + kind + "'");
  }
}

}  // namespace detail

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"sample-graph", "convergence", "stability", "bounds",
                                              "generalization"};
  return names;
}

inline bool is_command(const std::string& c) {
  for (const auto& n : command_names())
    if (n == c) return true;
  return false;
}

// Schema check of a configuration for `command`; no execution.
inline SchemaReport validate_config(const std::string& command, const json& j) {
  using detail::check_fields;
  SchemaReport rep;
  if (!is_command(command)) {
    rep.errors.push_back("command: unknown command '" + command + "'");
    return rep;
  }
  const Field cmd{"command", FieldType::String, false};
  if (command == "convergence") {
    check_fields(j, "", {cmd, {"radii", FieldType::Array, true}, {"signals", FieldType::Array, true},
                         {"reference_n", FieldType::UInt, true}, {"sizes", FieldType::Array, true},
                         {"trials", FieldType::UInt, true}, {"seed", FieldType::UInt, true},
                         {"kernel_kind", FieldType::String, false}, {"ramp_width", FieldType::Number, false},
                         {"mpnn", FieldType::Object, false}, {"fit_min_size", FieldType::UInt, false},
                         {"noise_sigma", FieldType::Number, false}}, rep);
    if (!j.is_object()) return rep;
    if (j.contains("radii")) detail::check_array_of(j["radii"], "radii", FieldType::Number, rep);
    if (j.contains("signals")) detail::check_array_of(j["signals"], "signals", FieldType::String, rep);
    if (j.contains("sizes")) detail::check_array_of(j["sizes"], "sizes", FieldType::UInt, rep);
    if (j.contains("mpnn"))
      check_fields(j["mpnn"], "mpnn", {{"hidden", FieldType::UInt, false}, {"layers", FieldType::UInt, false},
                                       {"output_dim", FieldType::UInt, false},
                                       {"init_scale", FieldType::Number, false}, {"seed", FieldType::UInt, false}},
                   rep);
    if (j.contains("kernel_kind") && j["kernel_kind"].is_string()) {
      const auto k = j["kernel_kind"].get<std::string>();
      if (k != "ball_indicator" && k != "smoothed_ball" && k != "constant")
        rep.errors.push_back("kernel_kind: unknown kernel kind '" + k + "'");
    }
  } else if (command == "sample-graph") {
    check_fields(j, "", {cmd, {"kernel", FieldType::Object, true}, {"signal", FieldType::Object, true},
                         {"n", FieldType::UInt, true}, {"seed", FieldType::UInt, true}}, rep);
    if (!j.is_object()) return rep;
    if (j.contains("kernel")) detail::check_kernel(j["kernel"], "kernel", rep);
    if (j.contains("signal")) detail::check_signal(j["signal"], "signal", rep);
  } else if (command == "stability") {
    check_fields(j, "", {cmd, {"kernel", FieldType::Object, true}, {"signal", FieldType::Object, true},
                         {"net", FieldType::Object, true}, {"n", FieldType::UInt, true},
                         {"n_prime", FieldType::UInt, true}, {"trials", FieldType::UInt, true},
                         {"seed", FieldType::UInt, true}, {"shared_seed", FieldType::Boolean, false},
                         {"bound_p", FieldType::Number, false}, {"dudley_c", FieldType::Number, false},
                         {"grid_res", FieldType::UInt, false}}, rep);
    if (!j.is_object()) return rep;
    if (j.contains("kernel")) detail::check_kernel(j["kernel"], "kernel", rep);
    if (j.contains("signal")) detail::check_signal(j["signal"], "signal", rep);
    if (j.contains("net")) detail::check_net(j["net"], "net", rep);
  } else if (command == "bounds") {
    check_fields(j, "", {cmd, {"kernel", FieldType::Object, true}, {"signal", FieldType::Object, true},
                         {"p", FieldType::Number, true}, {"net", FieldType::Object, false},
                         {"layer_constants", FieldType::Array, false}, {"n", FieldType::UInt, false},
                         {"n_prime", FieldType::UInt, false}, {"dudley_c", FieldType::Number, false},
                         {"grid_res", FieldType::UInt, false}, {"seed", FieldType::UInt, false}}, rep);
    if (!j.is_object()) return rep;
    if (j.contains("kernel")) detail::check_kernel(j["kernel"], "kernel", rep);
    if (j.contains("signal")) detail::check_signal(j["signal"], "signal", rep);
    if (j.contains("net")) detail::check_net(j["net"], "net", rep);
    if (j.contains("net") == j.contains("layer_constants"))
      rep.errors.push_back("net: exactly one of 'net' and 'layer_constants' is required");
    if (j.contains("layer_constants") && j["layer_constants"].is_array())
      for (std::size_t i = 0; i < j["layer_constants"].size(); ++i)
        check_fields(j["layer_constants"][i], "layer_constants[" + std::to_string(i) + "]",
                     {{"lip_phi", FieldType::Number, true}, {"lip_psi", FieldType::Number, true},
                      {"bias_phi", FieldType::Number, false}, {"bias_psi", FieldType::Number, false}},
                     rep);
  } else if (command == "generalization") {
    check_fields(j, "", {cmd, {"classes", FieldType::Array, true}, {"node_law", FieldType::Object, true},
                         {"m", FieldType::UInt, true}, {"trials", FieldType::UInt, true},
                         {"mc_size", FieldType::UInt, true}, {"seed", FieldType::UInt, true},
                         {"net", FieldType::Object, true}, {"loss_lipschitz", FieldType::Number, false},
                         {"with_bound", FieldType::Boolean, false}, {"dudley_c", FieldType::Number, false},
                         {"grid_res", FieldType::UInt, false}}, rep);
    if (!j.is_object()) return rep;
    if (j.contains("classes") && j["classes"].is_array())
      for (std::size_t i = 0; i < j["classes"].size(); ++i) {
        const std::string p = "classes[" + std::to_string(i) + "]";
        const auto& c = j["classes"][i];
        check_fields(c, p, {{"kernel", FieldType::Object, true}, {"signal", FieldType::Object, true},
                            {"gamma", FieldType::Number, true}}, rep);
        if (c.is_object() && c.contains("kernel")) detail::check_kernel(c["kernel"], p + ".kernel", rep);
        if (c.is_object() && c.contains("signal")) detail::check_signal(c["signal"], p + ".signal", rep);
      }
    if (j.contains("node_law")) detail::check_node_law(j["node_law"], "node_law", rep);
    if (j.contains("net")) detail::check_net(j["net"], "net", rep);
  }
  return rep;
}

// Defaults merged under a user document to form the resolved configuration.
inline json default_config(const std::string& command) {
  if (command == "convergence")
    return {{"kernel_kind", "ball_indicator"},
            {"ramp_width", 0.05},
            {"mpnn", {{"hidden", 16}, {"layers", 2}, {"output_dim", 16}, {"init_scale", 1.0}, {"seed", 1}}},
            {"fit_min_size", 32},
            {"noise_sigma", 1.0}};
  if (command == "stability") return {{"shared_seed", false}, {"dudley_c", 1.0}, {"grid_res", 11}};
  if (command == "bounds") return {{"dudley_c", 1.0}, {"grid_res", 11}, {"seed", 0}};
  if (command == "generalization")
    return {{"loss_lipschitz", 2.0}, {"with_bound", true}, {"dudley_c", 1.0}, {"grid_res", 11}};
  return json::object();
}

// Resolved configuration: defaults, then the user document, then the seed override.
inline json resolve_config(const std::string& command, const json& user, std::optional<std::uint64_t> seed) {
  json r = default_config(command);
  r.merge_patch(user);
  r["command"] = command;
  if (seed) r["seed"] = *seed;
  return r;
}

// ------------------------------------------------------------ value builders

inline Signal signal_from_json(const json& j) {
  const auto kind = j.at("kind").get<std::string>();
  const auto seed = j.value("seed", std::uint64_t{0});
  if (kind == "constant") return constant_signal(j.value("value", 1.0));
  if (kind == "coordinate") return coordinate_signal(j.value("axis", std::size_t{0}));
  return make_signal(kind, seed, j.value("sigma", 1.0));
}

inline MPNNSpec net_from_json(const json& j, std::size_t input_dim) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "mean") {
    const auto w = j.value("width", input_dim);
    if (w != input_dim) throw ConfigError("net.width must equal the signal width");
    return mean_aggregation_net(w);
  }
  if (kind == "graphsage") {
    auto dims = j.at("dims").get<std::vector<std::size_t>>();
    if (dims.empty() || dims.front() != input_dim) throw ConfigError("net.dims must start with the signal width");
    return graphsage_random(dims, j.value("seed", std::uint64_t{1}), j.value("init_scale", 1.0));
  }
  if (kind == "explicit") {
    auto net = mpnn_from_json(j);
    if (net.input_dim() != input_dim) throw ConfigError("net input width must equal the signal width");
    return net;
  }
  throw ConfigError("unknown network kind '" + kind + "'");
}

inline NodeLaw node_law_from_json(const json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "fixed") {
    const auto n = j.at("n").get<std::uint64_t>();
    if (n == 0) throw ConfigError("node_law.n must be positive");
    return NodeLaw::fixed_at(n);
  }
  if (kind == "uniform") return NodeLaw::uniform_range(j.at("lo").get<std::uint64_t>(), j.at("hi").get<std::uint64_t>());
  if (kind == "categorical")
    return NodeLaw::categorical(j.at("values").get<std::vector<std::uint64_t>>(),
                                j.at("probs").get<std::vector<double>>());
  throw ConfigError("unknown node law '" + kind + "'");
}

inline KernelKind parse_kernel_kind(const std::string& s) {
  if (s == "ball_indicator" || s == "ball") return KernelKind::BallIndicator;
  if (s == "smoothed_ball") return KernelKind::SmoothedBall;
  if (s == "constant") return KernelKind::Constant;
  throw ConfigError("unknown kernel kind '" + s + "'");
}

// Parsers below expect a resolved configuration that passed validate_config.

inline ConvergenceConfig convergence_config_from_json(const json& j) {
  ConvergenceConfig c;
  c.kernel_kind = parse_kernel_kind(j.at("kernel_kind").get<std::string>());
  c.ramp_width = j.at("ramp_width").get<double>();
  c.radii = j.at("radii").get<std::vector<double>>();
  c.signals = j.at("signals").get<std::vector<std::string>>();
  c.reference_n = j.at("reference_n").get<std::size_t>();
  c.sizes = j.at("sizes").get<std::vector<std::size_t>>();
  c.trials = j.at("trials").get<std::size_t>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.fit_min_size = j.at("fit_min_size").get<std::size_t>();
  c.noise_sigma = j.at("noise_sigma").get<double>();
  const auto& m = j.at("mpnn");
  c.mpnn.hidden = m.value("hidden", c.mpnn.hidden);
  c.mpnn.depth = m.value("layers", c.mpnn.depth);
  c.mpnn.output_dim = m.value("output_dim", c.mpnn.output_dim);
  c.mpnn.init_scale = m.value("init_scale", c.mpnn.init_scale);
  c.mpnn.seed = m.value("seed", c.mpnn.seed);
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return c;
}

inline StabilityConfig stability_config_from_json(const json& j) {
  StabilityConfig c;
  c.kernel = kernel_from_json(j.at("kernel"));
  c.signal = signal_from_json(j.at("signal"));
  c.net = net_from_json(j.at("net"), c.signal.dim);
  c.n = j.at("n").get<std::size_t>();
  c.n_prime = j.at("n_prime").get<std::size_t>();
  c.trials = j.at("trials").get<std::size_t>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.shared_seed = j.at("shared_seed").get<bool>();
  if (j.contains("bound_p")) c.bound_p = j.at("bound_p").get<double>();
  c.dudley_c = j.at("dudley_c").get<double>();
  c.grid_res = j.at("grid_res").get<std::size_t>();
  if (c.n == 0 || c.n_prime == 0) throw ConfigError("n and n_prime must be positive");
  if (c.trials == 0) throw ConfigError("trials must be at least 1");
  return c;
}

inline GapConfig gap_config_from_json(const json& j) {
  GapConfig c;
  for (const auto& cj : j.at("classes"))
    c.dist.classes.push_back({kernel_from_json(cj.at("kernel")), signal_from_json(cj.at("signal")),
                              cj.at("gamma").get<double>()});
  if (c.dist.classes.empty()) throw ConfigError("classes must not be empty");
  c.dist.node_law = node_law_from_json(j.at("node_law"));
  c.m = j.at("m").get<std::size_t>();
  c.trials = j.at("trials").get<std::size_t>();
  c.mc_size = j.at("mc_size").get<std::size_t>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.net = net_from_json(j.at("net"), c.dist.classes.front().signal.dim);
  c.loss.lipschitz = j.at("loss_lipschitz").get<double>();
  c.with_bound = j.at("with_bound").get<bool>();
  c.dudley_c = j.at("dudley_c").get<double>();
  c.grid_res = j.at("grid_res").get<std::size_t>();
  try {
    c.validate();
  } catch (const RepresentativenessError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return c;
}

// Run manifest: everything needed to reproduce the run; no timestamps.
inline json make_manifest(const std::string& command, const json& resolved) {
  json m;
  m["manifest_version"] = 1;
  m["tool"] = kToolName;
  m["version"] = kToolVersion;
  m["command"] = command;
  m["seed"] = resolved.contains("seed") ? resolved["seed"] : json(nullptr);
  m["config"] = resolved;
  return m;
}

// A manifest given as --config is replaced by the configuration it records.
inline json unwrap_manifest(const json& doc) {
  if (doc.is_object() && doc.contains("manifest_version")) {
    if (!doc.contains("config")) throw ConfigError("manifest has no 'config' field");
    return doc.at("config");
  }
  return doc;
}

}  // namespace mpnn_lab
