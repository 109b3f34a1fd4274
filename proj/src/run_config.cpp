#include "ftn/run_config.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "ftn/errors.hpp"

namespace ftn {

namespace {

using Json = nlohmann::json;

template <typename T>
T scalar_as(const YAML::Node& node, const std::string& key) {
  if (!node.IsScalar()) throw ConfigError(key + ": expected a single value");
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(key + ": cannot parse '" + node.Scalar() + "'");
  }
}

std::size_t count_as(const YAML::Node& node, const std::string& key) {
  const auto v = scalar_as<long long>(node, key);
  if (v < 0) throw ConfigError(key + ": must be non-negative");
  return static_cast<std::size_t>(v);
}

template <typename T>
std::vector<T> list_as(const YAML::Node& node, const std::string& key) {
  std::vector<T> out;
  if (node.IsNull()) return out;
  if (node.IsScalar()) return {scalar_as<T>(node, key)};
  if (!node.IsSequence()) throw ConfigError(key + ": expected a list");
  for (const auto& item : node) out.push_back(scalar_as<T>(item, key));
  return out;
}

struct Entry {
  std::string key;
  std::function<void(RunConfig&, const YAML::Node&)> set;
  std::function<Json(const RunConfig&)> get;
};

#define FTN_ENTRY(KEY, FIELD, PARSE)                                                      \
  Entry {                                                                                 \
    KEY, [](RunConfig& c, const YAML::Node& n) { c.FIELD = PARSE(n, KEY); },              \
        [](const RunConfig& c) { return Json(c.FIELD); }                                  \
  }

const std::vector<Entry>& entries() {
  static const std::vector<Entry> table = {
      FTN_ENTRY("model.N", model.n_sites, count_as),
      FTN_ENTRY("model.omega", model.omega, list_as<double>),
      FTN_ENTRY("model.gamma", model.gamma, scalar_as<double>),
      FTN_ENTRY("model.gamma3", model.gamma3, scalar_as<double>),
      FTN_ENTRY("basis.D", basis.order, count_as),
      FTN_ENTRY("basis.K", basis.quadrature_nodes, count_as),
      FTN_ENTRY("ansatz.chi", chi, count_as),
      FTN_ENTRY("optimizer.lr", optimizer.lr, scalar_as<double>),
      FTN_ENTRY("optimizer.beta1", optimizer.beta1, scalar_as<double>),
      FTN_ENTRY("optimizer.beta2", optimizer.beta2, scalar_as<double>),
      FTN_ENTRY("optimizer.eps", optimizer.eps, scalar_as<double>),
      FTN_ENTRY("optimizer.max_iters", optimizer.max_iters, count_as),
      FTN_ENTRY("optimizer.rel_tol", optimizer.rel_tol, scalar_as<double>),
      FTN_ENTRY("optimizer.patience", optimizer.patience, count_as),
      FTN_ENTRY("optimizer.seed", optimizer.seed, scalar_as<std::uint64_t>),
      FTN_ENTRY("optimizer.window", optimizer.window, count_as),
      FTN_ENTRY("optimizer.max_halvings", optimizer.max_halvings, count_as),
      Entry{"optimizer.gradient",
            [](RunConfig& c, const YAML::Node& n) {
              c.optimizer.route = gradient_route_from_string(scalar_as<std::string>(n, "optimizer.gradient"));
            },
            [](const RunConfig& c) { return Json(to_string(c.optimizer.route)); }},
      Entry{"optimizer.resume",
            [](RunConfig& c, const YAML::Node& n) {
              c.optimizer.resume_dir = n.IsNull() ? "" : scalar_as<std::string>(n, "optimizer.resume");
            },
            [](const RunConfig& c) { return Json(c.optimizer.resume_dir.string()); }},
      Entry{"output.dir",
            [](RunConfig& c, const YAML::Node& n) { c.output.dir = scalar_as<std::string>(n, "output.dir"); },
            [](const RunConfig& c) { return Json(c.output.dir.string()); }},
      FTN_ENTRY("output.formats", output.formats, list_as<std::string>),
      FTN_ENTRY("output.checkpoint_interval", optimizer.checkpoint_interval, count_as),
      FTN_ENTRY("output.residual_every", optimizer.residual_every, count_as),
      FTN_ENTRY("output.log_every", optimizer.log_every, count_as),
      FTN_ENTRY("scan.param", scan.param, scalar_as<std::string>),
      FTN_ENTRY("scan.values", scan.values, list_as<double>),
      FTN_ENTRY("scan.workers", scan.workers, count_as),
      FTN_ENTRY("oracle.guard", oracle.guard, count_as),
      FTN_ENTRY("oracle.full_tensor", oracle.full_tensor, scalar_as<bool>),
      FTN_ENTRY("oracle.compare_mps", oracle.compare_mps, scalar_as<bool>),
  };
  return table;
}

#undef FTN_ENTRY

const Entry& find_entry(const std::string& key) {
  for (const auto& e : entries())
    if (e.key == key) return e;
  throw ConfigError("unknown configuration key '" + key + "'");
}

YAML::Node parse_yaml(const std::string& text, const std::string& what) {
  try {
    return YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(what + ": " + e.what());
  }
}

void apply_node(RunConfig& config, const YAML::Node& node, const std::string& prefix) {
  if (!node.IsMap()) {
    if (prefix.empty()) {
      if (node.IsNull()) return;
      throw ConfigError("configuration must be a mapping of sections");
    }
    find_entry(prefix).set(config, node);
    return;
  }
  for (const auto& kv : node) {
    const auto name = kv.first.as<std::string>();
    apply_node(config, kv.second, prefix.empty() ? name : prefix + "." + name);
  }
}

void apply_json_node(RunConfig& config, const Json& node, const std::string& prefix) {
  if (node.is_object()) {
    for (const auto& [name, value] : node.items()) {
      apply_json_node(config, value, prefix.empty() ? name : prefix + "." + name);
    }
    return;
  }
  find_entry(prefix).set(config, parse_yaml(node.dump(), prefix));
}

}  // namespace

bool OutputConfig::wants(const std::string& format) const {
  return std::find(formats.begin(), formats.end(), format) != formats.end();
}

void RunConfig::validate() const {
  try {
    model.validate();
    basis.validated();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  if (chi < 1) throw ConfigError("ansatz.chi must be at least 1");
  OptimizerConfig opt = optimizer;
  if (opt.checkpoint_dir.empty()) opt.checkpoint_dir = output.dir / "checkpoint";
  opt.validate();
  for (const auto& f : output.formats) {
    if (f != "json" && f != "csv") throw ConfigError("output.formats: unknown format '" + f + "'");
  }
  static const std::vector<std::string> params = {"D", "chi", "gamma", "gamma3"};
  if (std::find(params.begin(), params.end(), scan.param) == params.end()) {
    throw ConfigError("scan.param must be one of D, chi, gamma, gamma3");
  }
  if (scan.workers < 1) throw ConfigError("scan.workers must be at least 1");
  if (oracle.guard < 1) throw ConfigError("oracle.guard must be positive");
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> out;
    for (const auto& e : entries()) out.push_back(e.key);
    return out;
  }();
  return keys;
}

void apply_setting(RunConfig& config, const std::string& key, const std::string& value) {
  const Entry& entry = find_entry(key);
  entry.set(config, parse_yaml(value, key));
}

void apply_yaml(RunConfig& config, const std::string& text) {
  apply_node(config, parse_yaml(text, "config"), "");
}

void apply_yaml_file(RunConfig& config, const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  apply_yaml(config, ss.str());
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"fig2", "fig3", "fig4", "fig5", "decoupled"};
  return names;
}

void apply_preset(RunConfig& config, const std::string& name) {
  if (name == "fig2") {
    config.model = OscillatorChain::uniform(16, -0.5);
    config.chi = 16;
    config.scan = {"D", {4, 8, 12, 16}, config.scan.workers};
  } else if (name == "fig3") {
    config.model = OscillatorChain::uniform(16, -0.5);
    config.basis.order = 8;
    config.chi = 16;
    config.scan = {"chi", {2, 4, 8, 12, 16, 20}, config.scan.workers};
  } else if (name == "fig4") {
    config.model = OscillatorChain::uniform(16, 0.0);
    config.basis.order = 16;
    config.chi = 16;
    config.scan = {"gamma", {0.1, 0.2, 0.3, 0.4, 0.45, 0.5, 0.55, 0.6}, config.scan.workers};
  } else if (name == "fig5") {
    config.model = OscillatorChain::uniform(16, -0.2, 0.0);
    config.basis.order = 8;
    config.chi = 16;
    config.scan = {"gamma3", {0.0, 0.05, 0.1, 0.15, 0.2, 0.25}, config.scan.workers};
  } else if (name == "decoupled") {
    config.model = OscillatorChain::uniform(4, 0.0);
    config.basis.order = 8;
    config.chi = 4;
  } else {
    throw ConfigError("unknown preset '" + name + "'");
  }
}

RunConfig build_config(const std::string& preset, const std::filesystem::path& file,
                       const std::vector<std::pair<std::string, std::string>>& overrides) {
  RunConfig config;
  if (!preset.empty()) apply_preset(config, preset);
  if (!file.empty()) apply_yaml_file(config, file);
  for (const auto& [key, value] : overrides) apply_setting(config, key, value);
  config.validate();
  return config;
}

Json config_to_json(const RunConfig& config) {
  Json out = Json::object();
  for (const auto& e : entries()) {
    const auto dot = e.key.find('.');
    out[e.key.substr(0, dot)][e.key.substr(dot + 1)] = e.get(config);
  }
  return out;
}

RunConfig config_from_json(const Json& j) {
  RunConfig config;
  apply_json_node(config, j, "");
  return config;
}

}  // namespace ftn
