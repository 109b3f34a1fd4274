#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "ftn/basis.hpp"
#include "ftn/hamiltonian.hpp"
#include "ftn/optimizer.hpp"

namespace ftn {

struct OutputConfig {
  std::filesystem::path dir = "out";
  std::vector<std::string> formats = {"json", "csv"};

  bool wants(const std::string& format) const;
  friend bool operator==(const OutputConfig&, const OutputConfig&) = default;
};

struct ScanConfig {
  std::string param = "gamma";  // D | chi | gamma | gamma3
  std::vector<double> values;
  std::size_t workers = 1;
  friend bool operator==(const ScanConfig&, const ScanConfig&) = default;
};

struct OracleConfig {
  std::size_t guard = 4096;
  bool full_tensor = true;
  bool compare_mps = false;  // also run the MPS solver and report the gap
  friend bool operator==(const OracleConfig&, const OracleConfig&) = default;
};

/// Everything a command needs. Keys are addressed as "section.name", e.g.
/// model.gamma, basis.D, ansatz.chi, optimizer.lr, scan.values.
struct RunConfig {
  OscillatorChain model = OscillatorChain::uniform(16, -0.5);
  BasisSpec basis;
  std::size_t chi = 16;
  OptimizerConfig optimizer;
  OutputConfig output;
  ScanConfig scan;
  OracleConfig oracle;

  /// Re-checks every module invariant; throws ConfigError.
  void validate() const;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// All recognized dotted keys, in a stable order.
const std::vector<std::string>& config_keys();

/// Sets one key from a YAML-syntax value ("0.5", "[4, 8]", "chain").
/// Throws ConfigError for unknown keys or unparsable values.
void apply_setting(RunConfig& config, const std::string& key, const std::string& value);

/// Applies a YAML document with nested sections. Unknown keys are errors.
void apply_yaml(RunConfig& config, const std::string& text);
void apply_yaml_file(RunConfig& config, const std::filesystem::path& path);

/// fig2 | fig3 | fig4 | fig5 | decoupled
void apply_preset(RunConfig& config, const std::string& name);
const std::vector<std::string>& preset_names();

/// Layers, lowest precedence first: defaults, preset, file, overrides.
/// The result is validated.
RunConfig build_config(const std::string& preset, const std::filesystem::path& file,
                       const std::vector<std::pair<std::string, std::string>>& overrides);

nlohmann::json config_to_json(const RunConfig& config);
RunConfig config_from_json(const nlohmann::json& j);

}  // namespace ftn
