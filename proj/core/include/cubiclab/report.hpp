#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace cubiclab::report {

inline constexpr int schema_version = 1;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// 64-bit FNV-1a, as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);

/// Defaults for one experiment. Every key a config may set must appear here;
/// the value's JSON type fixes the accepted type.
struct ExperimentSchema {
  std::string experiment;
  nlohmann::json parameters = nlohmann::json::object();
  nlohmann::json tolerances = nlohmann::json::object();
  nlohmann::json grids = nlohmann::json::object();
};

struct ExperimentConfig {
  std::string experiment;
  nlohmann::json parameters = nlohmann::json::object();
  nlohmann::json tolerances = nlohmann::json::object();
  nlohmann::json grids = nlohmann::json::object();
  std::string output_dir;
  std::uint64_t seed = 0;

  double number(const std::string& key) const;  // parameters, then tolerances, then grids
  long integer(const std::string& key) const;
  std::string text(const std::string& key) const;

  /// Canonical resolved form (sorted keys).
  nlohmann::json resolved() const;
  /// Hash of the canonical resolved form.
  std::string hash() const;
};

/// Defaults, then the config file object (may be null), then command-line
/// overrides (an object with optional "parameters", "tolerances", "grids",
/// "output_dir", "seed"). Unknown keys and type mismatches throw ConfigError.
ExperimentConfig resolve(const ExperimentSchema& schema, const nlohmann::json& file, const nlohmann::json& overrides);

nlohmann::json load_json_file(const std::filesystem::path& path);

/// Value of CUBICLAB_OUT, or "out".
std::filesystem::path default_output_dir();

/// Writes artifacts into one directory. Every CSV starts with a comment line
/// carrying the schema version and config hash; every JSON document carries
/// both as fields. Nothing time-dependent is written.
class ArtifactWriter {
 public:
  ArtifactWriter(std::filesystem::path dir, const ExperimentConfig& config);

  const std::filesystem::path& directory() const { return dir_; }
  std::ofstream open_csv(const std::string& name);
  void write_json(const std::string& name, nlohmann::json document);
  /// manifest.json: resolved config, hash, list of artifacts, diagnostics.
  void write_manifest(const nlohmann::json& diagnostics = nlohmann::json::object());
  const std::vector<std::string>& artifacts() const { return artifacts_; }

 private:
  std::filesystem::path dir_;
  nlohmann::json resolved_;
  std::string hash_;
  std::vector<std::string> artifacts_;
};

}  // namespace cubiclab::report
