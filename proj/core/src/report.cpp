#include "cubiclab/report.hpp"

#include <cstdlib>
#include <iomanip>
#include <sstream>

namespace cubiclab::report {

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

namespace {

bool same_kind(const nlohmann::json& def, const nlohmann::json& v) {
  if (def.is_number_integer() || def.is_number_unsigned()) return v.is_number_integer() || v.is_number_unsigned();
  if (def.is_number()) return v.is_number();
  if (def.is_boolean()) return v.is_boolean();
  if (def.is_string()) return v.is_string();
  if (def.is_array()) return v.is_array();
  return def.type() == v.type();
}

void merge_section(nlohmann::json& target, const nlohmann::json& defaults, const nlohmann::json& src,
                   const std::string& section, const std::string& origin) {
  if (src.is_null()) return;
  if (!src.is_object()) throw ConfigError(origin + ": section '" + section + "' must be an object");
  for (const auto& [k, v] : src.items()) {
    if (!defaults.contains(k)) throw ConfigError(origin + ": unknown key '" + section + "." + k + "'");
    if (!same_kind(defaults[k], v))
      throw ConfigError(origin + ": key '" + section + "." + k + "' expects " + std::string(defaults[k].type_name()));
    target[k] = v;
  }
}

void apply(ExperimentConfig& cfg, const ExperimentSchema& schema, const nlohmann::json& src, const std::string& origin) {
  if (src.is_null()) return;
  if (!src.is_object()) throw ConfigError(origin + ": configuration must be a JSON object");
  for (const auto& [k, v] : src.items()) {
    if (k == "experiment") {
      if (!v.is_string() || v.get<std::string>() != schema.experiment)
        throw ConfigError(origin + ": experiment must be \"" + schema.experiment + "\"");
    } else if (k == "parameters") {
      merge_section(cfg.parameters, schema.parameters, v, k, origin);
    } else if (k == "tolerances") {
      merge_section(cfg.tolerances, schema.tolerances, v, k, origin);
    } else if (k == "grids") {
      merge_section(cfg.grids, schema.grids, v, k, origin);
    } else if (k == "output_dir") {
      if (!v.is_string()) throw ConfigError(origin + ": output_dir must be a string");
      cfg.output_dir = v.get<std::string>();
    } else if (k == "seed") {
      if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
        throw ConfigError(origin + ": seed must be a nonnegative integer");
      cfg.seed = v.get<std::uint64_t>();
    } else {
      throw ConfigError(origin + ": unknown key '" + k + "'");
    }
  }
}

const nlohmann::json* find_key(const ExperimentConfig& c, const std::string& key) {
  for (const auto* sec : {&c.parameters, &c.tolerances, &c.grids})
    if (sec->contains(key)) return &(*sec)[key];
  return nullptr;
}

}  // namespace

double ExperimentConfig::number(const std::string& key) const {
  const auto* v = find_key(*this, key);
  if (!v || !v->is_number()) throw ConfigError("no numeric configuration key '" + key + "'");
  return v->get<double>();
}

long ExperimentConfig::integer(const std::string& key) const {
  const auto* v = find_key(*this, key);
  if (!v || !(v->is_number_integer() || v->is_number_unsigned()))
    throw ConfigError("no integer configuration key '" + key + "'");
  return v->get<long>();
}

std::string ExperimentConfig::text(const std::string& key) const {
  const auto* v = find_key(*this, key);
  if (!v || !v->is_string()) throw ConfigError("no string configuration key '" + key + "'");
  return v->get<std::string>();
}

nlohmann::json ExperimentConfig::resolved() const {
  // Output location is excluded so relocated replays hash identically.
  return {{"experiment", experiment}, {"parameters", parameters}, {"tolerances", tolerances},
          {"grids", grids},           {"seed", seed}};
}

std::string ExperimentConfig::hash() const { return fnv1a_hex(resolved().dump()); }

ExperimentConfig resolve(const ExperimentSchema& schema, const nlohmann::json& file, const nlohmann::json& overrides) {
  ExperimentConfig cfg;
  cfg.experiment = schema.experiment;
  cfg.parameters = schema.parameters;
  cfg.tolerances = schema.tolerances;
  cfg.grids = schema.grids;
  apply(cfg, schema, file, "config file");
  apply(cfg, schema, overrides, "command line");
  if (cfg.output_dir.empty()) cfg.output_dir = default_output_dir().string();
  return cfg;
}

nlohmann::json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config file " + path.string() + ": " + e.what());
  }
}

std::filesystem::path default_output_dir() {
  if (const char* env = std::getenv("CUBICLAB_OUT"); env && *env) return env;
  return "out";
}

ArtifactWriter::ArtifactWriter(std::filesystem::path dir, const ExperimentConfig& config)
    : dir_(std::move(dir)), resolved_(config.resolved()), hash_(config.hash()) {
  std::filesystem::create_directories(dir_);
}

std::ofstream ArtifactWriter::open_csv(const std::string& name) {
  std::ofstream os(dir_ / name);
  if (!os) throw std::runtime_error("cannot write " + (dir_ / name).string());
  os << "# schema_version=" << schema_version << " config_hash=" << hash_ << '\n';
  artifacts_.push_back(name);
  return os;
}

void ArtifactWriter::write_json(const std::string& name, nlohmann::json document) {
  document["schema_version"] = schema_version;
  document["config_hash"] = hash_;
  std::ofstream os(dir_ / name);
  if (!os) throw std::runtime_error("cannot write " + (dir_ / name).string());
  os << document.dump(2) << '\n';
  artifacts_.push_back(name);
}

void ArtifactWriter::write_manifest(const nlohmann::json& diagnostics) {
  nlohmann::json m{{"schema_version", schema_version},
                   {"config", resolved_},
                   {"config_hash", hash_},
                   {"artifacts", artifacts_},
                   {"diagnostics", diagnostics}};
  std::ofstream os(dir_ / "manifest.json");
  if (!os) throw std::runtime_error("cannot write manifest in " + dir_.string());
  os << m.dump(2) << '\n';
}

}  // namespace cubiclab::report
