#include "ksos/config.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace ksos {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where) {
  if (!obj.is_object()) {
    throw ConfigError(where + " must be an object");
  }
  for (const auto& [key, value] : obj.items()) {
    if (!known.count(key)) {
      throw ConfigError("unknown config key '" + (where.empty() ? key : where + "." + key) + "'");
    }
  }
}

template <class T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config key '" + where + key + "' has the wrong type");
  }
}

Vector read_vector(const json& v, const std::string& name) {
  if (!v.is_array()) {
    throw ConfigError("config key '" + name + "' must be an array");
  }
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) {
      throw ConfigError("config key '" + name + "' must hold numbers");
    }
    out[static_cast<Eigen::Index>(i)] = v[i].get<double>();
  }
  return out;
}

/// A scalar broadcast to all parameters, or a list of kNumParams values.
ParamVector read_params(const json& v, const std::string& name) {
  if (v.is_number()) {
    return ParamVector::Constant(v.get<double>());
  }
  const Vector values = read_vector(v, name);
  if (values.size() != kNumParams) {
    throw ConfigError("config key '" + name + "' needs " + std::to_string(kNumParams) + " entries");
  }
  return values;
}

json vector_json(const Vector& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

json params_json(const ParamVector& v) {
  if ((v.array() == v[0]).all()) return v[0];
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override '" + assignment + "' is not of the form key=value");
  }
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;

  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (key.empty()) {
      throw ConfigError("override '" + assignment + "' has an empty key");
    }
    if (!node->is_object()) {
      throw ConfigError("override '" + assignment + "' descends into a non-object");
    }
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return;
    }
    node = &(*node)[key];
    if (node->is_null()) *node = json::object();
    start = dot + 1;
  }
}

ExperimentConfig from_json(const json& doc) {
  reject_unknown(doc, {"system", "seeds", "budget", "gd", "sos", "gammas", "domain"}, "");

  SystemKind kind = SystemKind::kLogistic;
  const json system = doc.value("system", json::object());
  reject_unknown(system, {"name", "n_steps", "dt", "train_x0", "test_x0"}, "system");
  if (system.contains("name")) {
    if (!system["name"].is_string()) throw ConfigError("config key 'system.name' must be a string");
    try {
      kind = parse_system_kind(system["name"].get<std::string>());
    } catch (const DomainError& e) {
      throw ConfigError(e.what());
    }
  }
  ExperimentConfig cfg = default_experiment(kind);
  read(system, "n_steps", cfg.system.n_steps, "system.");
  read(system, "dt", cfg.system.dt, "system.");
  if (system.contains("train_x0")) cfg.system.train_x0 = read_vector(system["train_x0"], "system.train_x0");
  if (system.contains("test_x0")) cfg.system.test_x0 = read_vector(system["test_x0"], "system.test_x0");

  read(doc, "seeds", cfg.seeds, "");
  read(doc, "budget", cfg.budget, "");
  read(doc, "gammas", cfg.gammas, "");

  const json gd = doc.value("gd", json::object());
  reject_unknown(gd, {"learning_rate", "init", "clamp"}, "gd");
  read(gd, "learning_rate", cfg.gd.learning_rate, "gd.");
  read(gd, "clamp", cfg.gd.clamp, "gd.");
  if (gd.contains("init")) {
    try {
      cfg.gd.init = KernelParams(read_params(gd["init"], "gd.init"));
    } catch (const DomainError& e) {
      throw ConfigError(std::string("gd.init: ") + e.what());
    }
  }

  const json sos = doc.value("sos", json::object());
  reject_unknown(sos, {"trace_reg", "sos_kernel_sigma", "barrier_eps", "newton_steps"}, "sos");
  read(sos, "trace_reg", cfg.sos.trace_reg, "sos.");
  read(sos, "sos_kernel_sigma", cfg.sos.sos_kernel_sigma, "sos.");
  read(sos, "barrier_eps", cfg.sos.barrier_eps, "sos.");
  read(sos, "newton_steps", cfg.sos.newton_steps, "sos.");

  const json domain = doc.value("domain", json::object());
  reject_unknown(domain, {"lower", "upper"}, "domain");
  if (domain.contains("lower")) cfg.gd.domain.lower = read_params(domain["lower"], "domain.lower");
  if (domain.contains("upper")) cfg.gd.domain.upper = read_params(domain["upper"], "domain.upper");

  cfg.gd.steps = cfg.budget;
  cfg.sos.n_samples = cfg.budget;
  return cfg;
}

}  // namespace

void ExperimentConfig::validate() const {
  system.validate();
  if (seeds.empty()) {
    throw DomainError("config: at least one seed is required");
  }
  std::vector<std::uint64_t> sorted = seeds;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw DomainError("config: seeds must be distinct");
  }
  if (system.n_steps < 2) {
    throw DomainError("config: the training trajectory needs at least 2 steps");
  }
  if (budget < 2) {
    throw DomainError("config: budget must be at least 2");
  }
  if (gd.steps != budget || sos.n_samples != budget) {
    throw DomainError("config: both optimizers must use the full budget");
  }
  for (double g : gammas) {
    if (!(g > 0.0) || !std::isfinite(g)) {
      throw DomainError("config: deviation thresholds must be positive");
    }
  }
  gd.validate();
  sos.validate();
}

ExperimentConfig default_experiment(SystemKind kind) {
  ExperimentConfig cfg;
  cfg.system = default_system(kind);
  for (std::uint64_t s = 0; s < 10; ++s) cfg.seeds.push_back(s);
  cfg.gammas = {0.1, 0.25};
  switch (kind) {
    case SystemKind::kLogistic:
      cfg.gd.learning_rate = 1e-3;
      break;
    case SystemKind::kHenon:
      cfg.gd.learning_rate = 1e-1;
      break;
    case SystemKind::kLorenz:
      cfg.gd.learning_rate = 0.5;
      break;
  }
  cfg.gd.steps = cfg.budget;
  cfg.sos.n_samples = cfg.budget;
  return cfg;
}

ExperimentConfig parse_config(std::string_view json_text, const std::vector<std::string>& overrides) {
  json doc = json::parse(json_text, nullptr, false);
  if (doc.is_discarded()) {
    throw ConfigError("config is not valid JSON");
  }
  if (!doc.is_object()) {
    throw ConfigError("config must be a JSON object");
  }
  for (const std::string& o : overrides) apply_override(doc, o);
  return from_json(doc);
}

ExperimentConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot read config '" + path.string() + "'");
  }
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), overrides);
}

std::string config_to_json(const ExperimentConfig& cfg) {
  json doc;
  doc["system"] = {{"name", std::string(system_name(cfg.system.kind))},
                   {"n_steps", cfg.system.n_steps},
                   {"dt", cfg.system.dt},
                   {"train_x0", vector_json(cfg.system.train_x0)},
                   {"test_x0", vector_json(cfg.system.test_x0)}};
  doc["seeds"] = cfg.seeds;
  doc["budget"] = cfg.budget;
  doc["gammas"] = cfg.gammas;
  doc["gd"] = {{"learning_rate", cfg.gd.learning_rate},
               {"init", params_json(cfg.gd.init.values())},
               {"clamp", cfg.gd.clamp}};
  doc["sos"] = {{"trace_reg", cfg.sos.trace_reg},
                {"sos_kernel_sigma", cfg.sos.sos_kernel_sigma},
                {"barrier_eps", cfg.sos.barrier_eps},
                {"newton_steps", cfg.sos.newton_steps}};
  doc["domain"] = {{"lower", params_json(cfg.gd.domain.lower)}, {"upper", params_json(cfg.gd.domain.upper)}};
  return doc.dump(2) + "\n";
}

}  // namespace ksos
