#include "config.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "bds/toy.hpp"

namespace bds::tools {

using nlohmann::json;

namespace {

const json* find(const json& node, const std::string& key) {
  auto it = node.find(key);
  return it == node.end() ? nullptr : &*it;
}

double require_number(const json& node, const std::string& pointer) {
  if (!node.is_number()) throw ConfigError(pointer, "expected a number");
  return node.get<double>();
}

double optional_number(const json& parent, const std::string& key, const std::string& pointer,
                       double fallback) {
  const json* node = find(parent, key);
  if (!node) return fallback;
  return require_number(*node, pointer + "/" + key);
}

std::vector<double> require_number_array(const json& node, const std::string& pointer) {
  if (!node.is_array()) throw ConfigError(pointer, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t k = 0; k < node.size(); ++k)
    out.push_back(require_number(node[k], pointer + "/" + std::to_string(k)));
  return out;
}

void require_nonnegative(const std::vector<double>& values, const std::string& pointer) {
  for (double v : values)
    if (!(v >= 0.0)) throw ConfigError(pointer, "rates must be nonnegative");
}

Regime parse_regime(const json& node, const std::string& model_name, int p,
                    const std::string& pointer) {
  if (!node.is_object()) throw ConfigError(pointer, "expected a parameter object");
  Regime regime;
  regime.k = optional_number(node, "k", pointer, 1.0);
  if (!(regime.k >= 0.0)) throw ConfigError(pointer + "/k", "rates must be nonnegative");

  if (model_name == "toy") {
    ToyParams params;
    params.d1 = optional_number(node, "d1", pointer, 0.0);
    params.d2 = optional_number(node, "d2", pointer, 0.0);
    params.b = optional_number(node, "b", pointer, 0.0);
    params.lambda = optional_number(node, "lambda", pointer, 0.0);
    params.k12 = optional_number(node, "k12", pointer, 0.0);
    params.k21 = optional_number(node, "k21", pointer, 0.0);
    for (double v : {params.d1, params.d2, params.b, params.lambda, params.k12, params.k21})
      if (!(v >= 0.0)) throw ConfigError(pointer, "rates must be nonnegative");
    if (params.d1 > params.d2)
      throw ConfigError(pointer, "toy model requires d1 <= d2 (patch 1 is the favorable one)");
    regime = params.to_regime(regime.k);
    return regime;
  }

  const auto vec_field = [&](const char* key, double fallback) {
    const json* field = find(node, key);
    if (!field) return std::vector<double>(static_cast<std::size_t>(p), fallback);
    auto values = require_number_array(*field, pointer + "/" + key);
    if (static_cast<int>(values.size()) != p)
      throw ConfigError(pointer + "/" + key, "expected " + std::to_string(p) + " entries");
    require_nonnegative(values, pointer + "/" + key);
    return values;
  };
  regime.death = vec_field("death", 0.0);
  regime.birth = vec_field("birth", 0.0);
  regime.immigration = vec_field("immigration", 0.0);

  regime.swap_coeff.assign(static_cast<std::size_t>(p * p), 0.0);
  if (const json* swap = find(node, "swap")) {
    if (!swap->is_array() || static_cast<int>(swap->size()) != p)
      throw ConfigError(pointer + "/swap", "expected a " + std::to_string(p) + "x" +
                                               std::to_string(p) + " rate matrix");
    for (int i = 0; i < p; ++i) {
      const auto row = require_number_array((*swap)[static_cast<std::size_t>(i)],
                                            pointer + "/swap/" + std::to_string(i));
      if (static_cast<int>(row.size()) != p)
        throw ConfigError(pointer + "/swap/" + std::to_string(i), "ragged swap matrix");
      require_nonnegative(row, pointer + "/swap/" + std::to_string(i));
      for (int j = 0; j < p; ++j)
        regime.swap_coeff[static_cast<std::size_t>(i * p + j)] = row[static_cast<std::size_t>(j)];
    }
  }
  return regime;
}

}  // namespace

EnvironmentPath ExperimentConfig::make_environment(const RandomSource& source,
                                                   std::uint64_t replicate) const {
  if (env_kind == EnvKind::Constant) return EnvironmentPath::constant(base_regime);
  return EnvironmentPath::markov_switching(env_generator, env_regimes, env_initial_state,
                                           horizon, source, replicate);
}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{
      "domination-demo",         "thinning-vs-oracle", "martingale-check",
      "two-timescale-sweep",     "occupation-vs-invariant",
      "limit-process-convergence", "toy-verify"};
  return names;
}

ExperimentConfig parse_config_json(const std::string& text) {
  json root = json::parse(text, nullptr, false);
  if (root.is_discarded()) throw ConfigError("/", "invalid JSON");
  if (!root.is_object()) throw ConfigError("/", "expected a JSON object");

  ExperimentConfig config;

  const json* experiment = find(root, "experiment");
  if (!experiment || !experiment->is_string())
    throw ConfigError("/experiment", "expected an experiment name string");
  config.experiment = experiment->get<std::string>();
  const auto& names = experiment_names();
  if (std::find(names.begin(), names.end(), config.experiment) == names.end())
    throw ConfigError("/experiment", "unknown experiment '" + config.experiment + "'");

  const json* seed = find(root, "seed");
  if (!seed || !seed->is_number_integer())
    throw ConfigError("/seed", "a master seed is mandatory (no wall-clock defaults)");
  config.seed = seed->get<std::uint64_t>();

  // Model.
  const json* model = find(root, "model");
  if (!model || !model->is_object()) throw ConfigError("/model", "expected a model object");
  const json* model_name = find(*model, "name");
  if (!model_name || !model_name->is_string())
    throw ConfigError("/model/name", "expected a model name string");
  config.model_name = model_name->get<std::string>();
  if (config.model_name == "toy") {
    config.subgroups = 2;
    config.model = make_toy_model();
  } else if (config.model_name == "linear") {
    const json* p_node = find(*model, "subgroups");
    config.subgroups =
        p_node ? static_cast<int>(require_number(*p_node, "/model/subgroups")) : 2;
    if (config.subgroups < 1) throw ConfigError("/model/subgroups", "need at least one subgroup");
    config.model = make_linear_model(config.subgroups);
  } else {
    throw ConfigError("/model/name", "unknown model '" + config.model_name +
                                         "' (built-ins: toy, linear)");
  }
  const json* params = find(*model, "params");
  config.base_regime = params ? parse_regime(*params, config.model_name, config.subgroups,
                                             "/model/params")
                              : parse_regime(json::object(), config.model_name, config.subgroups,
                                             "/model/params");
  config.base_regime.id = "regime-0";

  // Environment.
  if (const json* env = find(root, "environment")) {
    if (!env->is_object()) throw ConfigError("/environment", "expected an environment object");
    const json* type = find(*env, "type");
    const std::string kind = type && type->is_string() ? type->get<std::string>() : "constant";
    if (kind == "constant") {
      config.env_kind = ExperimentConfig::EnvKind::Constant;
    } else if (kind == "markov-switching") {
      config.env_kind = ExperimentConfig::EnvKind::MarkovSwitching;
      const json* generator = find(*env, "generator");
      if (!generator || !generator->is_array())
        throw ConfigError("/environment/generator", "expected a rate matrix");
      for (std::size_t r = 0; r < generator->size(); ++r)
        config.env_generator.push_back(require_number_array(
            (*generator)[r], "/environment/generator/" + std::to_string(r)));
      const json* regimes = find(*env, "regimes");
      if (!regimes || !regimes->is_array() || regimes->size() != generator->size())
        throw ConfigError("/environment/regimes", "expected one regime per generator state");
      for (std::size_t r = 0; r < regimes->size(); ++r) {
        Regime regime = parse_regime((*regimes)[r], config.model_name, config.subgroups,
                                     "/environment/regimes/" + std::to_string(r));
        regime.id = "regime-" + std::to_string(r);
        config.env_regimes.push_back(std::move(regime));
      }
      config.env_initial_state = static_cast<int>(
          optional_number(*env, "initial_state", "/environment", 0.0));
      if (config.env_initial_state < 0 ||
          config.env_initial_state >= static_cast<int>(config.env_regimes.size()))
        throw ConfigError("/environment/initial_state", "initial state out of range");
    } else {
      throw ConfigError("/environment/type",
                        "unknown environment type (constant, markov-switching)");
    }
  }

  // Initial population.
  if (const json* z0 = find(root, "z0")) {
    const auto values = require_number_array(*z0, "/z0");
    if (static_cast<int>(values.size()) != config.subgroups)
      throw ConfigError("/z0", "expected " + std::to_string(config.subgroups) + " entries");
    for (std::size_t k = 0; k < values.size(); ++k) {
      if (values[k] < 0.0 || values[k] != std::floor(values[k]))
        throw ConfigError("/z0/" + std::to_string(k), "expected a nonnegative integer");
      config.z0.push_back(static_cast<std::int64_t>(values[k]));
    }
  } else {
    config.z0.assign(static_cast<std::size_t>(config.subgroups), 1);
  }

  config.horizon = optional_number(root, "horizon", "", 1.0);
  if (!(config.horizon >= 0.0)) throw ConfigError("/horizon", "horizon must be nonnegative");

  if (const json* eps = find(root, "epsilons")) {
    config.epsilons = require_number_array(*eps, "/epsilons");
    if (config.epsilons.empty()) throw ConfigError("/epsilons", "need at least one epsilon");
    for (double e : config.epsilons)
      if (!(e > 0.0)) throw ConfigError("/epsilons", "epsilons must be positive");
  }

  config.replicates =
      static_cast<std::int64_t>(optional_number(root, "replicates", "", 100.0));
  if (config.replicates < 1) throw ConfigError("/replicates", "need at least one replicate");

  if (const json* out = find(root, "output")) {
    if (!out->is_string()) throw ConfigError("/output", "expected a directory string");
    config.output_dir = out->get<std::string>();
  }
  config.threads = static_cast<int>(optional_number(root, "threads", "", 0.0));
  if (const json* verify = find(root, "verify")) {
    if (!verify->is_boolean()) throw ConfigError("/verify", "expected a boolean");
    config.verify = verify->get<bool>();
  }
  config.path_dump_replicates =
      static_cast<int>(optional_number(root, "path_dump_replicates", "", 0.0));
  config.burn_in_factor = optional_number(root, "burn_in_factor", "", 5.0);
  if (const json* occ = find(root, "occupation_size"))
    config.occupation_size = static_cast<std::int64_t>(require_number(*occ, "/occupation_size"));
  if (const json* cp = find(root, "checkpoints"))
    config.checkpoints = require_number_array(*cp, "/checkpoints");

  if (const json* thresholds = find(root, "thresholds")) {
    if (!thresholds->is_object()) throw ConfigError("/thresholds", "expected an object");
    for (auto it = thresholds->begin(); it != thresholds->end(); ++it)
      config.thresholds[it.key()] = require_number(it.value(), "/thresholds/" + it.key());
  }

  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("/", "cannot read config file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_json(buffer.str());
}

}  // namespace bds::tools
