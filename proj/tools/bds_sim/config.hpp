#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bds/environment.hpp"
#include "bds/intensity.hpp"

namespace bds::tools {

struct ConfigError : std::runtime_error {
  ConfigError(const std::string& pointer, const std::string& what)
      : std::runtime_error(what + " (at " + pointer + ")"), pointer(pointer) {}
  std::string pointer;
};

struct ExperimentConfig {
  std::string experiment;

  std::string model_name{"toy"};
  int subgroups{2};
  Regime base_regime;

  enum class EnvKind { Constant, MarkovSwitching };
  EnvKind env_kind{EnvKind::Constant};
  std::vector<std::vector<double>> env_generator;
  std::vector<Regime> env_regimes;
  int env_initial_state{0};

  PopulationState z0;
  double horizon{1.0};
  std::vector<double> epsilons{1.0};
  std::int64_t replicates{100};
  std::uint64_t seed{0};

  std::string output_dir{"out"};
  int threads{0};  // 0: resolve from BDS_SIM_THREADS or hardware
  bool verify{false};
  int path_dump_replicates{0};

  double burn_in_factor{5.0};
  std::optional<std::int64_t> occupation_size;
  std::vector<double> checkpoints{0.5, 1.0, 2.0};
  std::map<std::string, double> thresholds;

  std::shared_ptr<const IntensityModel> model;

  // Regimes realized for one replicate; the markov switcher draws its own
  // stream per replicate, the constant environment is shared.
  EnvironmentPath make_environment(const RandomSource& source, std::uint64_t replicate) const;

  double threshold_or(const std::string& key, double fallback) const {
    auto it = thresholds.find(key);
    return it == thresholds.end() ? fallback : it->second;
  }
};

// Parses and validates a config file; throws ConfigError with a JSON pointer
// on schema violations.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config_json(const std::string& text);

// Names of the supported experiments, in dispatch order.
const std::vector<std::string>& experiment_names();

}  // namespace bds::tools
