#include <CLI11.hpp>

#include <cstdio>
#include <exception>

#include "bds/errors.hpp"
#include "experiments.hpp"

int main(int argc, char** argv) {
  CLI::App app{"bds_sim: exact birth-death-swap simulation experiments"};

  std::string config_path;
  std::string out_dir;
  int threads = -1;
  std::int64_t seed_override = -1;
  bool verify = false;

  app.add_option("--config", config_path, "experiment config (JSON)")->required();
  app.add_option("--out", out_dir, "output directory (overrides the config)");
  app.add_option("--threads", threads, "worker threads (default: BDS_SIM_THREADS or hardware)");
  app.add_option("--seed", seed_override, "master seed (overrides the config)");
  app.add_flag("--verify", verify, "enable sampled intensity-domination checks");

  CLI11_PARSE(app, argc, argv);

  try {
    bds::tools::ExperimentConfig config = bds::tools::load_config(config_path);
    if (!out_dir.empty()) config.output_dir = out_dir;
    if (threads >= 0) config.threads = threads;
    if (seed_override >= 0) config.seed = static_cast<std::uint64_t>(seed_override);
    if (verify) config.verify = true;

    const auto result = bds::tools::run_experiment(config);
    for (const auto& row : result.rows) {
      if (row.relation == "info") {
        std::printf("[info] %s = %.6g\n", row.statistic.c_str(), row.value);
      } else {
        std::printf("[%s] %s = %.6g (%s %.6g)\n", row.pass ? "pass" : "FAIL",
                    row.statistic.c_str(), row.value, row.relation.c_str(), row.threshold);
      }
    }
    if (!result.passed()) {
      std::printf("threshold failure in experiment '%s'\n", result.experiment.c_str());
      return 2;
    }
    std::printf("experiment '%s' passed\n", result.experiment.c_str());
    return 0;
  } catch (const bds::tools::ConfigError& error) {
    std::fprintf(stderr, "config error: %s\n", error.what());
    return 1;
  } catch (const std::exception& error) {
    std::fprintf(stderr, "error: %s\n", error.what());
    return 1;
  }
}
