#pragma once

#include <string>
#include <vector>

#include "config.hpp"

namespace bds::tools {

struct ReportRow {
  std::string statistic;
  double value{0.0};
  double threshold{0.0};
  std::string relation;  // "<=", ">=", "==", "info"
  bool pass{true};
};

struct ExperimentResult {
  std::string experiment;
  std::vector<ReportRow> rows;

  bool passed() const {
    for (const auto& row : rows)
      if (!row.pass) return false;
    return true;
  }
};

// Runs the named experiment, writes its CSV/SVG outputs plus report.csv into
// config.output_dir, and returns the threshold verdicts.
ExperimentResult run_experiment(const ExperimentConfig& config);

}  // namespace bds::tools
