#include "experiments.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <stdexcept>

#include "bds/averaging.hpp"
#include "bds/multiscale.hpp"
#include "bds/stats.hpp"
#include "bds/toy.hpp"
#include "csv.hpp"
#include "parallel.hpp"
#include "svg.hpp"

namespace bds::tools {

namespace {

namespace fs = std::filesystem;

std::string event_kind_name(const EventType& ev) {
  switch (ev.kind) {
    case EventKind::Swap:
      return "swap";
    case EventKind::Birth:
      return "birth";
    case EventKind::Death:
      return "death";
  }
  return "?";
}

// 1-based subgroup labels in file outputs; 0 marks the absent slot of a
// demographic event.
int csv_src(const EventType& ev) { return ev.kind == EventKind::Birth ? 0 : ev.source + 1; }
int csv_dst(const EventType& ev) { return ev.kind == EventKind::Death ? 0 : ev.dest + 1; }

std::string eps_tag(double epsilon) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%g", epsilon);
  std::string tag = buffer;
  for (auto& c : tag)
    if (c == '.') c = 'p';
  return tag;
}

struct Reporter {
  ExperimentResult result;

  void check(const std::string& statistic, double value, const std::string& relation,
             double threshold) {
    bool pass = true;
    if (relation == "<=") pass = value <= threshold;
    if (relation == ">=") pass = value >= threshold;
    if (relation == "==") pass = value == threshold;
    if (relation == "<") pass = value < threshold;
    result.rows.push_back({statistic, value, threshold, relation, pass});
  }
  void info(const std::string& statistic, double value) {
    result.rows.push_back({statistic, value, 0.0, "info", true});
  }
};

void write_report(const ExperimentConfig& config, const ExperimentResult& result) {
  CsvWriter report(config.output_dir + "/report.csv",
                   {"experiment", "statistic", "value", "threshold", "relation", "pass"});
  for (const auto& row : result.rows)
    report.write_row({result.experiment, row.statistic, format_double(row.value),
                      row.relation == "info" ? "" : format_double(row.threshold), row.relation,
                      row.pass ? "1" : "0"});
}

// Adds a constant to every birth intensity (and its dominator). Keeps all
// other components identical, so the base model and the boosted model are
// strongly ordered.
class ImmigrationBoost final : public IntensityModel {
 public:
  ImmigrationBoost(std::shared_ptr<const IntensityModel> base, double extra)
      : base_(std::move(base)), extra_(extra) {}

  std::string name() const override { return base_->name() + "+immigration"; }
  int subgroups() const override { return base_->subgroups(); }
  double rate(const Regime& regime, double t, const PopulationState& z,
              const EventType& ev) const override {
    const double r = base_->rate(regime, t, z, ev);
    return ev.kind == EventKind::Birth ? r + extra_ : r;
  }
  double birth_bound(const Regime& regime, double t, int j, std::int64_t n) const override {
    return base_->birth_bound(regime, t, j, n) + extra_;
  }
  double sup_by_size(const Regime& regime, double t, const EventType& ev,
                     std::int64_t n) const override {
    return base_->sup_by_size(regime, t, ev, n);
  }
  GrowthClass growth_class() const override { return base_->growth_class(); }

 private:
  std::shared_ptr<const IntensityModel> base_;
  double extra_;
};

void dump_paths_csv(const ExperimentConfig& config, double epsilon) {
  if (config.path_dump_replicates <= 0) return;
  const auto scaled = scale_swap_intensities(config.model, epsilon);
  RandomSource source(config.seed);
  CsvWriter dump(config.output_dir + "/paths.csv",
                 [&] {
                   std::vector<std::string> header{"replicate", "time",     "event_kind",
                                                   "src",       "dst",      "accepted"};
                   for (int c = 1; c <= config.subgroups; ++c)
                     header.push_back("z_" + std::to_string(c));
                   return header;
                 }());
  EngineOptions options;
  options.verify = config.verify;
  for (int rep = 0; rep < config.path_dump_replicates; ++rep) {
    const auto env = config.make_environment(source, static_cast<std::uint64_t>(rep));
    const auto skeleton = simulate_dominating(*scaled, env, config.z0, config.horizon, source,
                                              static_cast<std::uint64_t>(rep), options);
    const auto trace = thin_to_bds_traced(skeleton, *scaled, env, config.z0, options);
    PopulationState z = config.z0;
    for (std::size_t k = 0; k < skeleton.records.size(); ++k) {
      const auto& rec = skeleton.records[k];
      if (trace.accepted[k]) apply_event(z, rec.event);
      std::vector<std::string> row{std::to_string(rep),
                                   format_double(rec.time),
                                   event_kind_name(rec.event),
                                   std::to_string(csv_src(rec.event)),
                                   std::to_string(csv_dst(rec.event)),
                                   trace.accepted[k] ? "1" : "0"};
      for (auto v : z) row.push_back(std::to_string(v));
      dump.write_row(row);
    }
  }
}

// ---------------------------------------------------------------------------

ExperimentResult domination_demo(const ExperimentConfig& config) {
  Reporter reporter;
  RandomSource source(config.seed);
  EngineOptions options;
  options.verify = config.verify;

  for (double epsilon : config.epsilons) {
    TwoTimescaleConfig two;
    two.model = config.model;
    two.epsilon = epsilon;
    two.horizon = config.horizon;

    std::vector<char> ok(static_cast<std::size_t>(config.replicates), 0);
    parallel_replicates(config.replicates, resolve_threads(config.threads), [&](std::int64_t rep) {
      const auto env = config.make_environment(source, static_cast<std::uint64_t>(rep));
      const auto run =
          simulate_two_timescale(two, env, config.z0, source, static_cast<std::uint64_t>(rep),
                                 options);
      const bool pass = check_strong_domination(run.path, run.skeleton).dominated &&
                        check_support_condition(run.path) &&
                        check_aggregate_bound(run.path, run.skeleton);
      ok[static_cast<std::size_t>(rep)] = pass ? 1 : 0;
    });
    std::int64_t violations = 0;
    for (char flag : ok)
      if (!flag) ++violations;
    reporter.check("pathwise_violations_eps_" + eps_tag(epsilon),
                   static_cast<double>(violations), "==", 0.0);
  }

  // Coupling and ratio reconstruction on a strongly ordered pair: the base
  // model against the same model with extra immigration.
  const auto extra = config.threshold_or("coupling_extra_immigration", 0.4);
  const auto coupling_reps = static_cast<std::int64_t>(
      config.threshold_or("coupling_replicates", 1000.0));
  const ImmigrationBoost high(config.model, extra);

  std::vector<char> subset_ok(static_cast<std::size_t>(coupling_reps), 0);
  std::vector<char> rebuild_ok(static_cast<std::size_t>(coupling_reps), 0);
  parallel_replicates(coupling_reps, resolve_threads(config.threads), [&](std::int64_t rep) {
    const auto env = config.make_environment(source, static_cast<std::uint64_t>(rep));
    const auto pair = coupled_pair(*config.model, high, env, config.z0, config.horizon, source,
                                   static_cast<std::uint64_t>(rep), options);
    subset_ok[static_cast<std::size_t>(rep)] =
        check_strong_domination(pair.low, pair.high).dominated ? 1 : 0;
    const auto low_eval = make_intensity_evaluator(*config.model, env);
    const auto high_eval = make_intensity_evaluator(high, env);
    const auto rebuilt = reconstruct_by_ratio(pair.low, pair.high, low_eval, high_eval, source,
                                              static_cast<std::uint64_t>(rep));
    rebuild_ok[static_cast<std::size_t>(rep)] = rebuilt.events == pair.low.events ? 1 : 0;
  });
  std::int64_t subset_violations = 0, rebuild_mismatches = 0;
  for (std::int64_t rep = 0; rep < coupling_reps; ++rep) {
    if (!subset_ok[static_cast<std::size_t>(rep)]) ++subset_violations;
    if (!rebuild_ok[static_cast<std::size_t>(rep)]) ++rebuild_mismatches;
  }
  reporter.check("coupling_subset_violations", static_cast<double>(subset_violations), "==", 0.0);
  reporter.check("reconstruction_mismatches", static_cast<double>(rebuild_mismatches), "==", 0.0);

  // Timeline of one path at the smallest epsilon.
  {
    const double epsilon = *std::min_element(config.epsilons.begin(), config.epsilons.end());
    TwoTimescaleConfig two;
    two.model = config.model;
    two.epsilon = epsilon;
    two.horizon = config.horizon;
    const auto env = config.make_environment(source, 0);
    const auto run = simulate_two_timescale(two, env, config.z0, source, 0, options);
    std::vector<double> swap_times, dem_times;
    for (const auto& ev : run.path.events)
      (ev.event.kind == EventKind::Swap ? swap_times : dem_times).push_back(ev.time);
    emit_timeline(config.output_dir + "/timeline.svg", swap_times, dem_times, config.horizon,
                  "accepted events, epsilon=" + format_double(epsilon));
  }
  dump_paths_csv(config, config.epsilons.front());

  reporter.result.experiment = "domination-demo";
  return reporter.result;
}

// ---------------------------------------------------------------------------

ExperimentResult thinning_vs_oracle(const ExperimentConfig& config) {
  Reporter reporter;
  const double epsilon = config.epsilons.front();
  const double T = config.horizon;

  TwoTimescaleConfig two;
  two.model = config.model;
  two.epsilon = epsilon;
  two.horizon = T;

  RandomSource thin_source(config.seed);
  RandomSource oracle_source(config.seed + 1);  // independent master seed
  const auto scaled = scale_swap_intensities(config.model, epsilon);
  EngineOptions options;
  options.verify = config.verify;

  using Triple = std::array<std::int64_t, 3>;
  std::vector<Triple> thin_counts(static_cast<std::size_t>(config.replicates));
  std::vector<Triple> oracle_counts(static_cast<std::size_t>(config.replicates));
  parallel_replicates(config.replicates, resolve_threads(config.threads), [&](std::int64_t rep) {
    const auto env = config.make_environment(thin_source, static_cast<std::uint64_t>(rep));
    const auto run = simulate_two_timescale(two, env, config.z0, thin_source,
                                            static_cast<std::uint64_t>(rep), options);
    thin_counts[static_cast<std::size_t>(rep)] = {run.path.birth_count_at(T),
                                                  run.path.death_count_at(T),
                                                  run.path.swap_count_at(T)};
    const auto env2 = config.make_environment(oracle_source, static_cast<std::uint64_t>(rep));
    const auto path = oracle_simulate(*scaled, env2, config.z0, T, oracle_source,
                                      static_cast<std::uint64_t>(rep));
    oracle_counts[static_cast<std::size_t>(rep)] = {path.birth_count_at(T),
                                                    path.death_count_at(T),
                                                    path.swap_count_at(T)};
  });

  const double min_p = config.threshold_or("min_p", 0.01);
  const std::array<std::string, 3> names{"births", "deaths", "swaps"};
  CsvWriter counts_csv(config.output_dir + "/counts.csv",
                       {"coordinate", "value", "count_thinning", "count_oracle"});
  std::vector<PlotSeries> pmf_series;
  for (std::size_t c = 0; c < 3; ++c) {
    EmpiricalLaw law_thin{"thinning_" + names[c], {}};
    EmpiricalLaw law_oracle{"oracle_" + names[c], {}};
    law_thin.samples.reserve(thin_counts.size());
    law_oracle.samples.reserve(oracle_counts.size());
    for (const auto& t : thin_counts) law_thin.samples.push_back(static_cast<double>(t[c]));
    for (const auto& t : oracle_counts) law_oracle.samples.push_back(static_cast<double>(t[c]));
    const auto result = two_sample_test(law_thin, law_oracle);
    reporter.check("chi2_p_" + names[c], result.p_value, ">=", min_p);

    std::map<std::int64_t, std::array<std::int64_t, 2>> histogram;
    for (auto v : law_thin.integer_samples()) histogram[v][0]++;
    for (auto v : law_oracle.integer_samples()) histogram[v][1]++;
    PlotSeries thin_pmf{"thinning " + names[c], {}}, oracle_pmf{"oracle " + names[c], {}};
    for (const auto& [value, cells] : histogram) {
      counts_csv.write_row({names[c], std::to_string(value), std::to_string(cells[0]),
                            std::to_string(cells[1])});
      if (c == 0) {
        thin_pmf.points.push_back({static_cast<double>(value),
                                   static_cast<double>(cells[0]) / double(law_thin.count())});
        oracle_pmf.points.push_back(
            {static_cast<double>(value),
             static_cast<double>(cells[1]) / double(law_oracle.count())});
      }
    }
    if (c == 0) {
      pmf_series.push_back(std::move(thin_pmf));
      pmf_series.push_back(std::move(oracle_pmf));
    }
  }
  emit_plot(config.output_dir + "/pmf_births.svg", pmf_series,
            {"aggregate birth count at T", "count", "frequency", false, false});

  reporter.result.experiment = "thinning-vs-oracle";
  return reporter.result;
}

// ---------------------------------------------------------------------------

ExperimentResult martingale_check(const ExperimentConfig& config) {
  Reporter reporter;
  const double epsilon = config.epsilons.front();
  for (double t : config.checkpoints)
    if (t > config.horizon)
      throw std::invalid_argument("martingale-check: checkpoint beyond horizon");

  TwoTimescaleConfig two;
  two.model = config.model;
  two.epsilon = epsilon;
  two.horizon = config.horizon;
  const auto scaled = scale_swap_intensities(config.model, epsilon);
  const EventSpace space(config.subgroups);
  EngineOptions options;
  options.verify = config.verify;

  RandomSource source(config.seed);
  const std::size_t cells = config.checkpoints.size() * static_cast<std::size_t>(space.size());
  std::vector<std::vector<double>> residual_slots(
      static_cast<std::size_t>(config.replicates), std::vector<double>(cells, 0.0));
  parallel_replicates(config.replicates, resolve_threads(config.threads), [&](std::int64_t rep) {
    const auto env = config.make_environment(source, static_cast<std::uint64_t>(rep));
    const auto run = simulate_two_timescale(two, env, config.z0, source,
                                            static_cast<std::uint64_t>(rep), options);
    const auto residuals = compensator_residual(run.path, *scaled, env, config.checkpoints);
    auto& slot = residual_slots[static_cast<std::size_t>(rep)];
    for (std::size_t c = 0; c < residuals.checkpoints.size(); ++c)
      for (int k = 0; k < space.size(); ++k)
        slot[c * static_cast<std::size_t>(space.size()) + static_cast<std::size_t>(k)] =
            residuals.residuals[c][static_cast<std::size_t>(k)];
  });

  CsvWriter csv(config.output_dir + "/residuals.csv",
                {"checkpoint", "event", "mean", "stderr", "z"});
  std::vector<PlotSeries> series(static_cast<std::size_t>(space.size()));
  const double max_z = config.threshold_or("max_z", 3.0);
  double worst = 0.0;
  std::vector<double> column(static_cast<std::size_t>(config.replicates));
  for (std::size_t c = 0; c < config.checkpoints.size(); ++c) {
    for (int k = 0; k < space.size(); ++k) {
      for (std::int64_t rep = 0; rep < config.replicates; ++rep)
        column[static_cast<std::size_t>(rep)] =
            residual_slots[static_cast<std::size_t>(rep)]
                          [c * static_cast<std::size_t>(space.size()) +
                           static_cast<std::size_t>(k)];
      const auto& ev = space.event(k);
      const EmpiricalLaw law{"residual_" + to_string(ev), column};
      const auto summary = residual_zero_test(law);
      csv.write_row({format_double(config.checkpoints[c]), to_string(ev),
                     format_double(summary.mean), format_double(summary.standard_error),
                     format_double(summary.z_score)});
      series[static_cast<std::size_t>(k)].label = to_string(ev);
      series[static_cast<std::size_t>(k)].points.push_back(
          {config.checkpoints[c], summary.z_score});
      worst = std::max(worst, std::abs(summary.z_score));
      reporter.check("abs_z_" + to_string(ev) + "_t" + format_double(config.checkpoints[c]),
                     std::abs(summary.z_score), "<=", max_z);
    }
  }
  reporter.info("max_abs_z", worst);
  emit_plot(config.output_dir + "/residual_z.svg", series,
            {"compensator residual z-scores", "checkpoint", "z", false, false});

  reporter.result.experiment = "martingale-check";
  return reporter.result;
}

// ---------------------------------------------------------------------------

ExperimentResult two_timescale_sweep(const ExperimentConfig& config) {
  Reporter reporter;
  RandomSource source(config.seed);
  EngineOptions options;
  options.verify = config.verify;

  struct SweepPoint {
    double epsilon;
    double mean_swaps{0.0};
    double mean_births{0.0};
    double mean_deaths{0.0};
  };
  std::vector<SweepPoint> sweep;
  std::int64_t dem_mismatches = 0;

  // Per replicate, run the whole epsilon list so the shared demographic skeleton
  // can be compared record for record.
  std::vector<std::vector<std::array<double, 3>>> counts(
      config.epsilons.size(),
      std::vector<std::array<double, 3>>(static_cast<std::size_t>(config.replicates)));
  std::vector<char> dem_ok(static_cast<std::size_t>(config.replicates), 1);

  parallel_replicates(config.replicates, resolve_threads(config.threads), [&](std::int64_t rep) {
    const auto env = config.make_environment(source, static_cast<std::uint64_t>(rep));
    std::vector<SkeletonRecord> reference_dem;
    for (std::size_t e = 0; e < config.epsilons.size(); ++e) {
      TwoTimescaleConfig two;
      two.model = config.model;
      two.epsilon = config.epsilons[e];
      two.horizon = config.horizon;
      const auto run = simulate_two_timescale(two, env, config.z0, source,
                                              static_cast<std::uint64_t>(rep), options);
      counts[e][static_cast<std::size_t>(rep)] = {
          static_cast<double>(run.path.swap_count_at(config.horizon)),
          static_cast<double>(run.path.birth_count_at(config.horizon)),
          static_cast<double>(run.path.death_count_at(config.horizon))};
      std::vector<SkeletonRecord> dem;
      for (const auto& rec : run.skeleton.records)
        if (rec.event.kind != EventKind::Swap) dem.push_back(rec);
      if (e == 0) {
        reference_dem = std::move(dem);
      } else {
        bool same = dem.size() == reference_dem.size();
        for (std::size_t r = 0; same && r < dem.size(); ++r)
          same = dem[r].time == reference_dem[r].time && dem[r].mark == reference_dem[r].mark &&
                 dem[r].event == reference_dem[r].event;
        if (!same) dem_ok[static_cast<std::size_t>(rep)] = 0;
      }
    }
  });

  for (char flag : dem_ok)
    if (!flag) ++dem_mismatches;

  for (std::size_t e = 0; e < config.epsilons.size(); ++e) {
    SweepPoint point;
    point.epsilon = config.epsilons[e];
    for (const auto& c : counts[e]) {
      point.mean_swaps += c[0];
      point.mean_births += c[1];
      point.mean_deaths += c[2];
    }
    point.mean_swaps /= static_cast<double>(config.replicates);
    point.mean_births /= static_cast<double>(config.replicates);
    point.mean_deaths /= static_cast<double>(config.replicates);
    sweep.push_back(point);
  }

  CsvWriter csv(config.output_dir + "/sweep.csv",
                {"epsilon", "mean_swaps", "mean_births", "mean_deaths"});
  for (const auto& point : sweep)
    csv.write_row({format_double(point.epsilon), format_double(point.mean_swaps),
                   format_double(point.mean_births), format_double(point.mean_deaths)});

  reporter.check("dem_skeleton_mismatches", static_cast<double>(dem_mismatches), "==", 0.0);

  if (sweep.size() >= 2) {
    const double tolerance = config.threshold_or("scaling_tolerance", 0.10);
    double worst = 0.0;
    for (std::size_t e = 1; e < sweep.size(); ++e) {
      if (sweep[0].mean_swaps <= 0.0) continue;
      const double expected = sweep[0].epsilon / sweep[e].epsilon;
      const double observed = sweep[e].mean_swaps / sweep[0].mean_swaps;
      worst = std::max(worst, std::abs(observed / expected - 1.0));
    }
    reporter.check("swap_scaling_relative_error", worst, "<=", tolerance);

    PlotSeries scaling{"mean swap count", {}};
    for (const auto& point : sweep) scaling.points.push_back({1.0 / point.epsilon,
                                                              std::max(point.mean_swaps, 1e-12)});
    emit_plot(config.output_dir + "/swap_scaling.svg", {scaling},
              {"swap count scaling", "1/epsilon", "mean swaps", true, true});
  } else {
    reporter.info("degenerate_sweep_single_epsilon", 1.0);
  }

  reporter.result.experiment = "two-timescale-sweep";
  return reporter.result;
}

// ---------------------------------------------------------------------------

ExperimentResult occupation_vs_invariant(const ExperimentConfig& config) {
  if (config.env_kind != ExperimentConfig::EnvKind::Constant)
    throw std::invalid_argument(
        "occupation-vs-invariant verifies frozen environments; use a constant environment");

  for (std::size_t e = 1; e < config.epsilons.size(); ++e)
    if (!(config.epsilons[e] < config.epsilons[e - 1]))
      throw std::invalid_argument(
          "occupation-vs-invariant expects strictly decreasing epsilons");

  Reporter reporter;
  const std::int64_t n = config.occupation_size.value_or(aggregate(config.z0));
  const Regime& regime = config.base_regime;

  // Reference law on U_n: closed form for the toy model, solver otherwise.
  InvariantKernel reference;
  if (config.model_name == "toy") {
    const auto params = toy_params_from_regime(regime);
    reference = toy_invariant(params.alpha(), n);
  } else {
    reference = stationary_distribution(build_swap_generator(*config.model, regime, 0.0, n));
  }
  const auto generator = build_swap_generator(*config.model, regime, 0.0, n);

  RandomSource source(config.seed);
  EngineOptions engine_options;
  engine_options.verify = config.verify;
  std::vector<double> tvs;
  CsvWriter kernels(config.output_dir + "/kernels.csv",
                    [&] {
                      std::vector<std::string> header{"epsilon", "n", "state_index"};
                      for (int c = 1; c <= config.subgroups; ++c)
                        header.push_back("z_" + std::to_string(c));
                      header.push_back("weight");
                      header.push_back("reference");
                      return header;
                    }());

  double final_residual = 0.0;
  for (double epsilon : config.epsilons) {
    TwoTimescaleConfig two;
    two.model = config.model;
    two.epsilon = epsilon;
    two.horizon = config.horizon;
    const auto scaled = scale_swap_intensities(config.model, epsilon);

    OccupationOptions options;
    options.burn_in_expected_swaps = config.burn_in_factor / epsilon;

    std::vector<OccupationAccumulator> partial(
        static_cast<std::size_t>(config.replicates),
        OccupationAccumulator(config.subgroups, Weighting::Uniform));
    parallel_replicates(config.replicates, resolve_threads(config.threads),
                        [&](std::int64_t rep) {
                          const auto env =
                              config.make_environment(source, static_cast<std::uint64_t>(rep));
                          const auto run = simulate_two_timescale(
                              two, env, config.z0, source, static_cast<std::uint64_t>(rep),
                              engine_options);
                          partial[static_cast<std::size_t>(rep)].add_path(
                              run.path, *scaled, env, 0.0, config.horizon, options);
                        });
    OccupationAccumulator pooled(config.subgroups, Weighting::Uniform);
    for (const auto& acc : partial) pooled.merge(acc);

    const auto kernel = pooled.kernel(n);
    const double tv = tv_distance(kernel.weights, reference.probabilities);
    tvs.push_back(tv);
    reporter.info("tv_eps_" + eps_tag(epsilon), tv);

    for (std::size_t a = 0; a < kernel.weights.size(); ++a) {
      std::vector<std::string> row{format_double(epsilon), std::to_string(n),
                                   std::to_string(a)};
      for (auto v : kernel.states->state(a)) row.push_back(std::to_string(v));
      row.push_back(format_double(kernel.weights[a]));
      row.push_back(format_double(reference.probabilities[a]));
      kernels.write_row(row);
    }

    if (epsilon == *std::min_element(config.epsilons.begin(), config.epsilons.end())) {
      const auto residual = averaging_residual(kernel, generator);
      for (double r : residual) final_residual = std::max(final_residual, std::abs(r));
    }
  }

  const double slack = config.threshold_or("monotone_slack", 0.02);
  double worst_step = 0.0;
  for (std::size_t e = 1; e < tvs.size(); ++e)
    worst_step = std::max(worst_step, tvs[e] - tvs[e - 1]);
  if (tvs.size() >= 2) {
    reporter.check("tv_monotone_worst_step", worst_step, "<=", slack);
    reporter.check("tv_overall_decrease", tvs.back(), "<", tvs.front());
  }
  reporter.check("tv_at_smallest_epsilon", tvs.back(),
                 "<=", config.threshold_or("tv_at_smallest_epsilon", 0.05));
  reporter.check("max_averaging_residual", final_residual,
                 "<=", config.threshold_or("max_averaging_residual", 0.1));

  PlotSeries curve{"TV(occupation, invariant)", {}};
  for (std::size_t e = 0; e < config.epsilons.size(); ++e)
    curve.points.push_back({config.epsilons[e], std::max(tvs[e], 1e-12)});
  emit_plot(config.output_dir + "/tv_vs_eps.svg", {curve},
            {"occupation kernel convergence", "epsilon", "TV distance", true, true});

  reporter.result.experiment = "occupation-vs-invariant";
  return reporter.result;
}

// ---------------------------------------------------------------------------

ExperimentResult limit_process_convergence(const ExperimentConfig& config) {
  Reporter reporter;
  const double T = config.horizon;
  const std::int64_t n0 = aggregate(config.z0);

  using Pair = std::array<std::int64_t, 2>;
  EngineOptions options;
  options.verify = config.verify;

  // Limit-process sample on an independent master seed.
  RandomSource limit_source(config.seed + 1);
  KernelCache cache;
  std::vector<Pair> limit_counts(static_cast<std::size_t>(config.replicates));
  parallel_replicates(config.replicates, resolve_threads(config.threads), [&](std::int64_t rep) {
    const auto env = config.make_environment(limit_source, static_cast<std::uint64_t>(rep));
    const auto path = simulate_limit_process(*config.model, env, n0, T, limit_source,
                                             static_cast<std::uint64_t>(rep), cache, options);
    limit_counts[static_cast<std::size_t>(rep)] = {path.birth_count_at(T),
                                                   path.death_count_at(T)};
  });

  RandomSource source(config.seed);
  CsvWriter joint(config.output_dir + "/joint_counts.csv",
                  {"source", "births", "deaths", "count"});
  {
    std::map<Pair, std::int64_t> histogram;
    for (const auto& c : limit_counts) histogram[c]++;
    for (const auto& [key, count] : histogram)
      joint.write_row({"limit", std::to_string(key[0]), std::to_string(key[1]),
                       std::to_string(count)});
  }

  // Invariant kernels backing the limit process, per regime and size.
  {
    std::int64_t max_n = n0;
    for (const auto& c : limit_counts) max_n = std::max(max_n, n0 + c[0]);
    CsvWriter kernels(config.output_dir + "/invariant_kernels.csv",
                      [&] {
                        std::vector<std::string> header{"regime", "n", "state_index"};
                        for (int c = 1; c <= config.subgroups; ++c)
                          header.push_back("z_" + std::to_string(c));
                        header.push_back("probability");
                        return header;
                      }());
    const std::vector<Regime> table =
        config.env_kind == ExperimentConfig::EnvKind::Constant
            ? std::vector<Regime>{config.base_regime}
            : config.env_regimes;
    for (const auto& regime : table) {
      for (std::int64_t n = 0; n <= max_n; ++n) {
        const auto kernel =
            stationary_distribution(build_swap_generator(*config.model, regime, 0.0, n));
        for (std::size_t a = 0; a < kernel.probabilities.size(); ++a) {
          std::vector<std::string> row{regime.id, std::to_string(n), std::to_string(a)};
          for (auto v : kernel.states->state(a)) row.push_back(std::to_string(v));
          row.push_back(format_double(kernel.probabilities[a]));
          kernels.write_row(row);
        }
      }
    }
  }

  std::vector<double> tvs;
  for (double epsilon : config.epsilons) {
    TwoTimescaleConfig two;
    two.model = config.model;
    two.epsilon = epsilon;
    two.horizon = T;
    std::vector<Pair> counts(static_cast<std::size_t>(config.replicates));
    parallel_replicates(config.replicates, resolve_threads(config.threads),
                        [&](std::int64_t rep) {
                          const auto env =
                              config.make_environment(source, static_cast<std::uint64_t>(rep));
                          const auto run = simulate_two_timescale(
                              two, env, config.z0, source, static_cast<std::uint64_t>(rep),
                              options);
                          counts[static_cast<std::size_t>(rep)] = {run.path.birth_count_at(T),
                                                                   run.path.death_count_at(T)};
                        });
    const double tv = tv_distance_joint(std::span(counts), std::span(limit_counts));
    tvs.push_back(tv);
    reporter.info("tv_joint_eps_" + eps_tag(epsilon), tv);

    std::map<Pair, std::int64_t> histogram;
    for (const auto& c : counts) histogram[c]++;
    for (const auto& [key, count] : histogram)
      joint.write_row({"eps_" + eps_tag(epsilon), std::to_string(key[0]),
                       std::to_string(key[1]), std::to_string(count)});
  }

  const auto smallest =
      std::min_element(config.epsilons.begin(), config.epsilons.end()) -
      config.epsilons.begin();
  const auto largest =
      std::max_element(config.epsilons.begin(), config.epsilons.end()) -
      config.epsilons.begin();
  reporter.check("tv_joint_at_smallest_epsilon", tvs[static_cast<std::size_t>(smallest)],
                 "<=", config.threshold_or("tv_limit", 0.05));
  if (config.epsilons.size() >= 2)
    reporter.check("tv_strictly_ordered", tvs[static_cast<std::size_t>(smallest)], "<",
                   tvs[static_cast<std::size_t>(largest)]);

  PlotSeries curve{"TV(two-timescale, limit)", {}};
  for (std::size_t e = 0; e < config.epsilons.size(); ++e)
    curve.points.push_back({config.epsilons[e], std::max(tvs[e], 1e-12)});
  emit_plot(config.output_dir + "/tv_limit.svg", {curve},
            {"limit process convergence", "epsilon", "TV distance", true, false});

  reporter.result.experiment = "limit-process-convergence";
  return reporter.result;
}

// ---------------------------------------------------------------------------

ExperimentResult toy_verify(const ExperimentConfig& config) {
  if (config.model_name != "toy")
    throw std::invalid_argument("toy-verify requires the toy model");

  Reporter reporter;
  const auto max_n = static_cast<std::int64_t>(config.threshold_or("max_size", 30.0));
  const std::vector<double> alphas{0.1, 0.5, 1.0, 2.0, 10.0};
  auto model = make_toy_model();

  CsvWriter kernels(config.output_dir + "/kernels.csv",
                    {"alpha", "n", "state_index", "z_1", "z_2", "solver", "exact"});
  std::vector<PlotSeries> series;
  double overall = 0.0;
  for (double alpha : alphas) {
    ToyParams params;
    params.k12 = alpha;
    params.k21 = 1.0;
    const Regime regime = params.to_regime();
    PlotSeries curve{"alpha=" + format_double(alpha), {}};
    double worst_for_alpha = 0.0;
    for (std::int64_t n = 1; n <= max_n; ++n) {
      const auto solved = stationary_distribution(build_swap_generator(*model, regime, 0.0, n));
      const auto exact = toy_invariant(alpha, n);
      double worst = 0.0;
      for (std::size_t a = 0; a < exact.probabilities.size(); ++a) {
        worst = std::max(worst,
                         std::abs(solved.probabilities[a] - exact.probabilities[a]));
        kernels.write_row({format_double(alpha), std::to_string(n), std::to_string(a),
                           std::to_string(exact.states->state(a)[0]),
                           std::to_string(exact.states->state(a)[1]),
                           format_double(solved.probabilities[a]),
                           format_double(exact.probabilities[a])});
      }
      curve.points.push_back({static_cast<double>(n), std::max(worst, 1e-18)});
      worst_for_alpha = std::max(worst_for_alpha, worst);
    }
    overall = std::max(overall, worst_for_alpha);
    reporter.check("max_abs_error_alpha_" + eps_tag(alpha), worst_for_alpha,
                   "<=", config.threshold_or("max_componentwise_error", 1e-10));
    series.push_back(std::move(curve));
  }
  reporter.info("max_abs_error_overall", overall);
  emit_plot(config.output_dir + "/solver_error.svg", series,
            {"solver vs closed form", "n", "max abs error", false, true});

  reporter.result.experiment = "toy-verify";
  return reporter.result;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
  fs::create_directories(config.output_dir);
  ExperimentResult result;
  if (config.experiment == "domination-demo") result = domination_demo(config);
  else if (config.experiment == "thinning-vs-oracle") result = thinning_vs_oracle(config);
  else if (config.experiment == "martingale-check") result = martingale_check(config);
  else if (config.experiment == "two-timescale-sweep") result = two_timescale_sweep(config);
  else if (config.experiment == "occupation-vs-invariant")
    result = occupation_vs_invariant(config);
  else if (config.experiment == "limit-process-convergence")
    result = limit_process_convergence(config);
  else if (config.experiment == "toy-verify") result = toy_verify(config);
  else throw std::invalid_argument("unknown experiment: " + config.experiment);
  write_report(config, result);
  return result;
}

}  // namespace bds::tools
