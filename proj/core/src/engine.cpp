#include "bds/engine.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>

#include "bds/level_set.hpp"

namespace bds {

namespace {

constexpr double kRateSlack = 1.0 + 1e-9;

void require_feller(const IntensityModel& model, const EngineOptions& options) {
  if (model.growth_class() == GrowthClass::UserAsserted && !options.user_asserts_feller)
    throw ModelViolationError(
        "model '" + model.name() +
        "' declares an uncertified growth class; set user_asserts_feller to simulate");
}

// Simulates one group of dominating components with rates that are constant
// between the supplied boundaries (regime switches and, for deaths/swaps,
// birth jumps). `rate_of` sees the number of boundary birth events consumed
// so far. Rates are refreshed after every recorded jump when
// self_exciting is set (birth components feed back on their own count).
struct ComponentGroup {
  std::vector<EventType> components;
  bool self_exciting{false};
};

void run_stage(const ComponentGroup& group, const EnvironmentPath& env, double horizon,
               const std::vector<double>& birth_times, bool follow_births,
               const std::function<double(const Regime&, double, const EventType&, std::int64_t)>&
                   rate_of,
               std::int64_t n0, RngStream& rng, std::size_t max_records,
               std::vector<SkeletonRecord>& out) {
  double t = 0.0;
  std::size_t seg = 0;
  std::size_t next_birth = 0;
  std::int64_t own_count = 0;
  std::vector<double> rates(group.components.size(), 0.0);
  while (t < horizon) {
    const double switch_end = seg + 1 < env.segment_count()
                                  ? env.switch_time(seg + 1)
                                  : std::numeric_limits<double>::infinity();
    const double birth_end = follow_births && next_birth < birth_times.size()
                                 ? birth_times[next_birth]
                                 : std::numeric_limits<double>::infinity();
    const double boundary = std::min({switch_end, birth_end, horizon});
    const Regime& regime = env.regime_of_segment(seg);
    const std::int64_t consumed_births =
        follow_births ? static_cast<std::int64_t>(next_birth) : own_count;
    const std::int64_t n = n0 + consumed_births;

    double total = 0.0;
    for (std::size_t k = 0; k < rates.size(); ++k) {
      const double r = rate_of(regime, t, group.components[k], n);
      if (!(r >= 0.0) || !std::isfinite(r))
        throw ModelViolationError("dominating rate " + std::to_string(r) + " for " +
                                  to_string(group.components[k]));
      rates[k] = r;
      total += r;
    }

    double jump_at = std::numeric_limits<double>::infinity();
    if (total > 0.0) jump_at = t + rng.exponential(total);

    if (jump_at >= boundary) {
      t = boundary;
      if (boundary == switch_end) ++seg;
      if (boundary == birth_end) ++next_birth;
      continue;
    }

    t = jump_at;
    const std::size_t k = rng.pick(rates, total);
    const double mark = rng.uniform_open01() * rates[k];
    out.push_back({t, mark, rates[k], group.components[k]});
    if (group.self_exciting) ++own_count;
    if (out.size() > max_records)
      throw ExplosionError("skeleton record cap exceeded in stage for " +
                               to_string(group.components[0]),
                           JumpSkeleton{});
  }
}

}  // namespace

JumpSkeleton simulate_dominating(const IntensityModel& model, const EnvironmentPath& env,
                                 const PopulationState& z0, double horizon,
                                 const RandomSource& source, std::uint64_t replicate,
                                 const EngineOptions& options) {
  require_feller(model, options);
  const int p = model.subgroups();
  if (static_cast<int>(z0.size()) != p)
    throw std::invalid_argument("simulate_dominating: z0 dimension mismatch");
  if (!(horizon >= 0.0) || !std::isfinite(horizon))
    throw std::invalid_argument("simulate_dominating: bad horizon");

  JumpSkeleton skeleton;
  skeleton.subgroups = p;
  skeleton.horizon = horizon;
  skeleton.initial_aggregate = aggregate(z0);

  ComponentGroup births;
  births.self_exciting = true;
  for (int j = 0; j < p; ++j) births.components.push_back(EventType::birth(j));

  std::vector<SkeletonRecord> birth_records;
  try {
    RngStream rng = source.stream("dom-birth", replicate);
    run_stage(
        births, env, horizon, {}, false,
        [&](const Regime& regime, double t, const EventType& ev, std::int64_t n) {
          return model.birth_bound(regime, t, ev.dest, n);
        },
        skeleton.initial_aggregate, rng, options.max_records, birth_records);
  } catch (ExplosionError&) {
    skeleton.records = std::move(birth_records);
    throw ExplosionError("dominating birth process exceeded the record cap",
                         std::move(skeleton));
  }

  std::vector<double> birth_times;
  birth_times.reserve(birth_records.size());
  for (const auto& rec : birth_records) birth_times.push_back(rec.time);

  auto sup_rate = [&](const Regime& regime, double t, const EventType& ev, std::int64_t n) {
    return model.sup_by_size(regime, t, ev, n);
  };

  ComponentGroup deaths;
  for (int i = 0; i < p; ++i) deaths.components.push_back(EventType::death(i));
  ComponentGroup swaps;
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j)
      if (i != j) swaps.components.push_back(EventType::swap(i, j));

  std::vector<SkeletonRecord> other_records;
  try {
    RngStream rng = source.stream("dom-death", replicate);
    run_stage(deaths, env, horizon, birth_times, true, sup_rate, skeleton.initial_aggregate,
              rng, options.max_records, other_records);
    RngStream swap_rng = source.stream("dom-swap", replicate);
    run_stage(swaps, env, horizon, birth_times, true, sup_rate, skeleton.initial_aggregate,
              swap_rng, options.max_records, other_records);
  } catch (ExplosionError&) {
    skeleton.records = std::move(birth_records);
    for (auto& rec : other_records) skeleton.records.push_back(rec);
    std::sort(skeleton.records.begin(), skeleton.records.end(),
              [](const SkeletonRecord& a, const SkeletonRecord& b) { return a.time < b.time; });
    throw ExplosionError("dominating death/swap components exceeded the record cap",
                         std::move(skeleton));
  }

  skeleton.records = std::move(birth_records);
  skeleton.records.insert(skeleton.records.end(), other_records.begin(), other_records.end());
  std::sort(skeleton.records.begin(), skeleton.records.end(),
            [](const SkeletonRecord& a, const SkeletonRecord& b) { return a.time < b.time; });
  if (skeleton.records.size() > options.max_records)
    throw ExplosionError("skeleton record cap exceeded", std::move(skeleton));
  return skeleton;
}

ThinTrace thin_to_bds_traced(const JumpSkeleton& skeleton, const IntensityModel& model,
                             const EnvironmentPath& env, const PopulationState& z0,
                             const EngineOptions& options) {
  if (static_cast<int>(z0.size()) != skeleton.subgroups)
    throw std::invalid_argument("thin_to_bds: z0 dimension mismatch");

  ThinTrace trace;
  trace.path.initial_state = z0;
  trace.path.horizon = skeleton.horizon;
  trace.accepted.assign(skeleton.records.size(), 0);

  PopulationState z = z0;
  std::size_t seg = 0;  // segment in force just before the current record
  for (std::size_t idx = 0; idx < skeleton.records.size(); ++idx) {
    const SkeletonRecord& rec = skeleton.records[idx];
    while (seg + 1 < env.segment_count() && env.switch_time(seg + 1) < rec.time) ++seg;
    const Regime& regime = env.regime_of_segment(seg);

    if (rec.mark > rec.rate * kRateSlack || !(rec.mark > 0.0))
      throw CorruptedSkeletonError("skeleton mark " + std::to_string(rec.mark) +
                                   " outside ]0, " + std::to_string(rec.rate) + "]");

    const double mu = model.rate(regime, rec.time, z, rec.event);
    if (!(mu >= 0.0) || !std::isfinite(mu))
      throw ModelViolationError("model '" + model.name() + "' returned rate " +
                                std::to_string(mu) + " at t=" + std::to_string(rec.time));
    if (options.verify && mu > rec.rate * kRateSlack)
      throw DominationViolationError("rate " + std::to_string(mu) +
                                     " exceeds skeleton dominating rate " +
                                     std::to_string(rec.rate) + " for " + to_string(rec.event));

    if (rec.mark <= mu) {
      // A positive rate out of an empty subgroup is a model defect, not an
      // engine state to tolerate.
      if (rec.event.kind != EventKind::Birth &&
          z[static_cast<std::size_t>(rec.event.source)] == 0)
        throw ModelViolationError("support condition violated at t=" +
                                  std::to_string(rec.time) + " for " + to_string(rec.event));
      apply_event(z, rec.event);
      trace.path.events.push_back({rec.time, rec.event});
      trace.accepted[idx] = 1;
    }
  }
  return trace;
}

BdsPath thin_to_bds(const JumpSkeleton& skeleton, const IntensityModel& model,
                    const EnvironmentPath& env, const PopulationState& z0,
                    const EngineOptions& options) {
  return thin_to_bds_traced(skeleton, model, env, z0, options).path;
}

BdsRun simulate_bds(const IntensityModel& model, const EnvironmentPath& env,
                    const PopulationState& z0, double horizon, const RandomSource& source,
                    std::uint64_t replicate, const EngineOptions& options) {
  BdsRun run;
  run.skeleton = simulate_dominating(model, env, z0, horizon, source, replicate, options);
  run.path = thin_to_bds(run.skeleton, model, env, z0, options);
  run.path.master_seed = source.master_seed();
  run.path.replicate = replicate;
  return run;
}

namespace {

// Samples the asserted strong order between a dominated and a dominating
// model: componentwise rate order at equal states plus ordering of the
// declared dominators over a range of sizes.
void verify_strong_order(const IntensityModel& low, const IntensityModel& high,
                         const EnvironmentPath& env, std::int64_t max_size, RngStream& rng) {
  const EventSpace space(low.subgroups());
  for (const Regime& regime : env.regime_table()) {
    for (std::int64_t n = 0; n <= max_size; ++n) {
      for (int j = 0; j < low.subgroups(); ++j) {
        const double lo = low.birth_bound(regime, 0.0, j, n);
        const double hi = high.birth_bound(regime, 0.0, j, n);
        if (lo > hi * kRateSlack)
          throw StrongOrderViolationError(
              "birth dominators not ordered",
              "birth_bound j=" + std::to_string(j + 1) + " n=" + std::to_string(n) + ": " +
                  std::to_string(lo) + " > " + std::to_string(hi));
      }
      for (int k = 0; k < space.size(); ++k) {
        const EventType& ev = space.event(k);
        if (ev.kind == EventKind::Birth) continue;
        const double lo = low.sup_by_size(regime, 0.0, ev, n);
        const double hi = high.sup_by_size(regime, 0.0, ev, n);
        if (lo > hi * kRateSlack)
          throw StrongOrderViolationError(
              "sup-by-size dominators not ordered",
              to_string(ev) + " n=" + std::to_string(n) + ": " + std::to_string(lo) + " > " +
                  std::to_string(hi));
      }
    }
    for (int sample = 0; sample < 64; ++sample) {
      const auto n =
          static_cast<std::int64_t>(rng.uniform01() * static_cast<double>(max_size + 1));
      auto level = enumerate_level_set(n, low.subgroups());
      const auto& z =
          level->state(static_cast<std::size_t>(rng.uniform01() * double(level->size())));
      for (int k = 0; k < space.size(); ++k) {
        const EventType& ev = space.event(k);
        const double lo = low.rate(regime, 0.0, z, ev);
        const double hi = high.rate(regime, 0.0, z, ev);
        if (lo > hi * kRateSlack) {
          std::string state = "z=(";
          for (std::size_t c = 0; c < z.size(); ++c)
            state += (c ? "," : "") + std::to_string(z[c]);
          throw StrongOrderViolationError("rates not ordered at equal states",
                                          to_string(ev) + " " + state + "): " +
                                              std::to_string(lo) + " > " + std::to_string(hi));
        }
      }
    }
  }
}

}  // namespace

CoupledPair coupled_pair(const IntensityModel& model_low, const IntensityModel& model_high,
                         const EnvironmentPath& env, const PopulationState& z0, double horizon,
                         const RandomSource& source, std::uint64_t replicate,
                         const EngineOptions& options) {
  if (model_low.subgroups() != model_high.subgroups())
    throw std::invalid_argument("coupled_pair: dimension mismatch");
  if (options.verify) {
    RngStream rng = source.stream("order-check", replicate);
    verify_strong_order(model_low, model_high, env, aggregate(z0) + 16, rng);
  }

  CoupledPair pair;
  pair.skeleton = simulate_dominating(model_high, env, z0, horizon, source, replicate, options);
  ThinTrace high = thin_to_bds_traced(pair.skeleton, model_high, env, z0, options);

  JumpSkeleton inner;
  inner.subgroups = pair.skeleton.subgroups;
  inner.horizon = pair.skeleton.horizon;
  inner.initial_aggregate = pair.skeleton.initial_aggregate;
  for (std::size_t idx = 0; idx < pair.skeleton.records.size(); ++idx)
    if (high.accepted[idx]) inner.records.push_back(pair.skeleton.records[idx]);

  pair.low = thin_to_bds(inner, model_low, env, z0, options);
  pair.high = std::move(high.path);
  pair.high.master_seed = pair.low.master_seed = source.master_seed();
  pair.high.replicate = pair.low.replicate = replicate;
  return pair;
}

DominationCheck check_strong_domination(std::span<const PathEvent> a,
                                        std::span<const PathEvent> b) {
  DominationCheck check;
  std::size_t bi = 0;
  for (const auto& ev : a) {
    while (bi < b.size() && b[bi].time < ev.time) ++bi;
    bool found = false;
    for (std::size_t k = bi; k < b.size() && b[k].time == ev.time; ++k) {
      if (b[k].event == ev.event) {
        found = true;
        break;
      }
    }
    if (!found) {
      check.dominated = false;
      check.first_violation = ev;
      return check;
    }
  }
  return check;
}

namespace {

std::vector<PathEvent> skeleton_events(const JumpSkeleton& skeleton) {
  std::vector<PathEvent> events;
  events.reserve(skeleton.records.size());
  for (const auto& rec : skeleton.records) events.push_back({rec.time, rec.event});
  return events;
}

}  // namespace

DominationCheck check_strong_domination(const BdsPath& a, const BdsPath& b) {
  return check_strong_domination(std::span(a.events), std::span(b.events));
}

DominationCheck check_strong_domination(const BdsPath& a, const JumpSkeleton& b) {
  const auto events = skeleton_events(b);
  return check_strong_domination(std::span(a.events), std::span(events));
}

DominationCheck check_strong_domination(const JumpSkeleton& a, const BdsPath& b) {
  const auto events = skeleton_events(a);
  return check_strong_domination(std::span(events), std::span(b.events));
}

DominationCheck check_strong_domination(const JumpSkeleton& a, const JumpSkeleton& b) {
  const auto ea = skeleton_events(a);
  const auto eb = skeleton_events(b);
  return check_strong_domination(std::span(ea), std::span(eb));
}

bool check_support_condition(const BdsPath& path) {
  PopulationState z = path.initial_state;
  for (const auto& ev : path.events) {
    if (ev.event.kind != EventKind::Birth && z[static_cast<std::size_t>(ev.event.source)] <= 0)
      return false;
    apply_event(z, ev.event);
  }
  return true;
}

bool check_aggregate_bound(const BdsPath& path, const JumpSkeleton& g) {
  std::int64_t z_total = aggregate(path.initial_state);
  std::int64_t bound = g.initial_aggregate;
  std::size_t gi = 0;
  for (const auto& ev : path.events) {
    while (gi < g.records.size() && g.records[gi].time <= ev.time) {
      if (g.records[gi].event.kind == EventKind::Birth) ++bound;
      ++gi;
    }
    if (ev.event.kind == EventKind::Birth) ++z_total;
    if (ev.event.kind == EventKind::Death) --z_total;
    if (z_total > bound) return false;
  }
  return true;
}

IntensityEvaluator make_intensity_evaluator(const IntensityModel& model,
                                            const EnvironmentPath& env) {
  return [&model, &env](double t, const PopulationState& z, const EventType& ev) {
    return model.rate(env.regime_before(t), t, z, ev);
  };
}

BdsPath reconstruct_by_ratio(const BdsPath& x, const BdsPath& y, const IntensityEvaluator& lambda_x,
                             const IntensityEvaluator& lambda_y, const RandomSource& source,
                             std::uint64_t replicate) {
  if (x.initial_state != y.initial_state)
    throw DominationPreconditionError("reconstruct_by_ratio: initial states differ");
  const auto subset = check_strong_domination(x, y);
  if (!subset.dominated)
    throw DominationPreconditionError("reconstruct_by_ratio: x is not dominated by y (at t=" +
                                      std::to_string(subset.first_violation->time) + ")");

  RngStream u_stream = source.stream("reconstruct-u", replicate);
  RngStream v_stream = source.stream("reconstruct-v", replicate);

  BdsPath rebuilt;
  rebuilt.initial_state = x.initial_state;
  rebuilt.horizon = x.horizon;
  rebuilt.master_seed = source.master_seed();
  rebuilt.replicate = replicate;

  PopulationState z_rebuilt = x.initial_state;
  PopulationState z_dominating = y.initial_state;
  std::size_t xi = 0;
  for (const auto& ev : y.events) {
    const double denom = lambda_y(ev.time, z_dominating, ev.event);
    if (!(denom > 0.0))
      throw DominationPreconditionError(
          "reconstruct_by_ratio: dominating intensity vanishes at one of its own jumps (t=" +
          std::to_string(ev.time) + ")");
    double ratio = lambda_x(ev.time, z_rebuilt, ev.event) / denom;
    ratio = std::clamp(ratio, 0.0, 1.0);

    const bool x_jumps = xi < x.events.size() && x.events[xi].time == ev.time &&
                         x.events[xi].event == ev.event;
    double mark;
    if (x_jumps) {
      mark = u_stream.uniform_open01() * ratio;
      ++xi;
    } else {
      mark = ratio + (1.0 - ratio) * v_stream.uniform_open01();
    }

    if (mark > 0.0 && mark <= ratio) {
      apply_event(z_rebuilt, ev.event);
      rebuilt.events.push_back(ev);
    }
    apply_event(z_dominating, ev.event);
  }
  return rebuilt;
}

CompensatorResiduals compensator_residual(const BdsPath& path, const IntensityModel& model,
                                          const EnvironmentPath& env,
                                          const std::vector<double>& checkpoints) {
  for (double t : checkpoints)
    if (t > path.horizon || t < 0.0)
      throw std::invalid_argument("compensator_residual: checkpoint beyond horizon");

  std::vector<double> sorted = checkpoints;
  std::sort(sorted.begin(), sorted.end());

  const EventSpace space(path.subgroups());
  CompensatorResiduals out;
  out.checkpoints = sorted;
  out.residuals.resize(sorted.size());

  PopulationState z = path.initial_state;
  std::vector<double> integral(static_cast<std::size_t>(space.size()), 0.0);
  std::vector<double> counts(static_cast<std::size_t>(space.size()), 0.0);

  double t = 0.0;
  std::size_t next_event = 0;
  std::size_t next_checkpoint = 0;

  auto advance_to = [&](double target) {
    // Accumulate the integral over (t, target], splitting at regime switches.
    while (t < target) {
      const std::size_t seg = env.segment_at(t);
      const double seg_end = seg + 1 < env.segment_count() ? env.switch_time(seg + 1) : target;
      const double stop = std::min(seg_end, target);
      const Regime& regime = env.regime_of_segment(seg);
      const double dt = stop - t;
      if (dt > 0.0) {
        for (int k = 0; k < space.size(); ++k)
          integral[static_cast<std::size_t>(k)] +=
              model.rate(regime, t, z, space.event(k)) * dt;
      }
      t = stop;
    }
  };

  while (next_checkpoint < sorted.size()) {
    const double ev_time = next_event < path.events.size() ? path.events[next_event].time
                                                           : std::numeric_limits<double>::infinity();
    const double cp_time = sorted[next_checkpoint];
    if (ev_time <= cp_time) {
      advance_to(ev_time);
      counts[static_cast<std::size_t>(space.index(path.events[next_event].event))] += 1.0;
      apply_event(z, path.events[next_event].event);
      ++next_event;
    } else {
      advance_to(cp_time);
      std::vector<double> residual(static_cast<std::size_t>(space.size()));
      for (int k = 0; k < space.size(); ++k)
        residual[static_cast<std::size_t>(k)] =
            counts[static_cast<std::size_t>(k)] - integral[static_cast<std::size_t>(k)];
      out.residuals[next_checkpoint] = std::move(residual);
      ++next_checkpoint;
    }
  }
  return out;
}

}  // namespace bds
