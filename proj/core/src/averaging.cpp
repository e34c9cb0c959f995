#include "bds/averaging.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stack>

namespace bds {

std::vector<double> SwapGenerator::apply_left(std::span<const double> weights) const {
  if (weights.size() != size())
    throw std::invalid_argument("SwapGenerator::apply_left: dimension mismatch");
  std::vector<double> out(size(), 0.0);
  for (std::size_t a = 0; a < size(); ++a) out[a] = weights[a] * diagonal[a];
  for (const auto& entry : off_diagonal) out[entry.col] += weights[entry.row] * entry.rate;
  return out;
}

SwapGenerator build_swap_generator(const IntensityModel& model, const Regime& regime, double t,
                                   std::int64_t n, std::size_t cap) {
  SwapGenerator gen;
  gen.n = n;
  gen.states = enumerate_level_set(n, model.subgroups(), cap);
  gen.diagonal.assign(gen.states->size(), 0.0);

  const int p = model.subgroups();
  PopulationState neighbor(static_cast<std::size_t>(p), 0);
  for (std::size_t a = 0; a < gen.states->size(); ++a) {
    const PopulationState& z = gen.states->state(a);
    for (int i = 0; i < p; ++i) {
      if (z[static_cast<std::size_t>(i)] == 0) continue;  // nothing to move
      for (int j = 0; j < p; ++j) {
        if (i == j) continue;
        const double rate = model.rate(regime, t, z, EventType::swap(i, j));
        if (!(rate >= 0.0) || !std::isfinite(rate))
          throw ModelViolationError("swap generator: bad rate " + std::to_string(rate));
        if (rate == 0.0) continue;
        neighbor = z;
        neighbor[static_cast<std::size_t>(i)] -= 1;
        neighbor[static_cast<std::size_t>(j)] += 1;
        const std::size_t b = gen.states->index_of(neighbor);
        gen.off_diagonal.push_back({a, b, rate});
        gen.diagonal[a] -= rate;
      }
    }
  }
  return gen;
}

namespace {

// Closed communicating classes of the positive-rate digraph via iterative
// Tarjan SCC. Returns the members of each SCC with no edge leaving it.
std::vector<std::vector<std::size_t>> closed_classes(const SwapGenerator& gen) {
  const std::size_t m = gen.size();
  std::vector<std::vector<std::size_t>> adjacency(m);
  for (const auto& entry : gen.off_diagonal) adjacency[entry.row].push_back(entry.col);

  std::vector<int> index(m, -1), lowlink(m, 0), component(m, -1);
  std::vector<char> on_stack(m, 0);
  std::stack<std::size_t> stack;
  int next_index = 0;
  int component_count = 0;

  struct Frame {
    std::size_t node;
    std::size_t edge;
  };
  for (std::size_t root = 0; root < m; ++root) {
    if (index[root] != -1) continue;
    std::stack<Frame> call;
    call.push({root, 0});
    index[root] = lowlink[root] = next_index++;
    stack.push(root);
    on_stack[root] = 1;
    while (!call.empty()) {
      Frame& frame = call.top();
      if (frame.edge < adjacency[frame.node].size()) {
        const std::size_t next = adjacency[frame.node][frame.edge++];
        if (index[next] == -1) {
          index[next] = lowlink[next] = next_index++;
          stack.push(next);
          on_stack[next] = 1;
          call.push({next, 0});
        } else if (on_stack[next]) {
          lowlink[frame.node] = std::min(lowlink[frame.node], index[next]);
        }
      } else {
        if (lowlink[frame.node] == index[frame.node]) {
          while (true) {
            const std::size_t w = stack.top();
            stack.pop();
            on_stack[w] = 0;
            component[w] = component_count;
            if (w == frame.node) break;
          }
          ++component_count;
        }
        const std::size_t done = frame.node;
        call.pop();
        if (!call.empty())
          lowlink[call.top().node] = std::min(lowlink[call.top().node], lowlink[done]);
      }
    }
  }

  std::vector<char> closed(static_cast<std::size_t>(component_count), 1);
  for (const auto& entry : gen.off_diagonal)
    if (component[entry.row] != component[entry.col])
      closed[static_cast<std::size_t>(component[entry.row])] = 0;

  std::vector<std::vector<std::size_t>> classes(static_cast<std::size_t>(component_count));
  for (std::size_t a = 0; a < m; ++a)
    classes[static_cast<std::size_t>(component[a])].push_back(a);

  std::vector<std::vector<std::size_t>> result;
  for (std::size_t c = 0; c < classes.size(); ++c)
    if (closed[c]) result.push_back(std::move(classes[c]));
  return result;
}

}  // namespace

InvariantKernel stationary_distribution(const SwapGenerator& generator,
                                        double residual_tolerance) {
  const std::size_t m = generator.size();
  auto classes = closed_classes(generator);
  if (classes.size() != 1)
    throw UniquenessFailureError("stationary_distribution: " + std::to_string(classes.size()) +
                                 " closed communicating classes on U_" +
                                 std::to_string(generator.n) +
                                 "; the invariant kernel is not unique");

  const auto& members = classes.front();
  const std::size_t mc = members.size();
  std::vector<std::size_t> global_to_local(m, SIZE_MAX);
  for (std::size_t local = 0; local < mc; ++local) global_to_local[members[local]] = local;

  // L^T restricted to the closed class, last balance row replaced by the
  // normalization sum pi = 1.
  std::vector<Eigen::Triplet<double>> triplets;
  for (const auto& entry : generator.off_diagonal) {
    const std::size_t r = global_to_local[entry.row];
    const std::size_t c = global_to_local[entry.col];
    if (r == SIZE_MAX || c == SIZE_MAX) continue;  // closed class: r in => c in
    if (c + 1 != mc) triplets.emplace_back(static_cast<int>(c), static_cast<int>(r), entry.rate);
  }
  for (std::size_t local = 0; local < mc; ++local) {
    if (local + 1 != mc)
      triplets.emplace_back(static_cast<int>(local), static_cast<int>(local),
                            generator.diagonal[members[local]]);
    triplets.emplace_back(static_cast<int>(mc - 1), static_cast<int>(local), 1.0);
  }

  Eigen::SparseMatrix<double> system(static_cast<int>(mc), static_cast<int>(mc));
  system.setFromTriplets(triplets.begin(), triplets.end());
  system.makeCompressed();

  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<int>(mc));
  rhs[static_cast<int>(mc - 1)] = 1.0;

  Eigen::SparseLU<Eigen::SparseMatrix<double>> solver;
  solver.compute(system);
  Eigen::VectorXd solution;
  if (solver.info() == Eigen::Success) solution = solver.solve(rhs);
  if (solver.info() != Eigen::Success || solution.size() == 0) {
    Eigen::MatrixXd dense(system);
    solution = dense.colPivHouseholderQr().solve(rhs);
  }

  InvariantKernel kernel;
  kernel.n = generator.n;
  kernel.states = generator.states;
  kernel.probabilities.assign(m, 0.0);
  double sum = 0.0;
  for (std::size_t local = 0; local < mc; ++local) {
    double v = solution[static_cast<int>(local)];
    if (v < -1e-9)
      throw SimulationError("stationary_distribution: ill-conditioned solve on U_" +
                            std::to_string(generator.n) + " (negative mass " +
                            std::to_string(v) + ")");
    if (v < 0.0) v = 0.0;
    kernel.probabilities[members[local]] = v;
    sum += v;
  }
  if (!(sum > 0.0) || !std::isfinite(sum))
    throw SimulationError("stationary_distribution: degenerate solve on U_" +
                          std::to_string(generator.n));
  for (auto& v : kernel.probabilities) v /= sum;

  const auto residual = generator.apply_left(kernel.probabilities);
  double norm = 0.0;
  for (double r : residual) norm = std::max(norm, std::abs(r));
  kernel.residual_norm = norm;
  if (norm > residual_tolerance)
    throw SimulationError("stationary_distribution: residual " + std::to_string(norm) +
                          " above tolerance on U_" + std::to_string(generator.n));
  return kernel;
}

AveragedIntensity averaged_intensity(const InvariantKernel& kernel, const IntensityModel& model,
                                     const Regime& regime, double t) {
  const int p = model.subgroups();
  AveragedIntensity avg;
  avg.birth.assign(static_cast<std::size_t>(p), 0.0);
  avg.death.assign(static_cast<std::size_t>(p), 0.0);
  for (std::size_t a = 0; a < kernel.states->size(); ++a) {
    const double w = kernel.probabilities[a];
    if (w == 0.0) continue;
    const PopulationState& z = kernel.states->state(a);
    for (int j = 0; j < p; ++j) {
      avg.birth[static_cast<std::size_t>(j)] += w * model.rate(regime, t, z, EventType::birth(j));
      avg.death[static_cast<std::size_t>(j)] += w * model.rate(regime, t, z, EventType::death(j));
    }
  }
  for (int j = 0; j < p; ++j) {
    avg.birth_aggregate += avg.birth[static_cast<std::size_t>(j)];
    avg.death_aggregate += avg.death[static_cast<std::size_t>(j)];
  }
  return avg;
}

std::shared_ptr<const InvariantKernel> KernelCache::get(const IntensityModel& model,
                                                        const Regime& regime, int regime_index,
                                                        double t, std::int64_t n) {
  const auto key = std::make_pair(regime_index, n);
  {
    std::shared_lock lock(mutex_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }
  auto kernel = std::make_shared<const InvariantKernel>(
      stationary_distribution(build_swap_generator(model, regime, t, n)));
  std::unique_lock lock(mutex_);
  auto [it, inserted] = cache_.emplace(key, std::move(kernel));
  return it->second;
}

std::int64_t AggregatePath::size_at(double t) const {
  std::int64_t x = initial_size;
  for (const auto& ev : events) {
    if (ev.time > t) break;
    if (ev.event.kind == EventKind::Birth) ++x;
    if (ev.event.kind == EventKind::Death) --x;
  }
  return x;
}

std::int64_t AggregatePath::birth_count_at(double t) const {
  std::int64_t count = 0;
  for (const auto& ev : events) {
    if (ev.time > t) break;
    if (ev.event.kind == EventKind::Birth) ++count;
  }
  return count;
}

std::int64_t AggregatePath::death_count_at(double t) const {
  std::int64_t count = 0;
  for (const auto& ev : events) {
    if (ev.time > t) break;
    if (ev.event.kind == EventKind::Death) ++count;
  }
  return count;
}

namespace {

// Demographic surface of a model with all swap activity stripped; drives the
// limit-process skeleton.
class DemographicOnly final : public IntensityModel {
 public:
  explicit DemographicOnly(const IntensityModel& base) : base_(base) {}

  std::string name() const override { return base_.name() + "-demographic"; }
  int subgroups() const override { return base_.subgroups(); }

  double rate(const Regime& regime, double t, const PopulationState& z,
              const EventType& ev) const override {
    if (ev.kind == EventKind::Swap) return 0.0;
    return base_.rate(regime, t, z, ev);
  }

  double birth_bound(const Regime& regime, double t, int j, std::int64_t n) const override {
    return base_.birth_bound(regime, t, j, n);
  }

  double sup_by_size(const Regime& regime, double t, const EventType& ev,
                     std::int64_t n) const override {
    if (ev.kind == EventKind::Swap) return 0.0;
    return base_.sup_by_size(regime, t, ev, n);
  }

  GrowthClass growth_class() const override { return base_.growth_class(); }

 private:
  const IntensityModel& base_;
};

}  // namespace

AggregatePath simulate_limit_process(const IntensityModel& model, const EnvironmentPath& env,
                                     std::int64_t initial_size, double horizon,
                                     const RandomSource& source, std::uint64_t replicate,
                                     KernelCache& cache, const EngineOptions& options) {
  if (initial_size < 0) throw std::invalid_argument("simulate_limit_process: negative size");
  const DemographicOnly demographic(model);
  PopulationState z0(static_cast<std::size_t>(model.subgroups()), 0);
  z0[0] = initial_size;  // only the aggregate enters the demographic dominators
  const JumpSkeleton skeleton =
      simulate_dominating(demographic, env, z0, horizon, source, replicate, options);

  AggregatePath path;
  path.initial_size = initial_size;
  path.horizon = horizon;

  std::int64_t x = initial_size;
  std::size_t seg = 0;
  for (const auto& rec : skeleton.records) {
    while (seg + 1 < env.segment_count() && env.switch_time(seg + 1) < rec.time) ++seg;
    const Regime& regime = env.regime_of_segment(seg);
    const int regime_index = env.regime_index_of_segment(seg);
    const auto kernel = cache.get(model, regime, regime_index, rec.time, x);
    const AveragedIntensity rates = averaged_intensity(*kernel, model, regime, rec.time);
    const double mu = rec.event.kind == EventKind::Birth
                          ? rates.birth[static_cast<std::size_t>(rec.event.dest)]
                          : rates.death[static_cast<std::size_t>(rec.event.source)];
    if (options.verify && mu > rec.rate * (1.0 + 1e-9))
      throw DominationViolationError("averaged rate exceeds demographic dominator at t=" +
                                     std::to_string(rec.time));
    if (rec.mark <= mu) {
      x += rec.event.kind == EventKind::Birth ? 1 : -1;
      path.events.push_back({rec.time, rec.event});
    }
  }
  return path;
}

}  // namespace bds
