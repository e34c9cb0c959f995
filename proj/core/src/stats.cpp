#include "bds/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bds {

BdsPath oracle_simulate(const IntensityModel& model, const EnvironmentPath& env,
                        const PopulationState& z0, double horizon, const RandomSource& source,
                        std::uint64_t replicate, std::size_t max_events) {
  const EventSpace space(model.subgroups());
  RngStream rng = source.stream("oracle", replicate);

  BdsPath path;
  path.initial_state = z0;
  path.horizon = horizon;
  path.master_seed = source.master_seed();
  path.replicate = replicate;

  PopulationState z = z0;
  double t = 0.0;
  std::size_t seg = 0;
  while (t < horizon) {
    const double seg_end = seg + 1 < env.segment_count()
                               ? std::min(env.switch_time(seg + 1), horizon)
                               : horizon;
    const auto rates = evaluate(model, space, env.regime_of_segment(seg), t, z);
    double total = 0.0;
    for (double r : rates) total += r;
    if (!(total > 0.0)) {
      t = seg_end;
      if (seg + 1 < env.segment_count() && seg_end == env.switch_time(seg + 1)) ++seg;
      continue;
    }
    const double jump_at = t + rng.exponential(total);
    if (jump_at >= seg_end) {
      t = seg_end;
      if (seg + 1 < env.segment_count() && seg_end == env.switch_time(seg + 1)) ++seg;
      continue;
    }
    t = jump_at;
    const std::size_t k = rng.pick(rates, total);
    const EventType& ev = space.event(static_cast<int>(k));
    apply_event(z, ev);
    path.events.push_back({t, ev});
    if (path.events.size() > max_events)
      throw SimulationError("oracle_simulate: event cap exceeded");
  }
  return path;
}

namespace {

template <typename Key>
std::map<Key, double> frequencies(std::span<const Key> samples) {
  std::map<Key, double> freq;
  for (const auto& v : samples) freq[v] += 1.0;
  const double n = static_cast<double>(samples.size());
  for (auto& [_, c] : freq) c /= n;
  return freq;
}

template <typename Key>
double tv_of_maps(const std::map<Key, double>& pa, const std::map<Key, double>& pb) {
  double sum = 0.0;
  auto ia = pa.begin();
  auto ib = pb.begin();
  while (ia != pa.end() || ib != pb.end()) {
    if (ib == pb.end() || (ia != pa.end() && ia->first < ib->first)) {
      sum += ia->second;
      ++ia;
    } else if (ia == pa.end() || ib->first < ia->first) {
      sum += ib->second;
      ++ib;
    } else {
      sum += std::abs(ia->second - ib->second);
      ++ia;
      ++ib;
    }
  }
  return 0.5 * sum;
}

}  // namespace

double tv_distance(std::span<const std::int64_t> a, std::span<const std::int64_t> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("tv_distance: empty law");
  return tv_of_maps(frequencies(a), frequencies(b));
}

double tv_distance(std::span<const std::int64_t> samples,
                   const std::map<std::int64_t, double>& exact) {
  if (samples.empty()) throw std::invalid_argument("tv_distance: empty law");
  return tv_of_maps(frequencies(samples), exact);
}

double tv_distance(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw std::invalid_argument("tv_distance: support mismatch");
  double sum = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) sum += std::abs(p[k] - q[k]);
  return 0.5 * sum;
}

double tv_distance_joint(std::span<const std::array<std::int64_t, 2>> a,
                         std::span<const std::array<std::int64_t, 2>> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("tv_distance_joint: empty law");
  return tv_of_maps(frequencies(a), frequencies(b));
}

ChiSquareResult two_sample_test(std::span<const std::int64_t> a,
                                std::span<const std::int64_t> b, double min_expected) {
  if (a.empty() || b.empty()) throw std::invalid_argument("two_sample_test: empty sample");

  std::map<std::int64_t, std::array<double, 2>> counts;
  for (auto v : a) counts[v][0] += 1.0;
  for (auto v : b) counts[v][1] += 1.0;

  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double n = na + nb;

  // Merge adjacent integer bins until the expected count is at least
  // min_expected in both groups.
  std::vector<std::array<double, 2>> bins;
  std::array<double, 2> pending{0.0, 0.0};
  auto expected_ok = [&](const std::array<double, 2>& bin) {
    const double total = bin[0] + bin[1];
    return total * na / n >= min_expected && total * nb / n >= min_expected;
  };
  for (const auto& [_, c] : counts) {
    pending[0] += c[0];
    pending[1] += c[1];
    if (expected_ok(pending)) {
      bins.push_back(pending);
      pending = {0.0, 0.0};
    }
  }
  if (pending[0] + pending[1] > 0.0) {
    if (!bins.empty()) {
      bins.back()[0] += pending[0];
      bins.back()[1] += pending[1];
    } else {
      bins.push_back(pending);
    }
  }

  ChiSquareResult result;
  result.bins = bins.size();
  if (bins.size() <= 1) return result;  // degenerate: p = 1

  double statistic = 0.0;
  for (const auto& bin : bins) {
    const double total = bin[0] + bin[1];
    const double ea = total * na / n;
    const double eb = total * nb / n;
    statistic += (bin[0] - ea) * (bin[0] - ea) / ea + (bin[1] - eb) * (bin[1] - eb) / eb;
  }
  result.statistic = statistic;
  result.dof = static_cast<int>(bins.size()) - 1;
  result.p_value = regularized_gamma_q(0.5 * result.dof, 0.5 * statistic);
  return result;
}

ResidualZeroSummary residual_zero_test(std::span<const double> residuals) {
  if (residuals.size() < 100)
    throw std::invalid_argument("residual_zero_test: need at least 100 samples");
  const double n = static_cast<double>(residuals.size());
  double mean = 0.0;
  for (double r : residuals) mean += r;
  mean /= n;
  double ss = 0.0;
  for (double r : residuals) ss += (r - mean) * (r - mean);
  const double sd = std::sqrt(ss / (n - 1.0));

  ResidualZeroSummary summary;
  summary.mean = mean;
  summary.standard_error = sd / std::sqrt(n);
  if (summary.standard_error == 0.0) {
    summary.z_score = mean == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  } else {
    summary.z_score = mean / summary.standard_error;
  }
  summary.flagged = std::abs(summary.z_score) > 3.0;
  return summary;
}

namespace {

// Series expansion of P(a, x), valid for x < a + 1.
double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  double ap = a;
  for (int k = 0; k < 500; ++k) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction for Q(a, x), valid for x >= a + 1 (modified Lentz).
double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int k = 1; k <= 500; ++k) {
    const double an = -static_cast<double>(k) * (static_cast<double>(k) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double regularized_gamma_q(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw std::invalid_argument("regularized_gamma_q: bad arguments");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_cf(a, x);
}

std::vector<std::int64_t> EmpiricalLaw::integer_samples() const {
  std::vector<std::int64_t> out;
  out.reserve(samples.size());
  for (double v : samples) {
    if (v != std::floor(v))
      throw std::invalid_argument("law '" + name + "' holds non-integer samples");
    out.push_back(static_cast<std::int64_t>(v));
  }
  return out;
}

double tv_distance(const EmpiricalLaw& a, const EmpiricalLaw& b) {
  const auto ia = a.integer_samples();
  const auto ib = b.integer_samples();
  return tv_distance(std::span(ia), std::span(ib));
}

ChiSquareResult two_sample_test(const EmpiricalLaw& a, const EmpiricalLaw& b,
                                double min_expected) {
  const auto ia = a.integer_samples();
  const auto ib = b.integer_samples();
  return two_sample_test(std::span(ia), std::span(ib), min_expected);
}

ResidualZeroSummary residual_zero_test(const EmpiricalLaw& residuals) {
  return residual_zero_test(std::span(residuals.samples));
}

}  // namespace bds
