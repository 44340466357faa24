#include "circledyn/random_walk.hpp"

#include <algorithm>
#include <cmath>

#include "circledyn/tolerances.hpp"

namespace circledyn {

StepDistribution::StepDistribution(const MapFamily& fam, std::vector<Symbol> sup,
                                   std::vector<double> probs)
    : family(&fam), support(std::move(sup)), probabilities(std::move(probs)) {
  if (support.empty() || support.size() != probabilities.size())
    throw Error("StepDistribution: support/probability size mismatch");
  double total = 0.0;
  for (double p : probabilities) {
    if (p <= 0) throw Error("StepDistribution: probabilities must be positive");
    total += p;
  }
  if (std::fabs(total - 1.0) > 1e-12)
    throw Error("StepDistribution: probabilities must sum to 1");
}

StepDistribution StepDistribution::uniform(const MapFamily& fam) {
  std::vector<Symbol> sup = fam.letters();
  std::vector<double> probs(sup.size(), 1.0 / sup.size());
  return StepDistribution(fam, std::move(sup), std::move(probs));
}

Symbol StepDistribution::draw(std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  double r = U(rng);
  for (size_t i = 0; i < support.size(); ++i) {
    r -= probabilities[i];
    if (r <= 0) return support[i];
  }
  return support.back();
}

std::mt19937_64 trial_engine(uint64_t seed, uint64_t trial) {
  // splitmix-style mixing of (seed, trial) into an engine seed
  uint64_t z = seed + 0x9e3779b97f4a7c15ull * (trial + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return std::mt19937_64(z ^ (z >> 31));
}

ForwardSample sample_forward(const StepDistribution& m, long n, const CirclePoint& x0,
                             uint64_t seed) {
  std::mt19937_64 rng = trial_engine(seed, 0);
  ForwardSample out;
  out.trajectory.reserve(n + 1);
  out.trajectory.push_back(x0);
  CirclePoint cur = x0;
  for (long i = 0; i < n; ++i) {
    const Symbol s = m.draw(rng);
    out.word.symbols.push_back(s);
    const MapPtr& g = m.family->map_for(s);
    out.log_derivative += std::log(g->derivative(cur));
    cur = g->apply(cur);
    out.trajectory.push_back(cur);
  }
  return out;
}

EmpiricalMeasure stationary_estimate(const StepDistribution& m, long n, long trials,
                                     uint64_t seed, int bins) {
  if (n < 1 || trials < 1) throw Error("stationary_estimate: n and trials must be >= 1");
  EmpiricalMeasure hist(bins);
  const double period = chart_period(m.family->chart());
  std::vector<Symbol> draws(n);
  for (long t = 0; t < trials; ++t) {
    std::mt19937_64 rng = trial_engine(seed, t);
    std::uniform_real_distribution<double> U(0.0, period);
    CirclePoint x{U(rng), m.family->chart()};
    for (long i = 0; i < n; ++i) draws[i] = m.draw(rng);
    // backward composition: first draw applied last
    for (long i = n - 1; i >= 0; --i) x = m.family->map_for(draws[i])->apply(x);
    hist.add(x.coord / period);
  }
  return hist;
}

namespace {

WalkEstimate mean_and_se(const std::vector<double>& values, long n, uint64_t seed) {
  WalkEstimate out;
  out.trials = static_cast<long>(values.size());
  out.n_steps = n;
  out.seed = seed;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= values.size();
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var = values.size() > 1 ? var / (values.size() - 1) : 0.0;
  out.value = mean;
  out.standard_error = std::sqrt(var / values.size());
  return out;
}

}  // namespace

WalkEstimate random_lyapunov(const StepDistribution& m, const EmpiricalMeasure& nu_hat,
                             long n, long trials, uint64_t seed) {
  const double period = chart_period(m.family->chart());
  std::vector<double> vals;
  vals.reserve(trials);
  for (long t = 0; t < trials; ++t) {
    std::mt19937_64 rng = trial_engine(seed, t);
    CirclePoint x{nu_hat.sample(rng) * period, m.family->chart()};
    double acc = 0.0;
    for (long i = 0; i < n; ++i) {
      const MapPtr& g = m.family->map_for(m.draw(rng));
      acc += std::log(g->derivative(x));
      x = g->apply(x);
    }
    vals.push_back(acc / n);
  }
  return mean_and_se(vals, n, seed);
}

WalkEstimate rate_of_escape(const StepDistribution& m, long n, long trials, uint64_t seed) {
  // freely reduced length: exact for free families, an upper bound otherwise
  std::vector<double> vals;
  vals.reserve(trials);
  std::vector<Symbol> stack;
  for (long t = 0; t < trials; ++t) {
    std::mt19937_64 rng = trial_engine(seed, t);
    stack.clear();
    for (long i = 0; i < n; ++i) {
      const Symbol s = m.draw(rng);
      if (!stack.empty() && stack.back() == s.inverted())
        stack.pop_back();
      else
        stack.push_back(s);
    }
    vals.push_back(static_cast<double>(stack.size()) / n);
  }
  WalkEstimate out = mean_and_se(vals, n, seed);
  out.upper_bound = !m.family->is_free();
  return out;
}

BoundCheckReport expansion_bound_check(const StepDistribution& m, const BoundCheckParams& p) {
  BoundCheckReport rep;
  if (m.family->chart() != Chart::Projective)
    throw Error("expansion_bound_check: needs the projective-chart family");

  const EmpiricalMeasure nu =
      stationary_estimate(m, p.stationary_n, p.stationary_trials, p.seed);
  rep.lambda_rd = random_lyapunov(m, nu, p.lyapunov_n, p.lyapunov_trials, p.seed + 1);
  rep.escape = rate_of_escape(m, p.escape_n, p.escape_trials, p.seed + 2);

  std::vector<long> grid = p.expansion_grid;
  std::sort(grid.begin(), grid.end());
  std::vector<std::vector<double>> per_n(grid.size());
  std::mt19937_64 rng = trial_engine(p.seed + 3, 0);
  for (long s = 0; s < p.expansion_samples; ++s) {
    const double theta = nu.sample(rng) * M_PI;
    const ProjectiveDirection dir = direction_near_angle(theta, p.direction_bits, rng);
    try {
      const auto profile = lyapunov_expansion_profile(dir, grid);
      if (profile.size() != grid.size()) throw NonGenericError("short profile", 0);
      for (size_t i = 0; i < profile.size(); ++i) per_n[i].push_back(profile[i].second);
    } catch (const NonGenericError&) {
      ++rep.expansion_failures;
    }
  }
  double best = -HUGE_VAL, best_se = 0.0;
  long best_n = 0;
  for (size_t i = 0; i < grid.size(); ++i) {
    if (per_n[i].empty()) continue;
    const WalkEstimate e = mean_and_se(per_n[i], grid[i], p.seed + 3);
    if (e.value > best) {
      best = e.value;
      best_se = e.standard_error;
      best_n = grid[i];
    }
  }
  rep.lambda_exp = best;
  rep.lambda_exp_se = best_se;
  rep.lambda_exp_n = best_n;
  rep.rhs = std::fabs(rep.lambda_rd.value) / rep.escape.value;
  const double combined_se =
      rep.lambda_exp_se + rep.rhs * (rep.lambda_rd.standard_error / std::fabs(rep.lambda_rd.value) +
                                     rep.escape.standard_error / rep.escape.value);
  rep.pass = rep.lambda_exp >= rep.rhs - 2.0 * combined_se;
  return rep;
}

}  // namespace circledyn
