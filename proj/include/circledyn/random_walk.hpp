#pragma once

#include <random>
#include <vector>

#include "circledyn/measures.hpp"

namespace circledyn {

// Step distribution over the semigroup letters of a family.
struct StepDistribution {
  const MapFamily* family = nullptr;  // not owned
  std::vector<Symbol> support;
  std::vector<double> probabilities;

  StepDistribution(const MapFamily& fam, std::vector<Symbol> sup, std::vector<double> probs);
  // Uniform over all letters (generators and inverses).
  static StepDistribution uniform(const MapFamily& fam);

  Symbol draw(std::mt19937_64& rng) const;
};

struct WalkEstimate {
  double value = 0.0;
  double standard_error = 0.0;
  long n_steps = 0;
  long trials = 0;
  uint64_t seed = 0;
  bool upper_bound = false;  // set when the word-norm oracle is only an upper bound
};

// Deterministic per-trial engine derived from (seed, trial).
std::mt19937_64 trial_engine(uint64_t seed, uint64_t trial);

struct ForwardSample {
  std::vector<CirclePoint> trajectory;
  double log_derivative = 0.0;
  Word word;
};

// n i.i.d. draws applied forward to x0, with the chain-rule log-derivative.
ForwardSample sample_forward(const StepDistribution& m, long n, const CirclePoint& x0,
                             uint64_t seed);

// Histogram of endpoints of backward compositions g_1 o ... o g_n applied to
// per-trial uniform starts.
EmpiricalMeasure stationary_estimate(const StepDistribution& m, long n, long trials,
                                     uint64_t seed, int bins = 1024);

// Mean over trials of (1/n) log-derivative along the walk, starts sampled
// from nu_hat.
WalkEstimate random_lyapunov(const StepDistribution& m, const EmpiricalMeasure& nu_hat,
                             long n, long trials, uint64_t seed);

// Mean over trials of |g_1 ... g_n|_F / n (reduced length when the family is
// free, raw length flagged as an upper bound otherwise).
WalkEstimate rate_of_escape(const StepDistribution& m, long n, long trials, uint64_t seed);

struct BoundCheckParams {
  long stationary_n = 200;
  long stationary_trials = 100000;
  long lyapunov_n = 1000;
  long lyapunov_trials = 1000;
  long escape_n = 10000;
  long escape_trials = 200;
  std::vector<long> expansion_grid = {1, 2, 3, 4, 6, 10, 100, 1000};
  long expansion_samples = 200;
  int direction_bits = 2048;
  uint64_t seed = 1;
};

struct BoundCheckReport {
  WalkEstimate lambda_rd;
  WalkEstimate escape;
  double lambda_exp = 0.0;        // max over the n grid of the mean estimate
  double lambda_exp_se = 0.0;     // standard error at the maximizing n
  long lambda_exp_n = 0;          // maximizing n
  long expansion_failures = 0;    // orbits that left the generic set early
  double rhs = 0.0;               // |lambda_rd| / v
  bool pass = false;              // lambda_exp >= rhs - 2 (combined se)
};

// Checks the expansion-vs-random-walk inequality on the G2 family: the
// expansion-exponent estimate at stationary-sampled points against
// |lambda_RD| / v.
BoundCheckReport expansion_bound_check(const StepDistribution& m, const BoundCheckParams& p);

}  // namespace circledyn
