#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "circledyn/map.hpp"

namespace circledyn {

struct DistortionReport {
  double kappa = 0.0;  // log(max F' / min F') over the interval
  double eta = 0.0;    // Lipschitz refinement (0 when not computed)
  double bound = 0.0;  // right side of the checked inequality
  double slack = 0.0;  // bound - observed
};

// log(max F'/min F') sampled on `grid`+1 points of the interval (endpoints
// included).  Throws when a sampled derivative is nonpositive.
double distortion_coefficient(const CircleMap& f, const CircleInterval& I, int grid);

// sup over nearby sample pairs of |log(F'(x)/F'(y))| / |F(x)-F(y)|.
double distortion_norm(const CircleMap& f, const CircleInterval& I, int grid);

// Grid-doubling refinement of distortion_coefficient until the change drops
// below tol (or the grid cap is reached).
double distortion_coefficient_refined(const CircleMap& f, const CircleInterval& I,
                                      double tol = 1e-6);

// Image of an interval under an orientation-preserving map; throws WrapError
// when the image covers at least half of the circle (the composition
// estimates assume embedded images).
CircleInterval image_interval(const CircleMap& f, const CircleInterval& I);

// Checks kappa(f_n o ... o f_1; I) <= c_family * sum |f_i o ... o f_1 (I)|.
DistortionReport check_sum_bound(const Word& word, const MapFamily& family,
                                 const CircleInterval& I);

struct LocalRadius {
  double delta = 0.0;
  double kappa_bound = 0.0;  // always log 2 by construction
  double kappa_measured = 0.0;
  double derivative_sum = 0.0;  // S = sum_{i=0}^{n-1} F_i'(x0)
};

// Radius delta = log(2) / (2 c_F S) around x0 on which the word's distortion
// coefficient provably stays below log 2; also measures it.
LocalRadius local_distortion_radius(const CirclePoint& x0, const Word& word,
                                    const MapFamily& family);

// Interval map handle used by the fixed-point / first-return machinery,
// where the dynamics is not a circle homeomorphism.
struct ScalarMap {
  std::function<double(double)> value;
  std::function<double(double)> deriv;
};

struct ReturnBranch {
  int k = 0;
  double left = 0.0;  // J_k = [left, right]
  double right = 0.0;
  double min_derivative = 0.0;  // min over J_k of (f^k)'
  double kappa = 0.0;           // distortion coefficient of f^k on J_k
};

struct ReturnBranchScan {
  std::vector<ReturnBranch> branches;
  std::optional<int> k0;       // least k with min_derivative >= 2 from k on
  double kappa_bound = 0.0;    // uniform bound sup|(log f')'| * (b - x0)
};

// For a map fixing x0, strictly above the diagonal on (x0, a], mapping
// [x0, a] onto [x0, b]: the continuity branches J_k = f^{-k}([a,b]) of the
// first-entry map into [a,b], with their minimal derivatives and distortion
// coefficients, for k = 1..k_max.
ReturnBranchScan fixed_point_return_branches(const ScalarMap& f, double x0, double a,
                                             double b, int k_max, int grid = 256);

// Monotone-increasing inverse by bisection on [lo, hi]; `f` must bracket y.
double invert_monotone(const std::function<double(double)>& f, double lo, double hi,
                       double y, double tol = 1e-14);

}  // namespace circledyn
