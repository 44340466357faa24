#include "circledyn/distortion.hpp"

#include <algorithm>
#include <cmath>

#include "circledyn/tolerances.hpp"

namespace circledyn {

double distortion_coefficient(const CircleMap& f, const CircleInterval& I, int grid) {
  if (grid < 2) throw Error("distortion_coefficient: grid must be >= 2");
  double lo = 0.0, hi = 0.0;
  for (int i = 0; i <= grid; ++i) {
    const double d = f.derivative(I.at(static_cast<double>(i) / grid));
    if (!(d > 0.0))
      throw Error("distortion_coefficient: nonpositive derivative (not a diffeomorphism here)");
    const double ld = std::log(d);
    if (i == 0) {
      lo = hi = ld;
    } else {
      lo = std::min(lo, ld);
      hi = std::max(hi, ld);
    }
  }
  return hi - lo;
}

double distortion_norm(const CircleMap& f, const CircleInterval& I, int grid) {
  if (grid < 2) throw Error("distortion_norm: grid must be >= 2");
  double worst = 0.0;
  double pld = 0.0;
  CirclePoint pim{0.0, f.chart()};
  for (int i = 0; i <= grid; ++i) {
    const CirclePoint x = I.at(static_cast<double>(i) / grid);
    const double d = f.derivative(x);
    if (!(d > 0.0)) throw Error("distortion_norm: nonpositive derivative");
    const CirclePoint im = f.apply(x);
    const double ld = std::log(d);
    if (i > 0) {
      const double gap = circle_distance(pim, im);
      if (gap > 0.0) worst = std::max(worst, std::fabs(ld - pld) / gap);
    }
    pld = ld;
    pim = im;
  }
  return worst;
}

double distortion_coefficient_refined(const CircleMap& f, const CircleInterval& I, double tol) {
  int grid = tol::kDefaultKappaGrid;
  double prev = distortion_coefficient(f, I, grid);
  while (grid < tol::kMaxKappaGrid) {
    grid *= 2;
    const double cur = distortion_coefficient(f, I, grid);
    if (std::fabs(cur - prev) < tol) return cur;
    prev = cur;
  }
  return prev;
}

CircleInterval image_interval(const CircleMap& f, const CircleInterval& I) {
  const CirclePoint l = f.apply(I.left);
  const CirclePoint r = f.apply(I.right);
  const double len = forward_gap(l, r);
  if (len >= 0.5 * chart_period(l.chart))
    throw WrapError("image_interval: image covers half the circle or more");
  return CircleInterval(l, r);
}

DistortionReport check_sum_bound(const Word& word, const MapFamily& family,
                                 const CircleInterval& I) {
  DistortionReport rep;
  double sum_lengths = 0.0;
  CircleInterval cur = I;
  for (const Symbol& s : word.symbols) {
    sum_lengths += cur.length();
    cur = image_interval(*family.map_for(s), cur);
  }
  rep.bound = family.c_family() * sum_lengths;
  const WordMap composed(word, &family);
  rep.kappa = word.empty() ? 0.0 : distortion_coefficient_refined(composed, I);
  rep.slack = rep.bound - rep.kappa;
  return rep;
}

LocalRadius local_distortion_radius(const CirclePoint& x0, const Word& word,
                                    const MapFamily& family) {
  if (word.empty()) throw Error("local_distortion_radius: word must be nonempty");
  LocalRadius out;
  // S over the proper prefixes, including the empty one (derivative 1)
  double s = 1.0;
  double log_acc = 0.0;
  CirclePoint cur = x0;
  for (size_t i = 0; i + 1 < word.length(); ++i) {
    const MapPtr& f = family.map_for(word.symbols[i]);
    log_acc += std::log(f->derivative(cur));
    cur = f->apply(cur);
    const double fi = std::exp(log_acc);
    if (!std::isfinite(fi)) throw Error("local_distortion_radius: derivative overflow");
    s += fi;
  }
  out.derivative_sum = s;
  out.delta = M_LN2 / (2.0 * family.c_family() * s);
  out.kappa_bound = M_LN2;
  const WordMap composed(word, &family);
  out.kappa_measured = distortion_coefficient_refined(
      composed, CircleInterval::around(x0, out.delta / 2.0));
  return out;
}

double invert_monotone(const std::function<double(double)>& f, double lo, double hi,
                       double y, double tol) {
  double flo = f(lo) - y, fhi = f(hi) - y;
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (flo > 0.0 || fhi < 0.0) throw Error("invert_monotone: bracket does not contain target");
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // double resolution reached
    ((f(mid) - y) <= 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

ReturnBranchScan fixed_point_return_branches(const ScalarMap& f, double x0, double a,
                                             double b, int k_max, int grid) {
  if (a <= x0 || b <= a) throw Error("fixed_point_return_branches: need x0 < a < b");
  // diagonal condition on a sample grid
  for (int i = 1; i <= 64; ++i) {
    const double x = x0 + (a - x0) * i / 64.0;
    if (f.value(x) <= x)
      throw Error("fixed_point_return_branches: map not above the diagonal on (x0, a]");
  }

  ReturnBranchScan out;
  // uniform bound sup|(log f')'| * (b - x0), sampled on [x0, b]
  double variation = 0.0;
  {
    const int vg = 4096;
    double prev = std::log(f.deriv(x0));
    for (int i = 1; i <= vg; ++i) {
      const double x = x0 + (b - x0) * i / vg;
      const double cur = std::log(f.deriv(x));
      variation = std::max(variation, std::fabs(cur - prev) / ((b - x0) / vg));
      prev = cur;
    }
  }
  out.kappa_bound = variation * (b - x0);

  double left = a, right = b;
  for (int k = 1; k <= k_max; ++k) {
    // pull both endpoints back one step through the branch on [x0, a]
    right = left;
    left = invert_monotone(f.value, x0, a, left);
    ReturnBranch br;
    br.k = k;
    br.left = left;
    br.right = right;
    double min_d = 0.0, max_d = 0.0;
    for (int i = 0; i <= grid; ++i) {
      double x = left + (right - left) * i / grid;
      double logd = 0.0;
      for (int j = 0; j < k; ++j) {
        logd += std::log(f.deriv(x));
        x = f.value(x);
      }
      if (i == 0) {
        min_d = max_d = logd;
      } else {
        min_d = std::min(min_d, logd);
        max_d = std::max(max_d, logd);
      }
    }
    br.min_derivative = std::exp(min_d);
    br.kappa = max_d - min_d;
    out.branches.push_back(br);
  }

  for (int k0 = 1; k0 <= k_max; ++k0) {
    bool all = true;
    for (const ReturnBranch& br : out.branches)
      if (br.k >= k0 && br.min_derivative < 2.0) all = false;
    if (all) {
      out.k0 = k0;
      break;
    }
  }
  return out;
}

}  // namespace circledyn
