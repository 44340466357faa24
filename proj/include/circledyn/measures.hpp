#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "circledyn/moebius.hpp"
#include "circledyn/thompson.hpp"

namespace circledyn {

// Weighted point masses.  Atoms sit either at exact projective directions or
// at real circle points; the measure is stored unnormalized, with the
// truncation parameters and a tail estimate alongside.
struct AtomicMeasure {
  struct Atom {
    std::variant<double, ProjectiveDirection> point;
    double weight = 0.0;
  };
  std::vector<Atom> atoms;
  double total = 0.0;          // sum of weights
  double delta = 0.0;          // conformal exponent used to build it
  double truncation = 0.0;     // radius R or tree depth
  double tail_bound = 0.0;     // estimated mass beyond the truncation

  // Angle of an atom in the projective chart / unit chart as appropriate.
  static CirclePoint location(const Atom& a);

  void serialize(std::ostream& out) const;
  static AtomicMeasure deserialize(std::istream& in);
};

// Binned histogram on the unit-chart circle.
struct EmpiricalMeasure {
  int bins = 1024;
  std::vector<long> counts;
  long total = 0;

  explicit EmpiricalMeasure(int b = 1024) : bins(b), counts(b, 0) {}
  void add(double x);
  double mass(int i) const { return total ? static_cast<double>(counts[i]) / total : 0.0; }
  // Mass of the arc (x - eps, x + eps), bins counted fractionally.
  double mass_around(double x, double eps) const;
  double tv_distance(const EmpiricalMeasure& o) const;
  // Pushforward through the average of the given maps with weights.
  EmpiricalMeasure pushforward(const std::vector<std::pair<MapPtr, double>>& maps) const;
  double sample(std::mt19937_64& rng) const;  // bin by counts, uniform inside
};

struct ConformalityReport {
  double delta = 0.0;
  double max_relative_defect = 0.0;
  long atoms_checked = 0;
  long atoms_skipped_boundary = 0;
};

// Atoms at all coprime (m:n) with norm <= R, weight |(m,n)|^(-2 delta).
// Requires delta > 1 for a finite total.
AtomicMeasure build_psl_conformal(double delta, long R);

// Atoms at the gap-tree preimages of the upper fixed point of the
// nonminimal doubling, weight (phi^n)'(y)^(-delta).
AtomicMeasure build_gs_conformal(const SmoothDoubling& phi_nm, double delta, int depth);

// Per-atom check of w(g x) = w(x) g'(x)^delta over atoms whose image atom is
// inside the truncation.
ConformalityReport conformality_defect(const AtomicMeasure& mu, const CircleMap& g,
                                       double delta);

// Partial sums S_delta(depth) of the gs construction per tree level.
std::vector<double> gs_partial_sums(const SmoothDoubling& phi_nm, double delta, int depth);

struct DensityRatioPoint {
  double eps = 0.0;
  double value = 0.0;
  bool defined = false;  // false on 0/0
};

using MeasureRef = std::variant<const AtomicMeasure*, const EmpiricalMeasure*>;

std::vector<DensityRatioPoint> density_ratio(MeasureRef mu1, MeasureRef mu2,
                                             const CirclePoint& x,
                                             const std::vector<double>& eps_sequence);

struct ConservativityProbe {
  std::vector<double> partial_sums;   // indexed by word-length cap 0..cap
  std::vector<long> element_counts;   // distinct elements per cap
  std::vector<long> unit_derivative_counts;  // elements with derivative exactly 1
};

// Partial sums of g'(x)^delta over distinct group elements of word length
// <= cap, elements deduplicated by their exact keys.
ConservativityProbe conservativity_probe(const MapFamily& family, double delta,
                                         const CirclePoint& x, int word_cap);

// As above but with the exact rational derivative at an exact direction
// (Moebius families only); unit_derivative_counts is then exact.
ConservativityProbe conservativity_probe_exact(const MapFamily& family, double delta,
                                               const ProjectiveDirection& dir, int word_cap);

}  // namespace circledyn
