#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace circledyn {

struct Error : std::runtime_error {
  explicit Error(const std::string& m) : std::runtime_error(m) {}
};

struct ChartMismatchError : Error {
  explicit ChartMismatchError(const std::string& m) : Error(m) {}
};

// Greedy / expansion machinery reached a state where no unique expanding
// generator exists; `step` is the index at which this happened.
struct NonGenericError : Error {
  int step;
  NonGenericError(const std::string& m, int s) : Error(m), step(s) {}
};

struct IterationCapError : Error {
  explicit IterationCapError(const std::string& m) : Error(m) {}
};

struct WrapError : Error {
  explicit WrapError(const std::string& m) : Error(m) {}
};

// Two coordinate systems are used on the circle: the unit-length chart
// (coordinate in [0,1)) for the piecewise-linear / smoothed actions, and the
// projective chart (angle in [0,pi)) for the integer Moebius action.
enum class Chart { Unit, Projective };

inline double chart_period(Chart c) {
  return c == Chart::Unit ? 1.0 : M_PI;
}

inline double reduce_coordinate(double x, Chart c) {
  const double p = chart_period(c);
  double r = std::fmod(x, p);
  if (r < 0) r += p;
  if (r == p) r = 0.0;  // fmod may return p after the sign fix at -0 inputs
  return r;
}

struct CirclePoint {
  double coord = 0.0;
  Chart chart = Chart::Unit;

  static CirclePoint unit(double x) { return {reduce_coordinate(x, Chart::Unit), Chart::Unit}; }
  static CirclePoint projective(double theta) {
    return {reduce_coordinate(theta, Chart::Projective), Chart::Projective};
  }
  bool operator==(const CirclePoint& o) const { return chart == o.chart && coord == o.coord; }
};

inline void require_chart(const CirclePoint& p, Chart c, const char* where) {
  if (p.chart != c) throw ChartMismatchError(std::string(where) + ": point is in the wrong chart");
}

// Length of the positively oriented arc from `a` to `b` (same chart).
inline double forward_gap(const CirclePoint& a, const CirclePoint& b) {
  if (a.chart != b.chart) throw ChartMismatchError("forward_gap: mixed charts");
  return reduce_coordinate(b.coord - a.coord, a.chart);
}

inline double circle_distance(const CirclePoint& a, const CirclePoint& b) {
  const double g = forward_gap(a, b);
  return std::min(g, chart_period(a.chart) - g);
}

// Chart conversions.  The unit and projective coordinates are proportional;
// the affine value ctg(theta) of Section-style computations is exposed
// separately since it lives on the real line, not on the circle.
inline CirclePoint to_unit(const CirclePoint& p) {
  if (p.chart == Chart::Unit) return p;
  return CirclePoint::unit(p.coord / M_PI);
}

inline CirclePoint to_projective(const CirclePoint& p) {
  if (p.chart == Chart::Projective) return p;
  return CirclePoint::projective(p.coord * M_PI);
}

inline double affine_value(const CirclePoint& p) {
  const CirclePoint q = to_projective(p);
  return 1.0 / std::tan(q.coord);  // +-inf at theta = 0 is the point (1:0)
}

// Positively oriented arc from `left` to `right`; never empty, never the
// whole circle.
struct CircleInterval {
  CirclePoint left;
  CirclePoint right;

  CircleInterval(CirclePoint l, CirclePoint r) : left(l), right(r) {
    if (l.chart != r.chart) throw ChartMismatchError("CircleInterval: mixed charts");
    const double len = forward_gap(l, r);
    if (len <= 0.0 || len >= chart_period(l.chart))
      throw Error("CircleInterval: length must be strictly between 0 and the full circle");
  }

  Chart chart() const { return left.chart; }
  double length() const { return forward_gap(left, right); }

  bool contains(const CirclePoint& p) const {
    require_chart(p, chart(), "CircleInterval::contains");
    return forward_gap(left, p) <= length();
  }

  // Point at parameter t in [0,1] along the arc.
  CirclePoint at(double t) const {
    return CirclePoint{reduce_coordinate(left.coord + t * length(), chart()), chart()};
  }

  static CircleInterval around(const CirclePoint& center, double radius) {
    return CircleInterval(
        CirclePoint{reduce_coordinate(center.coord - radius, center.chart), center.chart},
        CirclePoint{reduce_coordinate(center.coord + radius, center.chart), center.chart});
  }
};

}  // namespace circledyn
