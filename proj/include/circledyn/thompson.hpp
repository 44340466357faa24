#pragma once

#include <gmpxx.h>

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "circledyn/distortion.hpp"
#include "circledyn/map.hpp"

namespace circledyn {

struct BreakpointError : Error {
  explicit BreakpointError(const std::string& m) : Error(m) {}
};

struct DepthCapError : Error {
  explicit DepthCapError(const std::string& m) : Error(m) {}
};

enum class Side { Left, Right };

bool is_dyadic(const mpq_class& q);         // denominator a power of two
int denominator_exponent(const mpq_class& q);

// Orientation-preserving piecewise-linear circle homeomorphism with dyadic
// breakpoints, power-of-two slopes and dyadic offsets.  Composition and
// inversion are exact and closed.  Canonical form: a breakpoint at 0, pieces
// split where the image passes 0, adjacent pieces with equal affine data
// merged.
class ThompsonElement {
 public:
  struct Piece {
    mpq_class left;    // domain [left, next.left)
    int slope_exp;     // slope 2^slope_exp
    mpq_class offset;  // f(x) = 2^slope_exp * x + offset, image within [0,1]
  };

  // Builds from (left breakpoint, image of left breakpoint, slope exponent)
  // triples; breakpoints must start at 0 and be sorted.
  static ThompsonElement from_table(
      const std::vector<std::tuple<mpq_class, mpq_class, int>>& rows);
  static ThompsonElement identity();

  const std::vector<Piece>& pieces() const { return pieces_; }

  mpq_class evaluate_exact(const mpq_class& x) const;
  mpq_class invert_exact(const mpq_class& y) const;
  double evaluate(double x) const;
  double derivative(double x, std::optional<Side> side = std::nullopt) const;

  ThompsonElement compose(const ThompsonElement& other) const;  // this after other
  ThompsonElement inverse() const;
  bool operator==(const ThompsonElement& o) const;
  std::string key() const;

  // Largest denominator exponent over breakpoints and their images.
  int max_denominator_exponent() const;

 private:
  explicit ThompsonElement(std::vector<Piece> pieces);
  void validate() const;
  size_t piece_index_exact(const mpq_class& x) const;
  std::vector<Piece> pieces_;
};

// The classical generators of T as exact tables.
ThompsonElement thompson_A();
ThompsonElement thompson_B();
ThompsonElement thompson_C();

// Reads "name count" blocks of "p/2^k q/2^m slope_exp" rows.
std::map<std::string, ThompsonElement> load_generator_tables(const std::string& path);

// Degree-two smooth monotone circle map with a distinguished fixed point
// `base`; the lift maps [base, base+1] onto [base, base+2].  `split` is the
// interior lift-preimage of base+1; the two monotone branches are the arcs
// [base, split) and [split, base+1).
class SmoothDoubling {
 public:
  std::string name;
  double base = 0.0;
  double split = 0.5;
  std::vector<double> parabolic;
  bool gap_variant = false;  // parabolic = {x-, x+} bounding an invariant gap
  std::function<double(double)> lift_value;
  std::function<double(double)> lift_deriv;

  double value(double x) const;  // circle coordinates in [0,1)
  double deriv(double x) const;
  int digit(double x) const;  // 0 on [base, split), 1 on [split, base+1)
  // The unique preimage of y in the selected monotone branch (bracketed
  // bisection with Newton polish).
  double inverse_branch(double y, int bit) const;

  // phi(base) = base, phi' = 1 on the declared parabolic set, phi' > 1 on a
  // grid away from it.
  void check_invariants(int grid = 4096) const;

  static SmoothDoubling minimal_default();   // 2x - sin(2 pi x)/(2 pi)
  static SmoothDoubling etienne_variant();   // 2x - sin(6 pi x)/(6 pi)
  static SmoothDoubling exact_doubling();    // 2x mod 1
  // Two parabolic fixed points 0.4 and 0.6 with the invariant gap between
  // them; expanding outside.  Piecewise-polynomial C^2 lift.
  static SmoothDoubling nonminimal_default();

 private:
  double lift_at(double x) const;  // lift extended to the real line
};

struct GSValue {
  double value = 0.0;
  double derivative = 0.0;
};

// A Thompson element realized as a smooth circle map through the doubling
// map phi: on each piece the map acts as a branch of phi^{-k} o phi^l.
class GSRealization {
 public:
  GSRealization(ThompsonElement element, SmoothDoubling phi);

  const ThompsonElement& element() const { return element_; }
  const SmoothDoubling& phi() const { return phi_; }

  GSValue evaluate(double x) const;
  GSRealization inverse() const;

  struct PieceData {
    mpq_class left;
    int k = 0;
    int l = 0;
    std::vector<int> address;  // k bits, image cell, most significant first
  };
  const std::vector<PieceData>& piece_data() const { return data_; }

 private:
  ThompsonElement element_;
  SmoothDoubling phi_;
  std::vector<PieceData> data_;
  size_t locate_piece(double x) const;
};

// CircleMap adapters (unit chart).
class PLMap final : public CircleMap {
 public:
  explicit PLMap(ThompsonElement e) : elem_(std::move(e)) {}
  Chart chart() const override { return Chart::Unit; }
  CirclePoint apply(const CirclePoint& x) const override {
    require_chart(x, Chart::Unit, "PLMap");
    return CirclePoint::unit(elem_.evaluate(x.coord));
  }
  double derivative(const CirclePoint& x) const override {
    require_chart(x, Chart::Unit, "PLMap");
    return elem_.derivative(x.coord);
  }
  MapPtr inverse() const override { return std::make_shared<PLMap>(elem_.inverse()); }
  std::string describe() const override { return "pl" + elem_.key(); }
  std::string exact_key() const override { return elem_.key(); }
  MapPtr compose_exact(const MapPtr& other) const override;
  const ThompsonElement& element() const { return elem_; }

 private:
  ThompsonElement elem_;
};

// The doubling map itself as a (non-invertible) CircleMap.
class DoublingMap final : public CircleMap {
 public:
  explicit DoublingMap(SmoothDoubling phi) : phi_(std::move(phi)) {}
  Chart chart() const override { return Chart::Unit; }
  CirclePoint apply(const CirclePoint& x) const override {
    require_chart(x, Chart::Unit, "DoublingMap");
    return CirclePoint::unit(phi_.value(x.coord));
  }
  double derivative(const CirclePoint& x) const override {
    require_chart(x, Chart::Unit, "DoublingMap");
    return phi_.deriv(x.coord);
  }
  std::string describe() const override { return phi_.name; }
  const SmoothDoubling& phi() const { return phi_; }

 private:
  SmoothDoubling phi_;
};

class GSMap final : public CircleMap {
 public:
  explicit GSMap(GSRealization g) : gs_(std::move(g)) {}
  Chart chart() const override { return Chart::Unit; }
  CirclePoint apply(const CirclePoint& x) const override {
    require_chart(x, Chart::Unit, "GSMap");
    return CirclePoint::unit(gs_.evaluate(x.coord).value);
  }
  double derivative(const CirclePoint& x) const override {
    require_chart(x, Chart::Unit, "GSMap");
    return gs_.evaluate(x.coord).derivative;
  }
  MapPtr inverse() const override { return std::make_shared<GSMap>(gs_.inverse()); }
  std::string describe() const override { return "gs" + gs_.element().key(); }
  std::string exact_key() const override {
    return gs_.phi().name + "|" + gs_.element().key();
  }
  MapPtr compose_exact(const MapPtr& other) const override;
  const GSRealization& realization() const { return gs_; }

 private:
  GSRealization gs_;
};

// The realized standard generators {[A], [B], [C]} over `phi` as a family.
MapFamily gs_family(const SmoothDoubling& phi);

// Max derivative of [w]_phi at x over all reduced words w of length <= depth
// in the standard generators (identity included).
double ne_probe(const SmoothDoubling& phi, double x, int depth);

struct PhiReturnHandle {
  double a = 0.0;  // period-two point in (base, split)
  double b = 0.0;  // = phi(a)
};

// Fundamental-domain data for the expansion of `phi` around its base fixed
// point: the period-two orbit {a, b} with J = [a, b).
PhiReturnHandle phi_first_return(const SmoothDoubling& phi);

// First return of x to J = [a, b) under phi.
FirstReturn phi_return(const SmoothDoubling& phi, const PhiReturnHandle& h, double x,
                       long max_iter = 10000000);

// Fraction of the first n phi-iterates within eps of the declared parabolic
// set.
double time_average_concentration(const SmoothDoubling& phi, double x, long n, double eps);

struct GapNode {
  int n = 0;          // phi^n(y) = x+, phi^{n-1}(y) != x+
  double y = 0.0;     // right endpoint of its gap component
  double left = 0.0;  // I_y = (left, right)
  double right = 0.0;
  double weight_base = 0.0;  // (phi^n)'(y)
};

struct GapTree {
  std::vector<GapNode> nodes;  // ordered by level, then by branch address
  double min_c = 0.0;          // min over nodes of (phi^n)'(y) * |I_y|
  bool disjoint = false;
  double total_gap_length = 0.0;
};

// All preimages of the upper gap endpoint x+ up to the given depth together
// with their gap components (nonminimal variant only).
GapTree gap_tree(const SmoothDoubling& phi_nm, int depth);

}  // namespace circledyn
