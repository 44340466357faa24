#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "circledyn/map.hpp"

namespace circledyn {

// Integer direction (u:v) on the projective line, gcd(|u|,|v|) = 1, with the
// canonical representative v > 0, or u > 0 when v = 0.
struct ProjectiveDirection {
  mpz_class u;
  mpz_class v;

  ProjectiveDirection(mpz_class uu, mpz_class vv);
  static ProjectiveDirection from_ints(long u, long v) {
    return ProjectiveDirection(mpz_class(u), mpz_class(v));
  }

  mpz_class norm_squared() const { return u * u + v * v; }
  bool operator==(const ProjectiveDirection& o) const { return u == o.u && v == o.v; }
  std::string repr() const;  // "(u:v)"

  // Angle in [0,pi) of the direction, as a circle point.
  CirclePoint angle() const;
};

// Element of PSL2(Z): integer matrix [[a,b],[c,d]] with ad - bc = 1,
// normalized so the first nonzero entry of (a,b,c,d) is positive.
class MobiusElement {
 public:
  MobiusElement();  // identity
  MobiusElement(mpz_class a, mpz_class b, mpz_class c, mpz_class d);

  static MobiusElement f1() { return MobiusElement(1, 2, 0, 1); }
  static MobiusElement f2() { return MobiusElement(1, 0, 2, 1); }
  static MobiusElement translation() { return MobiusElement(1, 1, 0, 1); }  // x -> x+1

  const mpz_class& a() const { return a_; }
  const mpz_class& b() const { return b_; }
  const mpz_class& c() const { return c_; }
  const mpz_class& d() const { return d_; }

  MobiusElement compose(const MobiusElement& other) const;  // this after other
  MobiusElement inverse() const;
  bool operator==(const MobiusElement& o) const;
  std::string key() const;

  ProjectiveDirection act(const ProjectiveDirection& dir) const;

  // Exact derivative in the projective-chart metric: |v|^2 / |F v|^2.
  mpq_class circle_derivative(const ProjectiveDirection& dir) const;

  // Floating action on an angle in [0,pi) and the matching derivative.
  double act_angle(double theta) const;
  double derivative_angle(double theta) const;

 private:
  mpz_class a_, b_, c_, d_;
  void normalize();
};

// CircleMap adapter for a MobiusElement on the projective chart.
class MobiusMap final : public CircleMap {
 public:
  explicit MobiusMap(MobiusElement m) : elem_(std::move(m)) {}
  Chart chart() const override { return Chart::Projective; }
  CirclePoint apply(const CirclePoint& x) const override {
    require_chart(x, Chart::Projective, "MobiusMap");
    return CirclePoint::projective(elem_.act_angle(x.coord));
  }
  double derivative(const CirclePoint& x) const override {
    require_chart(x, Chart::Projective, "MobiusMap");
    return elem_.derivative_angle(x.coord);
  }
  MapPtr inverse() const override { return std::make_shared<MobiusMap>(elem_.inverse()); }
  std::string describe() const override { return "moebius" + elem_.key(); }
  std::string exact_key() const override { return elem_.key(); }
  MapPtr compose_exact(const MapPtr& other) const override;
  const MobiusElement& element() const { return elem_; }

 private:
  MobiusElement elem_;
};

// The index-two-free subgroup generators f1 = [[1,2],[0,1]], f2 = [[1,0],[2,1]]
// as a two-generator family on the projective chart (free, so the reduced
// word-length oracle is exact).
MapFamily g2_family();

// Composes a word in the f1/f2 letters into an exact element.
MobiusElement g2_element(const Word& word);

enum class NECase { Generic, AxisU, AxisV, DiagonalPlus, DiagonalMinus };
std::string to_string(NECase c);

// Classifies a direction by the norm behaviour of the four letters:
// Generic has exactly one norm-decreasing letter, the other cases have two
// norm-preserving ones.
NECase ne_case(const ProjectiveDirection& dir);

// Word of length n obtained by always applying the unique norm-decreasing
// letter.  Throws NonGenericError (with the step index) when the orbit
// reaches a state without one.
Word greedy_word(const ProjectiveDirection& dir, int n);

struct BruteForceResult {
  Word word;
  double max_log_derivative = 0.0;
};

// Exhaustive search over reduced words of length <= n for the derivative
// maximizer at `dir` (ties resolved to the lexicographically first word in
// letter order f1 < f1^-1 < f2 < f2^-1).  Exact integer comparisons.
BruteForceResult brute_force_max(const ProjectiveDirection& dir, int n,
                                 int cap = 14);

// Quotient of the circle by the symmetry group {id, 1/x, -x, -1/x}:
// |tan theta| on the two A-regions, |ctg theta| on the two B-regions.
double quotient_S(const CirclePoint& theta);

// The three-branch interval map conjugating the greedy dynamics on the
// quotient [0,1]; fixed points 0 and 1 are parabolic.
double phi_tilde(double x);
double phi_tilde_derivative(double x);

// The letter with derivative > 1 at theta; throws NonGenericError when the
// comparison is ambiguous at floating precision.
Symbol expanding_letter(double theta);

// Max over the first `steps` greedy steps of |S(f(theta_k)) - phi_tilde(S(theta_k))|.
double semiconjugacy_defect(const CirclePoint& theta, int steps);

struct PeriodTwo {
  double a;  // in (1/4, 1/3)
  double b;  // = phi_tilde(a), in (1/2, 1)
};

// The period-two orbit of phi_tilde bracketing its fundamental domain,
// located by bisection of phi_tilde^2(x) - x on (1/4, 1/3).
PeriodTwo period_two_point();

// First return of x in J = [a, b) under phi_tilde.  Throws IterationCapError
// past max_iter (the return time is unbounded near the preimages of the
// branch endpoints 1/3 and 1/2).
FirstReturn first_return(double x, long max_iter = 10000000);

// Fraction of the first n phi_tilde-iterates of x lying in
// U_eps(0) u U_eps(1).
double occupation_fraction(double x, long n, double eps);

// (1/n) log of the greedy composed derivative at `dir`.  Throws
// NonGenericError when the exact orbit terminates before n steps.
double lyapunov_expansion_estimate(const ProjectiveDirection& dir, long n);

// As above but also returning the estimate at intermediate checkpoint
// lengths (each entry (n_i, estimate at n_i)).
std::vector<std::pair<long, double>> lyapunov_expansion_profile(
    const ProjectiveDirection& dir, const std::vector<long>& checkpoints);

// Random direction with roughly `bits` bits of entropy in the angle given by
// `theta` at double resolution; with theta drawn uniformly this samples a
// Lebesgue-random direction that admits long exact greedy orbits.
ProjectiveDirection direction_near_angle(double theta, int bits, std::mt19937_64& rng);
ProjectiveDirection random_direction(int bits, std::mt19937_64& rng);

}  // namespace circledyn
