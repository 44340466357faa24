#include "circledyn/moebius.hpp"

#include <algorithm>
#include <cmath>

#include "circledyn/tolerances.hpp"

namespace circledyn {

namespace {

// log of a positive mpz via mantissa/exponent split
double log_mpz(const mpz_class& z) {
  long exp = 0;
  const double m = mpz_get_d_2exp(&exp, z.get_mpz_t());
  return std::log(m) + exp * M_LN2;
}

}  // namespace

ProjectiveDirection::ProjectiveDirection(mpz_class uu, mpz_class vv) : u(std::move(uu)), v(std::move(vv)) {
  if (u == 0 && v == 0) throw Error("ProjectiveDirection: zero vector");
  mpz_class g;
  mpz_gcd(g.get_mpz_t(), u.get_mpz_t(), v.get_mpz_t());
  u /= g;
  v /= g;
  if (v < 0 || (v == 0 && u < 0)) {
    u = -u;
    v = -v;
  }
}

std::string ProjectiveDirection::repr() const {
  return "(" + u.get_str() + ":" + v.get_str() + ")";
}

CirclePoint ProjectiveDirection::angle() const {
  const double theta = std::atan2(v.get_d(), u.get_d());
  return CirclePoint::projective(theta);
}

MobiusElement::MobiusElement() : a_(1), b_(0), c_(0), d_(1) {}

MobiusElement::MobiusElement(mpz_class a, mpz_class b, mpz_class c, mpz_class d)
    : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), d_(std::move(d)) {
  if (a_ * d_ - b_ * c_ != 1) throw Error("MobiusElement: determinant must be 1");
  normalize();
}

void MobiusElement::normalize() {
  const mpz_class* entries[4] = {&a_, &b_, &c_, &d_};
  for (const mpz_class* e : entries) {
    if (*e != 0) {
      if (*e < 0) {
        a_ = -a_;
        b_ = -b_;
        c_ = -c_;
        d_ = -d_;
      }
      return;
    }
  }
}

MobiusElement MobiusElement::compose(const MobiusElement& o) const {
  return MobiusElement(a_ * o.a_ + b_ * o.c_, a_ * o.b_ + b_ * o.d_,
                       c_ * o.a_ + d_ * o.c_, c_ * o.b_ + d_ * o.d_);
}

MobiusElement MobiusElement::inverse() const {
  return MobiusElement(d_, -b_, -c_, a_);
}

bool MobiusElement::operator==(const MobiusElement& o) const {
  return a_ == o.a_ && b_ == o.b_ && c_ == o.c_ && d_ == o.d_;
}

std::string MobiusElement::key() const {
  return "[" + a_.get_str() + "," + b_.get_str() + ";" + c_.get_str() + "," + d_.get_str() + "]";
}

ProjectiveDirection MobiusElement::act(const ProjectiveDirection& dir) const {
  return ProjectiveDirection(a_ * dir.u + b_ * dir.v, c_ * dir.u + d_ * dir.v);
}

mpq_class MobiusElement::circle_derivative(const ProjectiveDirection& dir) const {
  const mpz_class num = dir.norm_squared();
  const mpz_class iu = a_ * dir.u + b_ * dir.v;
  const mpz_class iv = c_ * dir.u + d_ * dir.v;
  mpq_class q(num, iu * iu + iv * iv);
  q.canonicalize();
  return q;
}

double MobiusElement::act_angle(double theta) const {
  const double u = std::cos(theta), v = std::sin(theta);
  const double iu = a_.get_d() * u + b_.get_d() * v;
  const double iv = c_.get_d() * u + d_.get_d() * v;
  double out = std::atan2(iv, iu);
  return reduce_coordinate(out, Chart::Projective);
}

double MobiusElement::derivative_angle(double theta) const {
  const double u = std::cos(theta), v = std::sin(theta);
  const double iu = a_.get_d() * u + b_.get_d() * v;
  const double iv = c_.get_d() * u + d_.get_d() * v;
  return 1.0 / (iu * iu + iv * iv);
}

MapPtr MobiusMap::compose_exact(const MapPtr& other) const {
  const auto* m = dynamic_cast<const MobiusMap*>(other.get());
  if (!m) return nullptr;
  return std::make_shared<MobiusMap>(elem_.compose(m->elem_));
}

MapFamily g2_family() {
  std::vector<MapPtr> gens = {std::make_shared<MobiusMap>(MobiusElement::f1()),
                              std::make_shared<MobiusMap>(MobiusElement::f2())};
  MapFamily fam(std::move(gens));
  fam.mark_free();
  return fam;
}

namespace {

MobiusElement letter_element(const Symbol& s) {
  MobiusElement g = s.generator == 0 ? MobiusElement::f1() : MobiusElement::f2();
  return s.inverse ? g.inverse() : g;
}

ProjectiveDirection act_letter(const Symbol& s, const ProjectiveDirection& d) {
  // direct formulas; cheaper than general matrix action in the hot loops
  switch (s.generator * 2 + (s.inverse ? 1 : 0)) {
    case 0: return ProjectiveDirection(d.u + 2 * d.v, d.v);   // f1
    case 1: return ProjectiveDirection(d.u - 2 * d.v, d.v);   // f1^-1
    case 2: return ProjectiveDirection(d.u, 2 * d.u + d.v);   // f2
    default: return ProjectiveDirection(d.u, d.v - 2 * d.u);  // f2^-1
  }
}

const Symbol kLetters[4] = {{0, false}, {0, true}, {1, false}, {1, true}};

}  // namespace

MobiusElement g2_element(const Word& word) {
  MobiusElement out;
  for (const Symbol& s : word.symbols) out = letter_element(s).compose(out);
  return out;
}

std::string to_string(NECase c) {
  switch (c) {
    case NECase::Generic: return "generic";
    case NECase::AxisU: return "axis-u";
    case NECase::AxisV: return "axis-v";
    case NECase::DiagonalPlus: return "diagonal+";
    default: return "diagonal-";
  }
}

NECase ne_case(const ProjectiveDirection& dir) {
  const mpz_class au = abs(dir.u), av = abs(dir.v);
  if (au == 0) return NECase::AxisU;
  if (av == 0) return NECase::AxisV;
  if (dir.u == dir.v) return NECase::DiagonalPlus;
  if (dir.u == -dir.v) return NECase::DiagonalMinus;
  return NECase::Generic;
}

Word greedy_word(const ProjectiveDirection& dir, int n) {
  Word out;
  ProjectiveDirection cur = dir;
  mpz_class cur_norm = cur.norm_squared();
  for (int step = 0; step < n; ++step) {
    int best = -1;
    mpz_class best_norm = cur_norm;
    ProjectiveDirection best_dir = cur;
    for (int k = 0; k < 4; ++k) {
      ProjectiveDirection cand = act_letter(kLetters[k], cur);
      mpz_class nn = cand.norm_squared();
      if (nn < best_norm) {
        best_norm = nn;
        best = k;
        best_dir = cand;
      } else if (best >= 0 && nn == best_norm) {
        throw NonGenericError("greedy_word: tie between letters", step + 1);
      }
    }
    if (best < 0)
      throw NonGenericError("greedy_word: no norm-decreasing letter at " + cur.repr(), step + 1);
    out.symbols.push_back(kLetters[best]);
    cur = best_dir;
    cur_norm = best_norm;
  }
  return out;
}

namespace {

struct BruteState {
  mpz_class best_norm;
  Word best_word;
};

void brute_dfs(const ProjectiveDirection& cur, Word& word, int depth, int max_depth,
               BruteState& st) {
  if (cur.norm_squared() < st.best_norm) {
    st.best_norm = cur.norm_squared();
    st.best_word = word;
  }
  if (depth == max_depth) return;
  for (int k = 0; k < 4; ++k) {
    if (!word.symbols.empty() && word.symbols.back() == kLetters[k].inverted()) continue;
    word.symbols.push_back(kLetters[k]);
    brute_dfs(act_letter(kLetters[k], cur), word, depth + 1, max_depth, st);
    word.symbols.pop_back();
  }
}

}  // namespace

BruteForceResult brute_force_max(const ProjectiveDirection& dir, int n, int cap) {
  if (n < 0) throw Error("brute_force_max: negative length");
  if (n > cap) throw Error("brute_force_max: length exceeds cap");
  // maximizing the derivative |v|^2/|Fv|^2 over words is minimizing the
  // final squared norm, an exact integer comparison
  BruteState st{dir.norm_squared(), Word{}};
  Word scratch;
  brute_dfs(dir, scratch, 0, n, st);
  BruteForceResult out;
  out.word = st.best_word;
  out.max_log_derivative = log_mpz(dir.norm_squared()) - log_mpz(st.best_norm);
  return out;
}

double quotient_S(const CirclePoint& p) {
  const CirclePoint q = to_projective(p);
  const double theta = q.coord;
  if (theta <= M_PI / 4 || theta >= 3 * M_PI / 4) return std::fabs(std::tan(theta));
  return std::fabs(1.0 / std::tan(theta));
}

double phi_tilde(double x) {
  if (x < 0.0 || x > 1.0) throw Error("phi_tilde: x outside [0,1]");
  if (x <= 1.0 / 3.0) return x / (1.0 - 2.0 * x);
  if (x <= 0.5) return (1.0 - 2.0 * x) / x;
  return (2.0 * x - 1.0) / x;
}

double phi_tilde_derivative(double x) {
  if (x < 0.0 || x > 1.0) throw Error("phi_tilde_derivative: x outside [0,1]");
  if (x <= 1.0 / 3.0) {
    const double d = 1.0 - 2.0 * x;
    return 1.0 / (d * d);
  }
  return 1.0 / (x * x);  // |ddx| of both outer branches
}

Symbol expanding_letter(double theta) {
  const double u = std::cos(theta), v = std::sin(theta);
  int best = -1;
  double best_norm = 1.0;
  const double mats[4][4] = {{1, 2, 0, 1}, {1, -2, 0, 1}, {1, 0, 2, 1}, {1, 0, -2, 1}};
  for (int k = 0; k < 4; ++k) {
    const double iu = mats[k][0] * u + mats[k][1] * v;
    const double iv = mats[k][2] * u + mats[k][3] * v;
    const double n2 = iu * iu + iv * iv;
    if (n2 < best_norm) {
      best_norm = n2;
      best = k;
    }
  }
  // ambiguity margin: directions within double resolution of the
  // norm-preserving set are reported non-generic rather than guessed
  if (best < 0 || best_norm >= 1.0 - 1e-12)
    throw NonGenericError("expanding_letter: no clearly expanding letter", 1);
  return kLetters[best];
}

double semiconjugacy_defect(const CirclePoint& theta0, int steps) {
  const CirclePoint p = to_projective(theta0);
  double theta = p.coord;
  double worst = 0.0;
  for (int k = 0; k < steps; ++k) {
    const Symbol s = expanding_letter(theta);
    const MobiusElement g = letter_element(s);
    const double image = g.act_angle(theta);
    const double lhs = quotient_S(CirclePoint::projective(image));
    const double rhs = phi_tilde(quotient_S(CirclePoint::projective(theta)));
    worst = std::max(worst, std::fabs(lhs - rhs));
    theta = image;
  }
  return worst;
}

PeriodTwo period_two_point() {
  // phi_tilde^2 on (1/4, 1/3) is (4x-1)/x; bisect its fixed-point equation
  auto h = [](double x) { return phi_tilde(phi_tilde(x)) - x; };
  double lo = 0.25 + 1e-9, hi = 1.0 / 3.0 - 1e-9;
  if (h(lo) >= 0 || h(hi) <= 0) throw Error("period_two_point: bracket failed");
  for (int i = 0; i < 200 && hi - lo > 1e-16; ++i) {
    const double mid = 0.5 * (lo + hi);
    (h(mid) < 0 ? lo : hi) = mid;
  }
  const double a = 0.5 * (lo + hi);
  return PeriodTwo{a, phi_tilde(a)};
}

FirstReturn first_return(double x, long max_iter) {
  static const PeriodTwo j = period_two_point();
  // membership with a boundary tolerance: the endpoints are a repelling
  // period-two orbit known only to double precision
  const double tol = 1e-12;
  auto inside = [&](double p) { return p >= j.a - tol && p < j.b - tol; };
  if (!inside(x)) throw Error("first_return: x outside the fundamental domain [a,b)");
  double cur = x;
  for (long n = 1; n <= max_iter; ++n) {
    cur = phi_tilde(cur);
    if (inside(cur)) return FirstReturn{cur, n};
  }
  throw IterationCapError("first_return: max_iter exceeded");
}

double occupation_fraction(double x, long n, double eps) {
  if (n < 1) throw Error("occupation_fraction: n must be positive");
  if (eps <= 0 || eps >= 0.25) throw Error("occupation_fraction: eps outside (0, 1/4)");
  long hits = 0;
  double cur = x;
  for (long i = 0; i < n; ++i) {
    if (cur < eps || cur > 1.0 - eps) ++hits;
    cur = phi_tilde(cur);
  }
  return static_cast<double>(hits) / static_cast<double>(n);
}

std::vector<std::pair<long, double>> lyapunov_expansion_profile(
    const ProjectiveDirection& dir, const std::vector<long>& checkpoints) {
  if (checkpoints.empty()) throw Error("lyapunov_expansion_profile: no checkpoints");
  std::vector<long> cps = checkpoints;
  std::sort(cps.begin(), cps.end());
  const long n = cps.back();
  const double log_start = log_mpz(dir.norm_squared());

  std::vector<std::pair<long, double>> out;
  size_t next_cp = 0;
  ProjectiveDirection cur = dir;
  mpz_class cur_norm = cur.norm_squared();
  for (long step = 0; step < n; ++step) {
    int best = -1;
    mpz_class best_norm = cur_norm;
    ProjectiveDirection best_dir = cur;
    for (int k = 0; k < 4; ++k) {
      ProjectiveDirection cand = act_letter(kLetters[k], cur);
      mpz_class nn = cand.norm_squared();
      if (nn < best_norm) {
        best_norm = nn;
        best = k;
        best_dir = cand;
      } else if (best >= 0 && nn == best_norm) {
        throw NonGenericError("lyapunov_expansion_profile: tie", static_cast<int>(step) + 1);
      }
    }
    if (best < 0)
      throw NonGenericError("lyapunov_expansion_profile: non-generic state",
                            static_cast<int>(step) + 1);
    cur = best_dir;
    cur_norm = best_norm;
    while (next_cp < cps.size() && step + 1 == cps[next_cp]) {
      out.emplace_back(cps[next_cp], (log_start - log_mpz(cur_norm)) / cps[next_cp]);
      ++next_cp;
    }
  }
  return out;
}

double lyapunov_expansion_estimate(const ProjectiveDirection& dir, long n) {
  return lyapunov_expansion_profile(dir, {n}).front().second;
}

ProjectiveDirection direction_near_angle(double theta, int bits, std::mt19937_64& rng) {
  if (bits < 64) bits = 64;
  // exact double components scaled to `bits` bits, bits below the double
  // resolution filled from the rng
  // (explicit return type: the gmpxx expression template must not outlive
  // the locals it references)
  auto pad = [&](double comp) -> mpz_class {
    mpz_class base(comp * 9007199254740992.0);  // 2^53 scaling
    mpz_class acc = 0;
    int need = std::max(0, bits - 53);
    const int total = need;
    while (need > 0) {
      const int chunk = std::min(need, 62);
      acc <<= chunk;
      acc += static_cast<unsigned long>(rng() & ((1ull << chunk) - 1));
      need -= chunk;
    }
    mpz_class out = base;
    mpz_mul_2exp(out.get_mpz_t(), out.get_mpz_t(), total);
    return out + (base < 0 ? -acc : acc);
  };
  return ProjectiveDirection(pad(std::cos(theta)), pad(std::sin(theta)));
}

ProjectiveDirection random_direction(int bits, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  return direction_near_angle(U(rng) * M_PI, bits, rng);
}

}  // namespace circledyn
