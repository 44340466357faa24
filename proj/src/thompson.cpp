#include "circledyn/thompson.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "circledyn/tolerances.hpp"

namespace circledyn {

namespace {

mpq_class pow2q(int e) {
  mpq_class q(1);
  if (e >= 0)
    mpq_mul_2exp(q.get_mpq_t(), q.get_mpq_t(), e);
  else
    mpq_div_2exp(q.get_mpq_t(), q.get_mpq_t(), -e);
  return q;
}

mpz_class floor_q(const mpq_class& q) {
  mpz_class out;
  mpz_fdiv_q(out.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return out;
}

}  // namespace

bool is_dyadic(const mpq_class& q) {
  return mpz_popcount(q.get_den_mpz_t()) == 1;  // denominator 2^k (canonical mpq)
}

int denominator_exponent(const mpq_class& q) {
  if (!is_dyadic(q)) throw Error("denominator_exponent: not dyadic");
  return static_cast<int>(mpz_sizeinbase(q.get_den_mpz_t(), 2)) - 1;
}

ThompsonElement::ThompsonElement(std::vector<Piece> pieces) : pieces_(std::move(pieces)) {
  // merge adjacent pieces with identical affine data
  std::vector<Piece> merged;
  for (const Piece& p : pieces_) {
    if (!merged.empty() && merged.back().slope_exp == p.slope_exp &&
        merged.back().offset == p.offset)
      continue;
    merged.push_back(p);
  }
  pieces_ = std::move(merged);
  validate();
}

void ThompsonElement::validate() const {
  if (pieces_.empty()) throw Error("ThompsonElement: no pieces");
  if (pieces_.front().left != 0) throw Error("ThompsonElement: first breakpoint must be 0");
  mpq_class total = 0;
  for (size_t i = 0; i < pieces_.size(); ++i) {
    const Piece& p = pieces_[i];
    const mpq_class right = i + 1 < pieces_.size() ? pieces_[i + 1].left : mpq_class(1);
    if (!(p.left < right)) throw Error("ThompsonElement: breakpoints not increasing");
    if (!is_dyadic(p.left) || !is_dyadic(p.offset))
      throw Error("ThompsonElement: non-dyadic data");
    const mpq_class slope = pow2q(p.slope_exp);
    const mpq_class img_lo = slope * p.left + p.offset;
    const mpq_class img_hi = slope * right + p.offset;
    if (img_lo < 0 || img_lo >= 1 || img_hi <= 0 || img_hi > 1)
      throw Error("ThompsonElement: piece image leaves [0,1]");
    total += img_hi - img_lo;
    // continuity with the next piece (mod 1 at the wrap)
    const Piece& q = pieces_[(i + 1) % pieces_.size()];
    mpq_class next_val = pow2q(q.slope_exp) * ((i + 1 < pieces_.size()) ? right : mpq_class(0)) + q.offset;
    mpq_class here = img_hi;
    if (here == 1) here = 0;
    if (here != next_val) throw Error("ThompsonElement: discontinuous at a breakpoint");
  }
  if (total != 1) throw Error("ThompsonElement: total image length must be 1");
}

ThompsonElement ThompsonElement::from_table(
    const std::vector<std::tuple<mpq_class, mpq_class, int>>& rows) {
  std::vector<Piece> pieces;
  pieces.reserve(rows.size());
  for (const auto& [left, image, s] : rows)
    pieces.push_back(Piece{left, s, image - pow2q(s) * left});
  return ThompsonElement(std::move(pieces));
}

ThompsonElement ThompsonElement::identity() {
  return from_table({{mpq_class(0), mpq_class(0), 0}});
}

size_t ThompsonElement::piece_index_exact(const mpq_class& x) const {
  size_t lo = 0, hi = pieces_.size();
  while (hi - lo > 1) {
    const size_t mid = (lo + hi) / 2;
    if (pieces_[mid].left <= x)
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

mpq_class ThompsonElement::evaluate_exact(const mpq_class& x) const {
  if (x < 0 || x >= 1) throw Error("ThompsonElement::evaluate_exact: x outside [0,1)");
  const Piece& p = pieces_[piece_index_exact(x)];
  mpq_class v = pow2q(p.slope_exp) * x + p.offset;
  if (v == 1) v = 0;
  return v;
}

mpq_class ThompsonElement::invert_exact(const mpq_class& y) const {
  if (y < 0 || y >= 1) throw Error("ThompsonElement::invert_exact: y outside [0,1)");
  for (size_t i = 0; i < pieces_.size(); ++i) {
    const Piece& p = pieces_[i];
    const mpq_class right = i + 1 < pieces_.size() ? pieces_[i + 1].left : mpq_class(1);
    const mpq_class slope = pow2q(p.slope_exp);
    const mpq_class img_lo = slope * p.left + p.offset;
    const mpq_class img_hi = slope * right + p.offset;
    if (y >= img_lo && y < img_hi) return (y - p.offset) / slope;
  }
  throw Error("ThompsonElement::invert_exact: value not covered (should not happen)");
}

double ThompsonElement::evaluate(double x) const {
  const double xr = reduce_coordinate(x, Chart::Unit);
  size_t lo = 0, hi = pieces_.size();
  while (hi - lo > 1) {
    const size_t mid = (lo + hi) / 2;
    if (pieces_[mid].left.get_d() <= xr)
      lo = mid;
    else
      hi = mid;
  }
  const Piece& p = pieces_[lo];
  const double v = std::ldexp(xr, p.slope_exp) + p.offset.get_d();
  return reduce_coordinate(v, Chart::Unit);
}

double ThompsonElement::derivative(double x, std::optional<Side> side) const {
  const double xr = reduce_coordinate(x, Chart::Unit);
  for (const Piece& p : pieces_) {
    if (xr == p.left.get_d() && !side.has_value())
      throw BreakpointError("ThompsonElement::derivative: at a breakpoint, pass a side");
  }
  size_t lo = 0, hi = pieces_.size();
  while (hi - lo > 1) {
    const size_t mid = (lo + hi) / 2;
    if (pieces_[mid].left.get_d() <= xr)
      lo = mid;
    else
      hi = mid;
  }
  if (side == Side::Left && pieces_[lo].left.get_d() == xr)
    lo = (lo + pieces_.size() - 1) % pieces_.size();
  return std::ldexp(1.0, pieces_[lo].slope_exp);
}

ThompsonElement ThompsonElement::compose(const ThompsonElement& other) const {
  // this after other: x -> this(other(x))
  std::set<mpq_class> cuts;
  for (const Piece& p : other.pieces_) cuts.insert(p.left);
  for (const Piece& p : pieces_) cuts.insert(other.invert_exact(p.left));
  std::vector<Piece> pieces;
  for (const mpq_class& left : cuts) {
    const Piece& pf = other.pieces_[other.piece_index_exact(left)];
    const mpq_class mid = other.evaluate_exact(left);
    const Piece& pg = pieces_[piece_index_exact(mid)];
    const int s = pf.slope_exp + pg.slope_exp;
    mpq_class value = pow2q(pg.slope_exp) * mid + pg.offset;
    if (value == 1) value = 0;
    pieces.push_back(Piece{left, s, value - pow2q(s) * left});
  }
  return ThompsonElement(std::move(pieces));
}

ThompsonElement ThompsonElement::inverse() const {
  std::vector<Piece> pieces;
  pieces.reserve(pieces_.size());
  for (const Piece& p : pieces_) {
    const mpq_class slope = pow2q(p.slope_exp);
    const mpq_class img_lo = slope * p.left + p.offset;
    pieces.push_back(Piece{img_lo, -p.slope_exp, -p.offset / slope});
  }
  std::sort(pieces.begin(), pieces.end(),
            [](const Piece& a, const Piece& b) { return a.left < b.left; });
  return ThompsonElement(std::move(pieces));
}

bool ThompsonElement::operator==(const ThompsonElement& o) const {
  if (pieces_.size() != o.pieces_.size()) return false;
  for (size_t i = 0; i < pieces_.size(); ++i)
    if (pieces_[i].left != o.pieces_[i].left || pieces_[i].slope_exp != o.pieces_[i].slope_exp ||
        pieces_[i].offset != o.pieces_[i].offset)
      return false;
  return true;
}

std::string ThompsonElement::key() const {
  std::ostringstream out;
  for (const Piece& p : pieces_)
    out << p.left.get_str() << "^" << p.slope_exp << "+" << p.offset.get_str() << ";";
  return out.str();
}

int ThompsonElement::max_denominator_exponent() const {
  int worst = 0;
  for (size_t i = 0; i < pieces_.size(); ++i) {
    const Piece& p = pieces_[i];
    worst = std::max(worst, denominator_exponent(p.left));
    const mpq_class img = pow2q(p.slope_exp) * p.left + p.offset;
    worst = std::max(worst, denominator_exponent(img));
  }
  return worst;
}

ThompsonElement thompson_A() {
  return ThompsonElement::from_table({{mpq_class(0), mpq_class(0), -1},
                                      {mpq_class(1, 2), mpq_class(1, 4), 0},
                                      {mpq_class(3, 4), mpq_class(1, 2), 1}});
}

ThompsonElement thompson_B() {
  return ThompsonElement::from_table({{mpq_class(0), mpq_class(0), 0},
                                      {mpq_class(1, 2), mpq_class(1, 2), -1},
                                      {mpq_class(3, 4), mpq_class(5, 8), 0},
                                      {mpq_class(7, 8), mpq_class(3, 4), 1}});
}

ThompsonElement thompson_C() {
  return ThompsonElement::from_table({{mpq_class(0), mpq_class(3, 4), -1},
                                      {mpq_class(1, 2), mpq_class(0), 1},
                                      {mpq_class(3, 4), mpq_class(1, 2), 0}});
}

std::map<std::string, ThompsonElement> load_generator_tables(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("load_generator_tables: cannot open " + path);
  std::map<std::string, ThompsonElement> out;
  std::string line;
  std::string name;
  int remaining = 0;
  std::vector<std::tuple<mpq_class, mpq_class, int>> rows;
  auto flush = [&]() {
    if (!name.empty()) out.emplace(name, ThompsonElement::from_table(rows));
    rows.clear();
    name.clear();
  };
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    if (remaining == 0) {
      flush();
      ls >> name >> remaining;
      if (!ls || remaining <= 0) throw Error("load_generator_tables: bad header line: " + line);
    } else {
      std::string a, b;
      int s = 0;
      ls >> a >> b >> s;
      if (!ls) throw Error("load_generator_tables: bad row: " + line);
      mpq_class qa(a), qb(b);
      qa.canonicalize();
      qb.canonicalize();
      rows.emplace_back(qa, qb, s);
      --remaining;
    }
  }
  if (remaining != 0) throw Error("load_generator_tables: truncated table");
  flush();
  return out;
}

double SmoothDoubling::lift_at(double x) const {
  // extend the lift to the real line: lift(x + 1) = lift(x) + 2
  const double shifted = x - base;
  const double q = std::floor(shifted);
  return lift_value(base + (shifted - q)) + 2.0 * q;
}

double SmoothDoubling::value(double x) const {
  return reduce_coordinate(lift_at(reduce_coordinate(x, Chart::Unit)), Chart::Unit);
}

double SmoothDoubling::deriv(double x) const {
  const double xr = reduce_coordinate(x, Chart::Unit);
  const double shifted = xr - base;
  const double q = std::floor(shifted);
  return lift_deriv(base + (shifted - q));
}

int SmoothDoubling::digit(double x) const {
  const double xr = reduce_coordinate(x, Chart::Unit);
  const double lifted = xr >= base ? xr : xr + 1.0;
  return lifted < split ? 0 : 1;
}

double SmoothDoubling::inverse_branch(double y, int bit) const {
  const double yr = reduce_coordinate(y, Chart::Unit);
  const double target = (yr >= base ? yr : yr + 1.0) + bit;
  double lo = bit == 0 ? base : split;
  double hi = bit == 0 ? split : base + 1.0;
  // bisection bracket, then Newton polish against the lift
  double z = invert_monotone([this](double t) { return lift_at(t); }, lo, hi, target, 1e-9);
  for (int i = 0; i < 4; ++i) {
    const double d = lift_deriv(z);
    if (d <= 0) break;
    double step = (lift_at(z) - target) / d;
    double nz = z - step;
    if (nz < lo || nz > hi) break;
    z = nz;
    if (std::fabs(step) < tol::kNewtonPolish) break;
  }
  if (std::fabs(lift_at(z) - target) > tol::kInverseResidual)
    z = invert_monotone([this](double t) { return lift_at(t); }, lo, hi, target, 1e-15);
  return reduce_coordinate(z, Chart::Unit);
}

void SmoothDoubling::check_invariants(int grid) const {
  if (circle_distance(CirclePoint::unit(value(base)), CirclePoint::unit(base)) > 1e-12)
    throw Error(name + ": base point not fixed");
  for (double p : parabolic)
    if (std::fabs(deriv(p) - 1.0) > 1e-9)
      throw Error(name + ": declared parabolic point has derivative != 1");
  for (int i = 0; i < grid; ++i) {
    const double x = static_cast<double>(i) / grid;
    bool skip = false;
    for (double p : parabolic)
      if (circle_distance(CirclePoint::unit(x), CirclePoint::unit(p)) < 1e-2) skip = true;
    if (gap_variant && x >= parabolic.front() && x <= parabolic.back()) skip = true;
    if (!skip && deriv(x) <= 1.0)
      throw Error(name + ": derivative <= 1 away from the parabolic set");
  }
}

SmoothDoubling SmoothDoubling::minimal_default() {
  SmoothDoubling phi;
  phi.name = "sine-smoothed";
  phi.base = 0.0;
  phi.split = 0.5;
  phi.parabolic = {0.0};
  phi.lift_value = [](double x) { return 2.0 * x - std::sin(2.0 * M_PI * x) / (2.0 * M_PI); };
  phi.lift_deriv = [](double x) { return 2.0 - std::cos(2.0 * M_PI * x); };
  return phi;
}

SmoothDoubling SmoothDoubling::etienne_variant() {
  SmoothDoubling phi;
  phi.name = "sine-smoothed-3";
  phi.base = 0.0;
  phi.split = 0.5;
  phi.parabolic = {0.0, 1.0 / 3.0, 2.0 / 3.0};
  phi.lift_value = [](double x) { return 2.0 * x - std::sin(6.0 * M_PI * x) / (6.0 * M_PI); };
  phi.lift_deriv = [](double x) { return 2.0 - std::cos(6.0 * M_PI * x); };
  return phi;
}

SmoothDoubling SmoothDoubling::exact_doubling() {
  SmoothDoubling phi;
  phi.name = "doubling";
  phi.base = 0.0;
  phi.split = 0.5;
  phi.parabolic = {};
  phi.lift_value = [](double x) { return 2.0 * x; };
  phi.lift_deriv = [](double) { return 2.0; };
  return phi;
}

SmoothDoubling SmoothDoubling::nonminimal_default() {
  SmoothDoubling phi;
  phi.name = "gap-doubling";
  phi.base = 0.4;
  phi.parabolic = {0.4, 0.6};
  phi.gap_variant = true;
  constexpr double c = 100.0;   // bump inside the gap [0.4, 0.6]
  constexpr double L = 0.8;     // expanding stretch length
  const double K = 30.0 / (L * L * L * L * L);  // integral of K p^2 (L-p)^2 over [0,L] is 1
  phi.lift_value = [K](double x) {
    if (x <= 0.6) {
      const double q = (x - 0.4) * (0.6 - x);
      return x + c * q * q * q;
    }
    const double p = x - 0.6;
    return x + K * (L * L * p * p * p / 3.0 - L * p * p * p * p / 2.0 + p * p * p * p * p / 5.0);
  };
  phi.lift_deriv = [K](double x) {
    if (x <= 0.6) {
      const double q = (x - 0.4) * (0.6 - x);
      return 1.0 + 3.0 * c * q * q * (1.0 - 2.0 * x);
    }
    const double p = x - 0.6;
    return 1.0 + K * p * p * (L - p) * (L - p);
  };
  phi.split = invert_monotone(phi.lift_value, 0.6, 1.4, 1.4, 1e-15);
  return phi;
}

GSRealization::GSRealization(ThompsonElement element, SmoothDoubling phi)
    : element_(std::move(element)), phi_(std::move(phi)) {
  for (size_t i = 0; i < element_.pieces().size(); ++i) {
    const auto& p = element_.pieces()[i];
    const mpq_class right =
        i + 1 < element_.pieces().size() ? element_.pieces()[i + 1].left : mpq_class(1);
    const int jt = denominator_exponent(p.offset);
    // the local model needs l >= max(0, s, s + jt); pieces wider than the
    // matching dyadic cell are subdivided along the generation-l grid
    const int l = std::max({0, p.slope_exp, p.slope_exp + jt});
    const int k = l - p.slope_exp;
    if (l > 64 || k > 64) throw Error("GSRealization: piece needs an oversized cell");
    const mpq_class scale = pow2q(l);
    const mpz_class a_start = floor_q(p.left * scale);
    mpz_class a = a_start;
    for (;; ++a) {
      mpq_class cell_lo(a, scale.get_num());
      cell_lo.canonicalize();
      if (cell_lo >= right) break;
      const mpq_class sub_left = std::max(p.left, cell_lo);
      PieceData d;
      d.left = sub_left;
      d.k = k;
      d.l = l;
      const mpq_class mval = pow2q(k) * p.offset + a;
      if (mval.get_den() != 1) throw Error("GSRealization: image cell index not integral");
      const mpz_class m = mval.get_num();
      if (m < 0 || m >= pow2q(k).get_num()) throw Error("GSRealization: image cell out of range");
      d.address.resize(k);
      for (int bi = 0; bi < k; ++bi)
        d.address[bi] = mpz_tstbit(m.get_mpz_t(), k - 1 - bi);
      data_.push_back(std::move(d));
    }
  }
}

size_t GSRealization::locate_piece(double x) const {
  if (data_.size() == 1) return 0;
  double xc = reduce_coordinate(x, Chart::Unit);
  mpz_class cell = 0;
  for (int depth = 1; depth <= tol::kItineraryDepthCap; ++depth) {
    cell = cell * 2 + phi_.digit(xc);
    xc = phi_.value(xc);
    mpq_class lo(cell, pow2q(depth).get_num());
    mpq_class hi(cell + 1, pow2q(depth).get_num());
    lo.canonicalize();
    hi.canonicalize();
    // candidate: last piece with left <= lo
    size_t idx = data_.size() - 1;
    for (size_t i = 0; i + 1 < data_.size(); ++i)
      if (data_[i].left <= lo && lo < data_[i + 1].left) idx = i;
    const mpq_class right = idx + 1 < data_.size() ? data_[idx + 1].left : mpq_class(1);
    if (data_[idx].left <= lo && hi <= right) return idx;
  }
  throw DepthCapError("GSRealization: itinerary did not resolve (point at a piece boundary?)");
}

GSValue GSRealization::evaluate(double x) const {
  const size_t idx = locate_piece(x);
  const PieceData& d = data_[idx];
  double w = reduce_coordinate(x, Chart::Unit);
  double log_fwd = 0.0;
  for (int i = 0; i < d.l; ++i) {
    log_fwd += std::log(phi_.deriv(w));
    w = phi_.value(w);
  }
  double log_back = 0.0;
  for (int i = d.k - 1; i >= 0; --i) {
    w = phi_.inverse_branch(w, d.address[i]);
    log_back += std::log(phi_.deriv(w));
  }
  return GSValue{w, std::exp(log_fwd - log_back)};
}

GSRealization GSRealization::inverse() const { return GSRealization(element_.inverse(), phi_); }

MapPtr PLMap::compose_exact(const MapPtr& other) const {
  const auto* p = dynamic_cast<const PLMap*>(other.get());
  if (!p) return nullptr;
  return std::make_shared<PLMap>(elem_.compose(p->elem_));
}

MapPtr GSMap::compose_exact(const MapPtr& other) const {
  const auto* p = dynamic_cast<const GSMap*>(other.get());
  if (!p || p->gs_.phi().name != gs_.phi().name) return nullptr;
  return std::make_shared<GSMap>(GSRealization(gs_.element().compose(p->gs_.element()), gs_.phi()));
}

MapFamily gs_family(const SmoothDoubling& phi) {
  std::vector<MapPtr> gens = {std::make_shared<GSMap>(GSRealization(thompson_A(), phi)),
                              std::make_shared<GSMap>(GSRealization(thompson_B(), phi)),
                              std::make_shared<GSMap>(GSRealization(thompson_C(), phi))};
  return MapFamily(std::move(gens));
}

double ne_probe(const SmoothDoubling& phi, double x, int depth) {
  struct Gen {
    GSRealization g;
    int id;
  };
  std::vector<Gen> gens;
  const ThompsonElement tables[3] = {thompson_A(), thompson_B(), thompson_C()};
  for (int i = 0; i < 3; ++i) {
    gens.push_back({GSRealization(tables[i], phi), 2 * i});
    gens.push_back({GSRealization(tables[i].inverse(), phi), 2 * i + 1});
  }
  double best = 1.0;  // identity
  // DFS over freely reduced words, chaining evaluations
  struct Frame {
    double point;
    double deriv;
    int last;  // generator id applied last, -1 at the root
    int depth;
  };
  std::vector<Frame> stack = {{reduce_coordinate(x, Chart::Unit), 1.0, -1, 0}};
  while (!stack.empty()) {
    const Frame f = stack.back();
    stack.pop_back();
    if (f.depth == depth) continue;
    for (const Gen& g : gens) {
      if (f.last >= 0 && (g.id ^ 1) == f.last) continue;  // free reduction
      const GSValue v = g.g.evaluate(f.point);
      const double nd = f.deriv * v.derivative;
      best = std::max(best, nd);
      stack.push_back({v.value, nd, g.id, f.depth + 1});
    }
  }
  return best;
}

PhiReturnHandle phi_first_return(const SmoothDoubling& phi) {
  // period-two point of Lift^2(x) = x + 1 inside (base, split), with the
  // lift extended to the real line
  auto lift2 = [&phi](double x) {
    const double y = phi.lift_value(x);
    const double q = std::floor(y - phi.base);
    return phi.lift_value(phi.base + (y - phi.base - q)) + 2.0 * q;
  };
  auto g = [&](double x) { return lift2(x) - x - 1.0; };
  double lo = phi.base + 1e-7, hi = phi.split - 1e-12;
  if (g(lo) >= 0 || g(hi) <= 0)
    throw Error(phi.name + ": period-two bracket failed");
  for (int i = 0; i < 200 && hi - lo > 1e-16; ++i) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) < 0 ? lo : hi) = mid;
  }
  PhiReturnHandle out;
  out.a = reduce_coordinate(0.5 * (lo + hi), Chart::Unit);
  out.b = phi.value(out.a);
  return out;
}

FirstReturn phi_return(const SmoothDoubling& phi, const PhiReturnHandle& h, double x,
                       long max_iter) {
  const CirclePoint a = CirclePoint::unit(h.a);
  const double len = forward_gap(a, CirclePoint::unit(h.b));
  // J = [a, b) with a boundary tolerance (the endpoints are a repelling
  // period-two orbit known only to double precision)
  const double tol = 1e-12;
  auto inside = [&](double p) {
    const double gap = forward_gap(a, CirclePoint::unit(p));
    return gap < len - tol || gap > 1.0 - tol;
  };
  if (!inside(reduce_coordinate(x, Chart::Unit)))
    throw Error("phi_return: x outside the fundamental domain [a,b)");
  double cur = x;
  for (long n = 1; n <= max_iter; ++n) {
    cur = phi.value(cur);
    if (inside(cur)) return FirstReturn{cur, n};
  }
  throw IterationCapError("phi_return: max_iter exceeded");
}

double time_average_concentration(const SmoothDoubling& phi, double x, long n, double eps) {
  if (n < 1) throw Error("time_average_concentration: n must be positive");
  long hits = 0;
  double cur = reduce_coordinate(x, Chart::Unit);
  for (long i = 0; i < n; ++i) {
    for (double p : phi.parabolic)
      if (circle_distance(CirclePoint::unit(cur), CirclePoint::unit(p)) < eps) {
        ++hits;
        break;
      }
    cur = phi.value(cur);
  }
  return static_cast<double>(hits) / static_cast<double>(n);
}

GapTree gap_tree(const SmoothDoubling& phi_nm, int depth) {
  if (phi_nm.parabolic.size() != 2)
    throw Error("gap_tree: needs the nonminimal two-fixed-point variant");
  const double xm = phi_nm.parabolic[0];
  const double xp = phi_nm.parabolic[1];
  GapTree out;
  if (depth <= 0) {
    out.disjoint = true;
    return out;
  }
  struct Node {
    double y, left, right;
    double log_weight;
  };
  std::vector<Node> level;
  {
    // the one preimage of x+ away from the gap (branch 1)
    Node n0;
    n0.y = phi_nm.inverse_branch(xp, 1);
    n0.left = phi_nm.inverse_branch(xm, 1);
    n0.right = n0.y;
    n0.log_weight = std::log(phi_nm.deriv(n0.y));
    level.push_back(n0);
    out.nodes.push_back(GapNode{1, n0.y, n0.left, n0.right, std::exp(n0.log_weight)});
  }
  for (int n = 2; n <= depth; ++n) {
    std::vector<Node> next;
    next.reserve(level.size() * 2);
    for (const Node& nd : level) {
      for (int bit = 0; bit <= 1; ++bit) {
        Node ch;
        ch.y = phi_nm.inverse_branch(nd.y, bit);
        ch.left = phi_nm.inverse_branch(nd.left, bit);
        ch.right = ch.y;
        ch.log_weight = nd.log_weight + std::log(phi_nm.deriv(ch.y));
        next.push_back(ch);
        out.nodes.push_back(GapNode{n, ch.y, ch.left, ch.right, std::exp(ch.log_weight)});
      }
    }
    level = std::move(next);
  }
  // disjointness and the uniform constant; spans as (start, end) in [0,1)
  double min_c = HUGE_VAL, total = xp - xm;
  std::vector<std::pair<double, double>> spans;
  spans.emplace_back(xm, xp);
  for (const GapNode& nd : out.nodes) {
    const double start = reduce_coordinate(nd.left, Chart::Unit);
    const double len = forward_gap(CirclePoint::unit(nd.left), CirclePoint::unit(nd.right));
    total += len;
    min_c = std::min(min_c, nd.weight_base * len);
    spans.emplace_back(start, start + len);
  }
  std::sort(spans.begin(), spans.end());
  bool disjoint = true;
  for (size_t i = 0; i + 1 < spans.size(); ++i)
    if (spans[i].second > spans[i + 1].first + 1e-13) disjoint = false;
  out.disjoint = disjoint;
  out.min_c = out.nodes.empty() ? 0.0 : min_c;
  out.total_gap_length = total;
  return out;
}

}  // namespace circledyn
