#include "circledyn/measures.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include "circledyn/tolerances.hpp"

namespace circledyn {

CirclePoint AtomicMeasure::location(const Atom& a) {
  if (std::holds_alternative<ProjectiveDirection>(a.point))
    return std::get<ProjectiveDirection>(a.point).angle();
  return CirclePoint::unit(std::get<double>(a.point));
}

namespace {

void write_double(std::ostream& out, double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.write(buf, res.ptr - buf);
}

}  // namespace

void AtomicMeasure::serialize(std::ostream& out) const {
  out << "atomic-measure delta=";
  write_double(out, delta);
  out << " truncation=";
  write_double(out, truncation);
  out << " tail=";
  write_double(out, tail_bound);
  out << " total=";
  write_double(out, total);
  out << " atoms=" << atoms.size() << "\n";
  for (const Atom& a : atoms) {
    if (std::holds_alternative<ProjectiveDirection>(a.point))
      out << std::get<ProjectiveDirection>(a.point).repr();
    else {
      out << "x=";
      write_double(out, std::get<double>(a.point));
    }
    out << " ";
    write_double(out, a.weight);
    out << "\n";
  }
}

AtomicMeasure AtomicMeasure::deserialize(std::istream& in) {
  AtomicMeasure mu;
  std::string header;
  if (!std::getline(in, header)) throw Error("AtomicMeasure: empty stream");
  size_t natoms = 0;
  {
    std::istringstream hs(header);
    std::string tag;
    hs >> tag;
    if (tag != "atomic-measure") throw Error("AtomicMeasure: bad header");
    std::string kv;
    while (hs >> kv) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw Error("AtomicMeasure: bad header field " + kv);
      const std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
      if (key == "delta")
        mu.delta = std::stod(val);
      else if (key == "truncation")
        mu.truncation = std::stod(val);
      else if (key == "tail")
        mu.tail_bound = std::stod(val);
      else if (key == "total")
        mu.total = std::stod(val);
      else if (key == "atoms")
        natoms = std::stoul(val);
    }
  }
  std::string line;
  while (natoms-- > 0) {
    if (!std::getline(in, line)) throw Error("AtomicMeasure: truncated atom list");
    std::istringstream ls(line);
    std::string pt;
    double w = 0.0;
    ls >> pt >> w;
    Atom a;
    a.weight = w;
    if (pt.rfind("x=", 0) == 0) {
      a.point = std::stod(pt.substr(2));
    } else {
      // "(u:v)"
      const auto colon = pt.find(':');
      if (pt.front() != '(' || pt.back() != ')' || colon == std::string::npos)
        throw Error("AtomicMeasure: bad atom point " + pt);
      a.point = ProjectiveDirection(mpz_class(pt.substr(1, colon - 1)),
                                    mpz_class(pt.substr(colon + 1, pt.size() - colon - 2)));
    }
    mu.atoms.push_back(std::move(a));
  }
  return mu;
}

void EmpiricalMeasure::add(double x) {
  const double xr = reduce_coordinate(x, Chart::Unit);
  int i = static_cast<int>(xr * bins);
  if (i >= bins) i = bins - 1;
  ++counts[i];
  ++total;
}

double EmpiricalMeasure::mass_around(double x, double eps) const {
  if (total == 0) return 0.0;
  if (eps >= 0.5) return 1.0;
  const double lo = x - eps, hi = x + eps;
  double acc = 0.0;
  // walk the bins overlapping [lo, hi] (mod 1), fractional at the edges
  const double w = 1.0 / bins;
  const long ilo = static_cast<long>(std::floor(lo / w));
  const long ihi = static_cast<long>(std::floor(hi / w));
  for (long i = ilo; i <= ihi; ++i) {
    const int idx = static_cast<int>(((i % bins) + bins) % bins);
    const double bin_lo = i * w, bin_hi = (i + 1) * w;
    const double ov = std::min(hi, bin_hi) - std::max(lo, bin_lo);
    if (ov <= 0) continue;
    acc += mass(idx) * std::min(1.0, ov / w);
  }
  return acc;
}

double EmpiricalMeasure::tv_distance(const EmpiricalMeasure& o) const {
  if (bins != o.bins) throw Error("tv_distance: bin counts differ");
  double acc = 0.0;
  for (int i = 0; i < bins; ++i) acc += std::fabs(mass(i) - o.mass(i));
  return 0.5 * acc;
}

EmpiricalMeasure EmpiricalMeasure::pushforward(
    const std::vector<std::pair<MapPtr, double>>& maps) const {
  EmpiricalMeasure out(bins);
  // spread each bin's mass over its image arc (bin-center pushforward
  // misallocates visibly for concentrated measures)
  std::vector<double> acc(bins, 0.0);
  const double w = 1.0 / bins;
  for (int i = 0; i < bins; ++i) {
    if (counts[i] == 0) continue;
    for (const auto& [g, p] : maps) {
      const double period = chart_period(g->chart());
      const double ylo = g->apply(CirclePoint{i * w * period, g->chart()}).coord / period;
      const double yhi = g->apply(CirclePoint{(i + 1) * w * period, g->chart()}).coord / period;
      double len = yhi - ylo;
      if (len <= 0) len += 1.0;
      const double mass = p * counts[i];
      const long jlo = static_cast<long>(std::floor(ylo / w));
      const long jhi = static_cast<long>(std::floor((ylo + len) / w));
      for (long j = jlo; j <= jhi; ++j) {
        const double ov = std::min(ylo + len, (j + 1) * w) - std::max(ylo, j * w);
        if (ov <= 0) continue;
        acc[static_cast<int>(((j % bins) + bins) % bins)] += mass * (ov / len);
      }
    }
  }
  out.total = 0;
  for (int i = 0; i < bins; ++i) {
    out.counts[i] = static_cast<long>(std::llround(acc[i]));
    out.total += out.counts[i];
  }
  return out;
}

double EmpiricalMeasure::sample(std::mt19937_64& rng) const {
  if (total == 0) throw Error("EmpiricalMeasure::sample: empty");
  std::uniform_int_distribution<long> pick(1, total);
  long r = pick(rng);
  int i = 0;
  for (; i < bins; ++i) {
    r -= counts[i];
    if (r <= 0) break;
  }
  if (i >= bins) i = bins - 1;
  std::uniform_real_distribution<double> U(0.0, 1.0);
  return (i + U(rng)) / bins;
}

AtomicMeasure build_psl_conformal(double delta, long R) {
  if (delta <= 1.0) throw Error("build_psl_conformal: needs delta > 1");
  if (R < 1) throw Error("build_psl_conformal: needs R >= 1");
  AtomicMeasure mu;
  mu.delta = delta;
  mu.truncation = static_cast<double>(R);
  // projective representatives: v > 0, or v = 0 and u > 0
  for (long v = 0; v <= R; ++v) {
    const long umax = static_cast<long>(std::floor(std::sqrt(static_cast<double>(R) * R - static_cast<double>(v) * v)));
    for (long u = (v == 0 ? 1 : -umax); u <= umax; ++u) {
      if (v == 0 && u != 1) continue;
      if (v > 0 && std::gcd(std::abs(u), v) != 1) continue;
      if (u * u + v * v > R * R) continue;
      AtomicMeasure::Atom a;
      a.point = ProjectiveDirection::from_ints(u, v);
      a.weight = std::pow(static_cast<double>(u) * u + static_cast<double>(v) * v, -delta);
      mu.total += a.weight;
      mu.atoms.push_back(std::move(a));
    }
  }
  // integral-comparison tail over the projective representatives
  const double rr = std::max(1.0, static_cast<double>(R) - 1.0);
  mu.tail_bound = M_PI / (delta - 1.0) * std::pow(rr, 2.0 - 2.0 * delta);
  return mu;
}

AtomicMeasure build_gs_conformal(const SmoothDoubling& phi_nm, double delta, int depth) {
  if (delta < 1.0) throw Error("build_gs_conformal: needs delta >= 1");
  const GapTree tree = gap_tree(phi_nm, depth);
  AtomicMeasure mu;
  mu.delta = delta;
  mu.truncation = depth;
  for (const GapNode& nd : tree.nodes) {
    AtomicMeasure::Atom a;
    a.point = nd.y;
    a.weight = std::pow(nd.weight_base, -delta);
    mu.total += a.weight;
    mu.atoms.push_back(std::move(a));
  }
  // the next levels are dominated by the disjointness bound sum |I_y| <= 1
  // through (phi^n)'(y) >= C / |I_y|
  if (tree.min_c > 0.0) mu.tail_bound = std::pow(tree.min_c, -delta) * 1.0;
  return mu;
}

std::vector<double> gs_partial_sums(const SmoothDoubling& phi_nm, double delta, int depth) {
  const GapTree tree = gap_tree(phi_nm, depth);
  std::vector<double> sums(depth + 1, 0.0);
  for (const GapNode& nd : tree.nodes)
    sums[nd.n] += std::pow(nd.weight_base, -delta);
  for (int i = 1; i <= depth; ++i) sums[i] += sums[i - 1];
  return sums;
}

namespace {

struct DirectionLess {
  bool operator()(const ProjectiveDirection& a, const ProjectiveDirection& b) const {
    const int c = cmp(a.u, b.u);
    if (c != 0) return c < 0;
    return cmp(a.v, b.v) < 0;
  }
};

}  // namespace

ConformalityReport conformality_defect(const AtomicMeasure& mu, const CircleMap& g,
                                       double delta) {
  ConformalityReport rep;
  rep.delta = delta;
  const bool projective = !mu.atoms.empty() &&
                          std::holds_alternative<ProjectiveDirection>(mu.atoms.front().point);
  if (projective) {
    const auto* mm = dynamic_cast<const MobiusMap*>(&g);
    if (!mm) throw Error("conformality_defect: projective atoms need a Moebius map");
    std::map<ProjectiveDirection, double, DirectionLess> index;
    for (const auto& a : mu.atoms) index.emplace(std::get<ProjectiveDirection>(a.point), a.weight);
    for (const auto& a : mu.atoms) {
      const auto& x = std::get<ProjectiveDirection>(a.point);
      const ProjectiveDirection gx = mm->element().act(x);
      const auto it = index.find(gx);
      if (it == index.end()) {
        ++rep.atoms_skipped_boundary;
        continue;
      }
      const double gprime = mm->element().circle_derivative(x).get_d();
      const double expected = a.weight * std::pow(gprime, delta);
      const double defect = std::fabs(it->second - expected) / it->second;
      rep.max_relative_defect = std::max(rep.max_relative_defect, defect);
      ++rep.atoms_checked;
    }
  } else {
    std::vector<std::pair<double, double>> pts;  // (point, weight)
    pts.reserve(mu.atoms.size());
    for (const auto& a : mu.atoms) pts.emplace_back(std::get<double>(a.point), a.weight);
    std::sort(pts.begin(), pts.end());
    auto lookup = [&](double y) -> const std::pair<double, double>* {
      auto it = std::lower_bound(pts.begin(), pts.end(), std::make_pair(y - 1e-7, 0.0));
      const std::pair<double, double>* best = nullptr;
      double bd = 1e-7;
      for (; it != pts.end() && it->first < y + 1e-7; ++it) {
        const double d = std::fabs(it->first - y);
        if (d < bd) {
          bd = d;
          best = &*it;
        }
      }
      return best;
    };
    for (const auto& [x, w] : pts) {
      const CirclePoint image = g.apply(CirclePoint::unit(x));
      const auto* hit = lookup(image.coord);
      if (!hit) {
        ++rep.atoms_skipped_boundary;
        continue;
      }
      const double gprime = g.derivative(CirclePoint::unit(x));
      const double expected = w * std::pow(gprime, delta);
      const double defect = std::fabs(hit->second - expected) / hit->second;
      rep.max_relative_defect = std::max(rep.max_relative_defect, defect);
      ++rep.atoms_checked;
    }
  }
  return rep;
}

namespace {

double measure_mass_around(const MeasureRef& m, const CirclePoint& x, double eps) {
  if (std::holds_alternative<const AtomicMeasure*>(m)) {
    const AtomicMeasure* mu = std::get<const AtomicMeasure*>(m);
    double acc = 0.0;
    for (const auto& a : mu->atoms) {
      const CirclePoint loc = AtomicMeasure::location(a);
      const CirclePoint xx = loc.chart == Chart::Unit ? to_unit(x) : to_projective(x);
      if (circle_distance(loc, xx) < eps) acc += a.weight;
    }
    return mu->total > 0 ? acc / mu->total : 0.0;
  }
  const EmpiricalMeasure* mu = std::get<const EmpiricalMeasure*>(m);
  return mu->mass_around(to_unit(x).coord, eps);
}

}  // namespace

std::vector<DensityRatioPoint> density_ratio(MeasureRef mu1, MeasureRef mu2,
                                             const CirclePoint& x,
                                             const std::vector<double>& eps_sequence) {
  for (size_t i = 1; i < eps_sequence.size(); ++i)
    if (eps_sequence[i] >= eps_sequence[i - 1])
      throw Error("density_ratio: eps sequence must decrease");
  std::vector<DensityRatioPoint> out;
  out.reserve(eps_sequence.size());
  for (double eps : eps_sequence) {
    const double m1 = measure_mass_around(mu1, x, eps);
    const double m2 = measure_mass_around(mu2, x, eps);
    DensityRatioPoint p;
    p.eps = eps;
    if (m1 == 0.0 && m2 == 0.0) {
      p.defined = false;
    } else {
      p.defined = true;
      p.value = m2 == 0.0 ? HUGE_VAL : m1 / m2;
    }
    out.push_back(p);
  }
  return out;
}

namespace {

struct ProbeAccumulator {
  std::map<std::string, MapPtr> seen;
  ConservativityProbe probe;
};

void probe_level(const MapFamily& family, int cap,
                 const std::function<double(const CircleMap&)>& term,
                 const std::function<bool(const CircleMap&)>& is_unit,
                 ConservativityProbe& out) {
  std::map<std::string, MapPtr> current;  // elements at exact word length L
  MapPtr id = std::make_shared<IdentityMap>(family.chart());
  std::map<std::string, MapPtr> seen;
  seen.emplace("id", id);
  {
    // the family's own canonical key for the identity element, so that
    // cancelling words are recognized
    const MapPtr g = family.map_for({0, false});
    const MapPtr gi = family.map_for({0, true});
    if (MapPtr composed = g->compose_exact(gi); composed && !composed->exact_key().empty())
      seen.emplace(composed->exact_key(), id);
  }
  double sum = term(*id);
  long units = is_unit(*id) ? 1 : 0;
  long n_elements = 1;
  out.partial_sums.push_back(sum);
  out.element_counts.push_back(n_elements);
  out.unit_derivative_counts.push_back(units);
  current.emplace("id", id);
  for (int len = 1; len <= cap; ++len) {
    std::map<std::string, MapPtr> next;
    for (const auto& [key, g] : current) {
      for (const Symbol& s : family.letters()) {
        const MapPtr& letter = family.map_for(s);
        MapPtr comp = (key == "id") ? letter : letter->compose_exact(g);
        if (!comp) throw Error("conservativity_probe: family lacks exact composition");
        const std::string k = comp->exact_key();
        if (k.empty()) throw Error("conservativity_probe: family lacks exact keys");
        if (seen.count(k) || next.count(k)) continue;
        next.emplace(k, comp);
      }
    }
    for (const auto& [key, g] : next) {
      seen.emplace(key, g);
      sum += term(*g);
      if (is_unit(*g)) ++units;
      ++n_elements;
    }
    out.partial_sums.push_back(sum);
    out.element_counts.push_back(n_elements);
    out.unit_derivative_counts.push_back(units);
    current = std::move(next);
  }
}

}  // namespace

ConservativityProbe conservativity_probe(const MapFamily& family, double delta,
                                         const CirclePoint& x, int word_cap) {
  ConservativityProbe out;
  probe_level(
      family, word_cap,
      [&](const CircleMap& g) { return std::pow(g.derivative(x), delta); },
      [&](const CircleMap& g) { return std::fabs(g.derivative(x) - 1.0) < 1e-15; }, out);
  return out;
}

ConservativityProbe conservativity_probe_exact(const MapFamily& family, double delta,
                                               const ProjectiveDirection& dir, int word_cap) {
  ConservativityProbe out;
  probe_level(
      family, word_cap,
      [&](const CircleMap& g) {
        if (const auto* mm = dynamic_cast<const MobiusMap*>(&g))
          return std::pow(mm->element().circle_derivative(dir).get_d(), delta);
        if (dynamic_cast<const IdentityMap*>(&g)) return 1.0;
        throw Error("conservativity_probe_exact: non-Moebius element");
      },
      [&](const CircleMap& g) {
        if (const auto* mm = dynamic_cast<const MobiusMap*>(&g))
          return mm->element().circle_derivative(dir) == 1;
        return true;  // identity
      },
      out);
  return out;
}

}  // namespace circledyn
