#include "circledyn/map.hpp"

#include <cmath>

#include "circledyn/tolerances.hpp"

namespace circledyn {

double log_derivative_variation(const CircleMap& f, int grid) {
  const double period = chart_period(f.chart());
  const double h = period / grid;
  double prev = std::log(f.derivative(CirclePoint{0.0, f.chart()}));
  double worst = 0.0;
  for (int i = 1; i <= grid; ++i) {
    const double x = reduce_coordinate(i * h, f.chart());
    const double cur = std::log(f.derivative(CirclePoint{x, f.chart()}));
    worst = std::max(worst, std::fabs(cur - prev) / h);
    prev = cur;
  }
  return worst;
}

MapFamily::MapFamily(std::vector<MapPtr> generators, int c_grid, double c_safety)
    : generators_(std::move(generators)) {
  if (generators_.empty()) throw Error("MapFamily: needs at least one generator");
  chart_ = generators_.front()->chart();
  inverses_.reserve(generators_.size());
  for (const MapPtr& g : generators_) {
    if (g->chart() != chart_) throw ChartMismatchError("MapFamily: generators in mixed charts");
    try {
      inverses_.push_back(g->inverse());
    } catch (const NotInvertibleError&) {
      inverses_.push_back(nullptr);  // forward-only member (covering maps)
    }
  }
  double worst = 0.0;
  for (const MapPtr& g : generators_) worst = std::max(worst, log_derivative_variation(*g, c_grid));
  for (const MapPtr& g : inverses_)
    if (g) worst = std::max(worst, log_derivative_variation(*g, c_grid));
  c_family_ = worst * c_safety;
}

MapFamily::MapFamily(std::vector<MapPtr> generators)
    : MapFamily(std::move(generators), tol::kDefaultCFamilyGrid, tol::kCFamilySafety) {}

const MapPtr& MapFamily::map_for(const Symbol& s) const {
  if (s.generator < 0 || static_cast<size_t>(s.generator) >= generators_.size())
    throw Error("MapFamily: symbol index out of range");
  if (s.inverse) {
    if (!inverses_[s.generator])
      throw NotInvertibleError("MapFamily: generator has no inverse");
    return inverses_[s.generator];
  }
  return generators_[s.generator];
}

std::vector<Symbol> MapFamily::letters() const {
  std::vector<Symbol> out;
  out.reserve(2 * generators_.size());
  for (int i = 0; i < static_cast<int>(generators_.size()); ++i) {
    out.push_back({i, false});
    out.push_back({i, true});
  }
  return out;
}

ComposeResult compose_evaluate(const Word& word, const MapFamily& family, const CirclePoint& x) {
  require_chart(x, family.chart(), "compose_evaluate");
  ComposeResult out;
  out.trajectory.reserve(word.length() + 1);
  out.trajectory.push_back(x);
  CirclePoint cur = x;
  for (const Symbol& s : word.symbols) {
    const MapPtr& f = family.map_for(s);
    out.log_derivative += std::log(f->derivative(cur));
    cur = f->apply(cur);
    out.trajectory.push_back(cur);
  }
  return out;
}

}  // namespace circledyn
