#include "circledyn/expansion.hpp"

#include <algorithm>
#include <cmath>

#include "circledyn/tolerances.hpp"

namespace circledyn {

namespace {

void append_letter(ExpansionTrace& trace, const MapFamily& family, const Symbol& s) {
  const CirclePoint cur = trace.trajectory.back();
  const MapPtr& g = family.map_for(s);
  const double ld = std::log(g->derivative(cur));
  trace.word.symbols.push_back(s);
  trace.step_log_derivatives.push_back(ld);
  trace.trajectory.push_back(g->apply(cur));
}

double total_log_derivative(const ExpansionTrace& trace) {
  double acc = 0.0;
  for (double v : trace.step_log_derivatives) acc += v;
  return acc;
}

// sum over j of F_j'(x) / F_n'(x), via suffix sums of the step logs
double forward_ratio(const ExpansionTrace& trace) {
  const size_t n = trace.step_log_derivatives.size();
  if (n == 0) return 1.0;
  double suffix = 0.0;
  double acc = 0.0;
  for (size_t j = n; j >= 1; --j) {
    acc += std::exp(-suffix);  // j = n contributes exp(0)
    suffix += trace.step_log_derivatives[j - 1];
  }
  return acc;
}

void finalize(ExpansionTrace& trace) {
  trace.derivative = std::exp(total_log_derivative(trace));
  trace.ratio = forward_ratio(trace);
}

}  // namespace

G2Policy::G2Policy() : family_(g2_family()) {}

void G2Policy::expand_step(ExpansionTrace& trace) const {
  double frag = 0.0;
  long steps = 0;
  while (frag < M_LN2) {
    if (++steps > tol::kExpansionIterCap)
      throw NonExpandableError("G2Policy: fragment never reached lambda (iteration cap)");
    const CirclePoint cur = trace.trajectory.back();
    Symbol s;
    try {
      s = expanding_letter(cur.coord);
    } catch (const NonGenericError&) {
      throw NonExpandableError("G2Policy: no expanding letter (non-expandable direction)");
    }
    append_letter(trace, family_, s);
    frag += trace.step_log_derivatives.back();
  }
}

CirclePoint G2Policy::pull_back(const ExpansionTrace& trace, const CirclePoint& p) const {
  CirclePoint cur = p;
  for (size_t i = trace.word.length(); i >= 1; --i) {
    const MapPtr inv = family_.map_for(trace.word.symbols[i - 1])->inverse();
    cur = inv->apply(cur);
  }
  return cur;
}

double G2Policy::inverse_derivative_sum(const ExpansionTrace& trace) const {
  const size_t n = trace.word.length();
  double acc = 0.0;   // log of the running inverse-composition derivative
  double sum = 1.0;   // j = n term
  CirclePoint z = trace.trajectory.back();
  for (size_t i = n; i >= 2; --i) {
    const MapPtr inv = family_.map_for(trace.word.symbols[i - 1])->inverse();
    acc += std::log(inv->derivative(z));
    z = inv->apply(z);
    sum += std::exp(acc);
  }
  return sum;
}

GSPolicy::GSPolicy(SmoothDoubling phi)
    : phi_(std::move(phi)),
      family_(std::vector<MapPtr>{std::make_shared<DoublingMap>(phi_)}),
      handle_(phi_first_return(phi_)) {
  // the policy needs an expanding fundamental domain
  for (int i = 0; i <= 64; ++i) {
    const double x = handle_.a + (handle_.b - handle_.a) * i / 64.0;
    if (phi_.deriv(x) <= 1.0 + 1e-9)
      throw Error("GSPolicy: fundamental domain is not uniformly expanding for " + phi_.name);
  }
}

void GSPolicy::expand_step(ExpansionTrace& trace) const {
  // exit-word semantics: run phi until the fundamental domain has been
  // visited and the fragment derivative reaches lambda
  const CirclePoint start = trace.trajectory.back();
  auto in_j = [&](double p) {
    const double gap = forward_gap(CirclePoint::unit(handle_.a), CirclePoint::unit(p));
    return gap < forward_gap(CirclePoint::unit(handle_.a), CirclePoint::unit(handle_.b));
  };
  bool visited = in_j(start.coord);
  double frag = 0.0;
  long steps = 0;
  for (;;) {
    if (++steps > tol::kExpansionIterCap)
      throw NonExpandableError("GSPolicy: fragment never reached lambda (iteration cap)");
    append_letter(trace, family_, Symbol{0, false});
    frag += trace.step_log_derivatives.back();
    visited = visited || in_j(trace.trajectory.back().coord);
    if (visited && frag >= M_LN2) return;
  }
}

CirclePoint GSPolicy::pull_back(const ExpansionTrace& trace, const CirclePoint& p) const {
  double cur = p.coord;
  for (size_t i = trace.word.length(); i >= 1; --i) {
    const int bit = phi_.digit(trace.trajectory[i - 1].coord);
    cur = phi_.inverse_branch(cur, bit);
  }
  return CirclePoint::unit(cur);
}

double GSPolicy::inverse_derivative_sum(const ExpansionTrace& trace) const {
  const size_t n = trace.word.length();
  double acc = 0.0;
  double sum = 1.0;
  double z = trace.trajectory.back().coord;
  for (size_t i = n; i >= 2; --i) {
    const int bit = phi_.digit(trace.trajectory[i - 1].coord);
    z = phi_.inverse_branch(z, bit);
    acc += -std::log(phi_.deriv(z));
    sum += std::exp(acc);
  }
  return sum;
}

ExpansionTrace expand_step(const ExpansionPolicy& policy, const CirclePoint& x) {
  require_chart(x, policy.family().chart(), "expand_step");
  ExpansionTrace trace;
  trace.trajectory.push_back(x);
  policy.expand_step(trace);
  finalize(trace);
  return trace;
}

ExpansionTrace expand_to_derivative(const ExpansionPolicy& policy, const CirclePoint& x,
                                    double M, long step_cap) {
  require_chart(x, policy.family().chart(), "expand_to_derivative");
  ExpansionTrace trace;
  trace.trajectory.push_back(x);
  if (M > 1.0) {
    double acc = 0.0;
    const double target = std::log(M);
    while (acc < target) {
      if (static_cast<long>(trace.word.length()) > step_cap)
        throw IterationCapError("expand_to_derivative: step cap exceeded");
      policy.expand_step(trace);
      acc = total_log_derivative(trace);
    }
  }
  finalize(trace);
  return trace;
}

ExpansionTrace expand_neighborhood(const ExpansionPolicy& policy, const CirclePoint& x,
                                   double eps, double M) {
  ExpansionTrace trace = expand_to_derivative(policy, x, M);
  const CirclePoint y = trace.trajectory.back();
  const Chart ch = policy.family().chart();
  const CirclePoint lo{reduce_coordinate(y.coord - eps / 2, ch), ch};
  const CirclePoint hi{reduce_coordinate(y.coord + eps / 2, ch), ch};
  const CircleInterval v(policy.pull_back(trace, lo), policy.pull_back(trace, hi));
  trace.neighborhood = v;
  if (trace.word.empty()) {
    trace.kappa = 0.0;
  } else {
    const WordMap composed(trace.word, &policy.family());
    trace.kappa = distortion_coefficient_refined(composed, v);
  }
  return trace;
}

std::pair<double, double> ratio_identity_sides(const ExpansionPolicy& policy,
                                               const ExpansionTrace& trace) {
  return {forward_ratio(trace), policy.inverse_derivative_sum(trace)};
}

std::vector<ScanRow> distortion_expandable_scan(const ExpansionPolicy& policy,
                                                const std::vector<CirclePoint>& points,
                                                const std::vector<double>& m_grid) {
  std::vector<ScanRow> out;
  for (const CirclePoint& p : points) {
    for (double M : m_grid) {
      ScanRow row;
      row.point = p;
      row.M = M;
      try {
        row.ratio = expand_to_derivative(policy, p, M).ratio;
      } catch (const NonExpandableError&) {
        row.ne_marked = true;
      } catch (const IterationCapError&) {
        row.ne_marked = true;
      }
      out.push_back(row);
    }
  }
  return out;
}

}  // namespace circledyn
