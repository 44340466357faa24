#include <doctest.h>

#include <random>
#include <sstream>

#include "circledyn/measures.hpp"
#include "circledyn/random_walk.hpp"
#include "circledyn/tolerances.hpp"

using namespace circledyn;

TEST_CASE("conformal family on coprime directions: truncation census") {
  const AtomicMeasure r1 = build_psl_conformal(2.0, 1);
  REQUIRE(r1.atoms.size() == 2);
  for (const auto& a : r1.atoms) CHECK(a.weight == 1.0);

  const AtomicMeasure r2 = build_psl_conformal(2.0, 2);
  CHECK(r2.atoms.size() == 4);

  // brute-force census oracle at R = 7
  const long R = 7;
  const AtomicMeasure mu = build_psl_conformal(1.5, R);
  long count = 0;
  double total = 0.0;
  for (long u = -R; u <= R; ++u)
    for (long v = 0; v <= R; ++v) {
      if (v == 0 && u != 1) continue;  // projective representative
      if (u == 0 && v != 1) continue;
      if (v > 0 && std::gcd(std::labs(u), v) != 1) continue;
      if (u * u + v * v > R * R) continue;
      ++count;
      total += std::pow(static_cast<double>(u * u + v * v), -1.5);
    }
  CHECK(static_cast<long>(mu.atoms.size()) == count);
  CHECK(mu.total == doctest::Approx(total).epsilon(1e-12));

  // explicit weight
  const AtomicMeasure m5 = build_psl_conformal(1.5, 5);
  bool found = false;
  for (const auto& a : m5.atoms)
    if (std::get<ProjectiveDirection>(a.point) == ProjectiveDirection::from_ints(2, 1)) {
      CHECK(a.weight == doctest::Approx(std::pow(5.0, -1.5)).epsilon(1e-15));
      found = true;
    }
  CHECK(found);

  CHECK_THROWS_AS(build_psl_conformal(1.0, 10), Error);
  CHECK_THROWS_AS(build_psl_conformal(2.0, 0), Error);
}

TEST_CASE("truncation monotonicity and tail bound") {
  const double delta = 1.5;
  const AtomicMeasure small = build_psl_conformal(delta, 20);
  const AtomicMeasure big = build_psl_conformal(delta, 40);
  CHECK(big.total >= small.total);
  CHECK(big.total - small.total <= small.tail_bound);
}

TEST_CASE("conformality of the direction family is exact per atom") {
  const AtomicMeasure mu = build_psl_conformal(1.5, 20);
  const MobiusMap id{MobiusElement()};
  const ConformalityReport rid = conformality_defect(mu, id, 1.5);
  CHECK(rid.max_relative_defect == 0.0);
  CHECK(rid.atoms_skipped_boundary == 0);

  const MobiusMap f1{MobiusElement::f1()};
  const ConformalityReport r = conformality_defect(mu, f1, 1.5);
  CHECK(r.atoms_checked > 0);
  CHECK(r.max_relative_defect < tol::kConformalExact);

  // the exact identity behind it: the derivative is the ratio of the
  // squared norms, as integers
  for (const auto& a : mu.atoms) {
    const auto& x = std::get<ProjectiveDirection>(a.point);
    const ProjectiveDirection gx = MobiusElement::f1().act(x);
    const mpq_class der = MobiusElement::f1().circle_derivative(x);
    mpq_class expect(x.norm_squared(), gx.norm_squared());
    expect.canonicalize();
    CHECK(der == expect);
  }
}

TEST_CASE("conformality of the gap-endpoint family") {
  const SmoothDoubling phi = SmoothDoubling::nonminimal_default();
  const AtomicMeasure mu = build_gs_conformal(phi, 1.5, 10);
  CHECK(mu.atoms.size() == (1u << 10) - 1);

  const GSMap a{GSRealization(thompson_A(), phi)};
  const ConformalityReport r = conformality_defect(mu, a, 1.5);
  CHECK(r.atoms_checked > 0);
  CHECK(r.max_relative_defect < tol::kConformalFloat);

  CHECK_THROWS_AS(build_gs_conformal(phi, 0.5, 4), Error);
}

TEST_CASE("partial sums of the gap series") {
  const SmoothDoubling phi = SmoothDoubling::nonminimal_default();
  // monotone and bounded: each tree level contributes at most
  // (1/min_c) * (new gap length), and the gap lengths sum below 1
  const int depth = 14;
  const auto s1 = gs_partial_sums(phi, 1.0, depth);
  const GapTree tree = gap_tree(phi, depth);
  for (size_t i = 1; i < s1.size(); ++i) CHECK(s1[i] >= s1[i - 1]);
  CHECK(s1[depth] <= 1.0 / tree.min_c + 1e-9);
  // increments decay (polynomially: the crawl chains toward the tangency
  // points dominate the tail)
  CHECK(s1[depth] - s1[depth - 1] < s1[10] - s1[9]);
  CHECK(s1[depth] - s1[depth - 1] < 0.5 * (s1[6] - s1[5]));

  const auto s2 = gs_partial_sums(phi, 2.0, depth);
  for (size_t i = 0; i < s2.size(); ++i) CHECK(s2[i] <= s1[i] + 1e-15);
}

TEST_CASE("density ratios") {
  const AtomicMeasure mu = build_psl_conformal(1.5, 10);
  const auto same = density_ratio(&mu, &mu, CirclePoint::projective(1.0), {0.5, 0.2, 0.1});
  for (const auto& p : same)
    if (p.defined) CHECK(p.value == doctest::Approx(1.0));

  // atom against a uniform histogram: the ratio grows as eps shrinks
  AtomicMeasure dirac;
  dirac.atoms.push_back({0.37, 1.0});
  dirac.total = 1.0;
  EmpiricalMeasure unif(256);
  for (int i = 0; i < 256; ++i) {
    unif.counts[i] = 1;
    ++unif.total;
  }
  const auto div = density_ratio(&dirac, &unif, CirclePoint::unit(0.37), {0.2, 0.05, 0.01});
  REQUIRE(div.size() == 3);
  CHECK(div[0].defined);
  CHECK(div[2].value > div[0].value);

  CHECK_THROWS_AS(density_ratio(&mu, &mu, CirclePoint::projective(1.0), {0.1, 0.2}), Error);
}

TEST_CASE("serialization round trip") {
  const AtomicMeasure mu = build_psl_conformal(1.5, 8);
  std::stringstream ss;
  mu.serialize(ss);
  const AtomicMeasure back = AtomicMeasure::deserialize(ss);
  REQUIRE(back.atoms.size() == mu.atoms.size());
  CHECK(back.delta == mu.delta);
  CHECK(back.total == mu.total);
  for (size_t i = 0; i < mu.atoms.size(); ++i) {
    CHECK(std::get<ProjectiveDirection>(back.atoms[i].point) ==
          std::get<ProjectiveDirection>(mu.atoms[i].point));
    CHECK(back.atoms[i].weight == mu.atoms[i].weight);  // bit-exact
  }
}

TEST_CASE("derivative-sum probe over distinct elements") {
  const MapFamily fam = g2_family();

  const ConservativityProbe p0 =
      conservativity_probe_exact(fam, 1.0, ProjectiveDirection::from_ints(7, 3), 0);
  CHECK(p0.partial_sums.size() == 1);
  CHECK(p0.partial_sums[0] == 1.0);

  const ConservativityProbe p =
      conservativity_probe_exact(fam, 1.0, ProjectiveDirection::from_ints(7, 3), 4);
  // free-group element census per radius: 1, 5, 17, 53, 161
  CHECK(p.element_counts[0] == 1);
  CHECK(p.element_counts[1] == 5);
  CHECK(p.element_counts[2] == 17);
  CHECK(p.element_counts[3] == 53);
  CHECK(p.element_counts[4] == 161);
  for (size_t i = 1; i < p.partial_sums.size(); ++i)
    CHECK(p.partial_sums[i] >= p.partial_sums[i - 1]);

  // at the axis direction the parabolic stabilizer contributes unit
  // derivatives linearly in the cap
  const ConservativityProbe axis =
      conservativity_probe_exact(fam, 1.0, ProjectiveDirection::from_ints(0, 1), 6);
  for (int cap = 0; cap <= 6; ++cap) {
    CHECK(axis.unit_derivative_counts[cap] == 2 * cap + 1);
    CHECK(axis.partial_sums[cap] >= static_cast<double>(axis.unit_derivative_counts[cap]));
  }

  // floating probe agrees with the exact one away from the axes
  const ConservativityProbe fl =
      conservativity_probe(fam, 1.0, ProjectiveDirection::from_ints(7, 3).angle(), 3);
  for (int cap = 0; cap <= 3; ++cap)
    CHECK(fl.partial_sums[cap] == doctest::Approx(p.partial_sums[cap]).epsilon(1e-9));
}

TEST_CASE("histogram mass and tv distance") {
  EmpiricalMeasure h(8);
  for (int i = 0; i < 80; ++i) h.add(0.05 + (i % 8) * 0.125);
  CHECK(h.total == 80);
  CHECK(h.mass_around(0.5, 0.5) == doctest::Approx(1.0));
  CHECK(h.mass_around(0.0625, 0.0625) == doctest::Approx(0.125));
  EmpiricalMeasure g(8);
  for (int i = 0; i < 80; ++i) g.add(0.01);
  CHECK(h.tv_distance(h) == 0.0);
  CHECK(h.tv_distance(g) == doctest::Approx(0.875));
}

TEST_CASE("pushforward conserves mass") {
  EmpiricalMeasure h(64);
  std::mt19937_64 rng(81);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int i = 0; i < 5000; ++i) h.add(U(rng) * U(rng));
  // identity: bit-identical counts
  const MapPtr id = std::make_shared<IdentityMap>(Chart::Unit);
  const EmpiricalMeasure same = h.pushforward({{id, 1.0}});
  for (int i = 0; i < h.bins; ++i) CHECK(same.counts[i] == h.counts[i]);
  // a bijection: total preserved up to per-bin rounding
  const MapPtr rot = std::make_shared<RotationMap>(0.3717, Chart::Unit);
  const EmpiricalMeasure moved = h.pushforward({{rot, 1.0}});
  CHECK(std::labs(moved.total - h.total) <= h.bins / 2);
}

TEST_CASE("density ratio of Lebesgue against the walk's stationary estimate drifts") {
  const MapFamily fam = g2_family();
  const StepDistribution m = StepDistribution::uniform(fam);
  const EmpiricalMeasure stat = stationary_estimate(m, 200, 200000, 91);
  EmpiricalMeasure leb(stat.bins);
  for (int i = 0; i < leb.bins; ++i) {
    leb.counts[i] = 10;
    leb.total += 10;
  }
  // at a generic point the ratio moves away from 1 as eps shrinks
  // (direction depends on the point; only the drift is asserted)
  const CirclePoint x = CirclePoint::unit(0.234567);
  const auto ratios = density_ratio(&leb, &stat, x, {0.2, 0.05, 0.01, 0.003});
  REQUIRE(ratios.size() == 4);
  for (const auto& r : ratios) CHECK(r.defined);
  const double first = std::fabs(std::log(ratios.front().value));
  const double last = std::fabs(std::log(ratios.back().value));
  CHECK(last > first);
}
