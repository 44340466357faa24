#include <doctest.h>

#include <random>

#include "circledyn/distortion.hpp"
#include "circledyn/moebius.hpp"
#include "circledyn/tolerances.hpp"

using namespace circledyn;

namespace {

CircleInterval proj_interval(double lo, double hi) {
  return CircleInterval(CirclePoint::projective(lo), CirclePoint::projective(hi));
}

Word random_word(std::mt19937_64& rng, int len) {
  Word w;
  for (int i = 0; i < len; ++i)
    w.symbols.push_back({static_cast<int>(rng() % 2), (rng() & 1) != 0});
  return w;
}

}  // namespace

TEST_CASE("distortion coefficient: identity and constant-derivative maps vanish") {
  const CircleInterval I = proj_interval(0.3, 1.1);
  CHECK(distortion_coefficient(IdentityMap(Chart::Projective), I, 100) == 0.0);
  const RotationMap rot(0.7, Chart::Projective);
  CHECK(distortion_coefficient(rot, I, 100) == 0.0);
  CHECK_THROWS_AS(distortion_coefficient(IdentityMap(Chart::Projective), I, 1), Error);
}

TEST_CASE("distortion coefficient refinement against a dense grid") {
  // f2 on the arc whose affine chart is [0,1]
  const MobiusMap f2(MobiusElement::f2());
  const CircleInterval I = proj_interval(M_PI / 4, M_PI / 2);
  const double coarse = distortion_coefficient(f2, I, 1000);
  const double dense = distortion_coefficient(f2, I, 100000);
  CHECK(std::fabs(coarse - dense) < 1e-6);
  CHECK(coarse > 0.0);
}

TEST_CASE("distortion norm against the closed-form inverse-derivative oracle") {
  CHECK(distortion_norm(IdentityMap(Chart::Projective), proj_interval(0.2, 0.9), 200) == 0.0);
  CHECK(distortion_norm(RotationMap(0.4, Chart::Projective), proj_interval(0.2, 0.9), 200) == 0.0);

  const MobiusElement g = MobiusElement::f1();
  const MobiusMap gm(g);
  const CircleInterval I = proj_interval(0.4, 0.9);
  const double eta = distortion_norm(gm, I, 4000);
  // oracle: max over the image of |(log (g^{-1})')'|, via a difference
  // quotient of the exact inverse derivative on a fine grid
  const MobiusElement gi = g.inverse();
  const CircleInterval image(gm.apply(I.left), gm.apply(I.right));
  double oracle = 0.0;
  const int n = 200000;
  const double h = image.length() / n;
  double prev = std::log(gi.derivative_angle(image.at(0.0).coord));
  for (int i = 1; i <= n; ++i) {
    const double cur = std::log(gi.derivative_angle(image.at(static_cast<double>(i) / n).coord));
    oracle = std::max(oracle, std::fabs(cur - prev) / h);
    prev = cur;
  }
  CHECK(eta == doctest::Approx(oracle).epsilon(0.02));
}

TEST_CASE("composition distortion bound") {
  const MapFamily fam = g2_family();

  const DistortionReport empty = check_sum_bound(Word{}, fam, proj_interval(0.1, 0.3));
  CHECK(empty.kappa == 0.0);
  CHECK(empty.bound == 0.0);

  // constant-derivative family: both sides vanish
  MapFamily rot_fam(std::vector<MapPtr>{std::make_shared<RotationMap>(0.3, Chart::Projective)});
  const DistortionReport affine =
      check_sum_bound(Word({{0, false}}), rot_fam, proj_interval(0.2, 0.4));
  CHECK(affine.kappa == 0.0);
  CHECK(affine.bound >= 0.0);

  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> U(0.0, M_PI);
  for (int t = 0; t < 50; ++t) {
    const Word w = random_word(rng, 8);
    const double lo = U(rng);
    try {
      const DistortionReport rep = check_sum_bound(w, fam, proj_interval(lo, lo + 1e-3));
      CHECK(rep.slack >= -tol::kDistortionSlack);
    } catch (const WrapError&) {
      // an image grew past half the circle; legal outcome for long words
    }
  }
}

TEST_CASE("subadditivity of the distortion coefficient") {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> U(0.0, M_PI);
  const MapFamily fam = g2_family();
  for (int t = 0; t < 50; ++t) {
    const Word wf = random_word(rng, 3), wg = random_word(rng, 3);
    const WordMap f(wf, &fam), g(wg, &fam);
    const double lo = U(rng);
    const CircleInterval I = proj_interval(lo, lo + 0.05);
    try {
      const CircleInterval fI = image_interval(f, I);
      Word wgf = wf;
      for (const Symbol& s : wg.symbols) wgf.symbols.push_back(s);
      const WordMap gf(wgf, &fam);
      const double lhs = distortion_coefficient(gf, I, 512);
      const double rhs = distortion_coefficient(f, I, 512) + distortion_coefficient(g, fI, 512);
      CHECK(lhs <= rhs + tol::kDistortionSlack);
    } catch (const WrapError&) {
    }
  }
}

TEST_CASE("prefix-derivative sandwich and the length-sum inequality") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> U(0.0, M_PI);
  const MapFamily fam = g2_family();
  for (int t = 0; t < 40; ++t) {
    const Word w = random_word(rng, 6);
    const double lo = U(rng);
    const CircleInterval I = proj_interval(lo, lo + 2e-3);
    const CirclePoint x0 = I.at(0.37);
    try {
      const double cf = fam.c_family();
      std::vector<double> lengths = {I.length()};
      std::vector<double> prefix_deriv = {1.0};
      CircleInterval cur = I;
      CirclePoint x = x0;
      double log_acc = 0.0;
      for (const Symbol& s : w.symbols) {
        const MapPtr& f = fam.map_for(s);
        log_acc += std::log(f->derivative(x));
        x = f->apply(x);
        cur = image_interval(*f, cur);
        lengths.push_back(cur.length());
        prefix_deriv.push_back(std::exp(log_acc));
      }
      const size_t n = w.length();
      double sum_prev = 0.0;
      for (size_t i = 1; i <= n; ++i) {
        sum_prev += lengths[i - 1];
        const double lowb = std::exp(-cf * sum_prev) * lengths[i] / lengths[0];
        const double highb = std::exp(cf * sum_prev) * lengths[i] / lengths[0];
        CHECK(prefix_deriv[i] >= lowb - tol::kDistortionSlack);
        CHECK(prefix_deriv[i] <= highb + tol::kDistortionSlack);
      }
      double len_total = 0.0, deriv_total = 0.0, len_strict = 0.0;
      for (size_t i = 0; i <= n; ++i) {
        len_total += lengths[i];
        deriv_total += prefix_deriv[i];
        if (i < n) len_strict += lengths[i];
      }
      CHECK(len_total <=
            lengths[0] * std::exp(cf * len_strict) * deriv_total + tol::kDistortionSlack);
    } catch (const WrapError&) {
    }
  }
}

TEST_CASE("local distortion radius keeps kappa below log 2") {
  const MapFamily fam = g2_family();
  std::mt19937_64 rng(24);

  // single letter: S = 1, delta = log2 / (2 c_F)
  {
    const CirclePoint x0 = CirclePoint::projective(1.0);
    const LocalRadius r = local_distortion_radius(x0, Word({{0, false}}), fam);
    CHECK(r.derivative_sum == 1.0);
    CHECK(r.delta == doctest::Approx(M_LN2 / (2.0 * fam.c_family())).epsilon(1e-12));
    CHECK(r.kappa_bound == doctest::Approx(M_LN2));
    CHECK(r.kappa_measured <= M_LN2 + tol::kKappaBound);
  }

  // cancelling pair: S = 1 + f'(x0)
  {
    const CirclePoint x0 = CirclePoint::projective(0.7);
    const Word w({{1, false}, {1, true}});
    const LocalRadius r = local_distortion_radius(x0, w, fam);
    const double expected = 1.0 + MobiusElement::f2().derivative_angle(x0.coord);
    CHECK(r.derivative_sum == doctest::Approx(expected).epsilon(1e-12));
    CHECK(r.kappa_measured <= M_LN2 + tol::kKappaBound);
  }

  // greedy words of length 20 at random directions
  int done = 0;
  while (done < 10) {
    const ProjectiveDirection d = random_direction(128, rng);
    Word w;
    try {
      w = greedy_word(d, 20);
    } catch (const NonGenericError&) {
      continue;
    }
    const LocalRadius r = local_distortion_radius(d.angle(), w, fam);
    CHECK(r.kappa_measured <= M_LN2 + tol::kKappaBound);
    ++done;
  }

  CHECK_THROWS_AS(local_distortion_radius(CirclePoint::projective(0.5), Word{}, fam), Error);
}

TEST_CASE("first-entry branches of a hyperbolic fixed point") {
  // doubling toy: J_k = [2^-k-2, 2^-k-1], min derivative 2^k, k0 = 1
  const ScalarMap doubling{[](double x) { return 2.0 * x; }, [](double) { return 2.0; }};
  const ReturnBranchScan scan = fixed_point_return_branches(doubling, 0.0, 0.25, 0.5, 6);
  REQUIRE(scan.branches.size() == 6);
  for (const ReturnBranch& br : scan.branches) {
    CHECK(br.left == doctest::Approx(std::ldexp(1.0, -br.k - 2)).epsilon(1e-9));
    CHECK(br.right == doctest::Approx(std::ldexp(1.0, -br.k - 1)).epsilon(1e-9));
    CHECK(br.min_derivative == doctest::Approx(std::ldexp(1.0, br.k)).epsilon(1e-9));
    CHECK(br.kappa <= 1e-9);
  }
  REQUIRE(scan.k0.has_value());
  CHECK(*scan.k0 == 1);
  CHECK(scan.kappa_bound <= 1e-9);

  // empty scan
  CHECK(fixed_point_return_branches(doubling, 0.0, 0.25, 0.5, 0).branches.empty());
}

TEST_CASE("first-entry branches near the parabolic end of the quotient map") {
  const PeriodTwo p = period_two_point();
  const ScalarMap branch{[](double x) { return phi_tilde(x); },
                         [](double x) { return phi_tilde_derivative(x); }};
  const ReturnBranchScan scan = fixed_point_return_branches(branch, 0.0, p.a, p.b, 40);
  REQUIRE(scan.k0.has_value());
  for (const ReturnBranch& br : scan.branches) {
    if (br.k >= *scan.k0) CHECK(br.min_derivative >= 2.0);
    CHECK(br.kappa <= scan.kappa_bound + tol::kKappaBound);
  }
  // diagonal condition is rejected when violated
  const ScalarMap below{[](double x) { return 0.5 * x; }, [](double) { return 0.5; }};
  CHECK_THROWS_AS(fixed_point_return_branches(below, 0.0, 0.25, 0.5, 3), Error);
}
