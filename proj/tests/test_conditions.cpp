// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <random>

#include "carleman/conditions.hpp"
#include "carleman/error.hpp"
#include "carleman/expression.hpp"
#include "carleman/sampling.hpp"
#include "support.hpp"

using namespace carleman;

namespace {

Eigen::VectorXd v2(double a, double b) { return (Eigen::VectorXd(2) << a, b).finished(); }

CoefficientField expr(const std::string& s) {
  return CoefficientField::from_expression(Expression::parse(s), {});
}

Scenario with_weight(const Symbol& p, WeightSpec w) {
  Scenario s = testing::diffusion(0.5, 1.0);
  s.left.principal = p;
  s.right.principal = p;
  s.weight = std::move(w);
  return s;
}

SampleRegion right_region(int n = 1024) {
  SampleRegion r;
  r.points = {v2(0.0, 0.0), v2(0.3, 0.2), v2(-0.4, 0.6)};
  r.n_sphere = n;
  return r;
}

}  // namespace

TEST_CASE("sphere sampling") {
  const SphereSpec spec{3, true, 200, 4};
  const auto pts = sphere_points(spec);
  CHECK(pts.size() == static_cast<std::size_t>(200 + pole_count(spec)));
  const auto more = sphere_points({3, true, 300, 4});
  for (std::size_t i = 0; i < pts.size(); ++i) CHECK(more[i] == pts[i]);
  for (const auto& p : pts) {
    CHECK(p.norm() == doctest::Approx(1.0));
    CHECK(p(2) >= 0.0);
  }
  CHECK(sphere_points(spec) == pts);
  CHECK(pole_count(spec) > 0);
  const auto full = sphere_points({3, false, 200, 4});
  double mn = 1.0;
  for (const auto& p : full) mn = std::min(mn, p(2));
  CHECK(mn < -0.9);
  const Eigen::VectorXd below = (Eigen::VectorXd(3) << 0, 0, -2).finished();
  CHECK(project_to_sphere(below, true)(2) >= 0.0);
}

TEST_CASE("property: higher-dimensional samples are unit and roughly balanced") {
  for (int d : {4, 5}) {
    const auto pts = sphere_points({d, false, 4000, 2});
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
    for (const auto& p : pts) {
      CHECK(p.norm() == doctest::Approx(1.0));
      mean += p;
    }
    mean /= static_cast<double>(pts.size());
    // the mean of a uniform sample on S^{d-1} is 0 with deviation ~ 1/sqrt(d N)
    CHECK(mean.norm() < 0.05);
  }
}

TEST_CASE("ellipticity of the Laplacian and of an anisotropic form") {
  const ConditionReport r = check_ellipticity({testing::laplacian2(), false}, right_region());
  CHECK(r.verdict == Verdict::holds);
  CHECK(r.quantity == doctest::Approx(1.0));
  // 2 xi1^2 + xi2^2: minimum 1 on the circle
  const Symbol a = testing::constant_symbol(2, 2, {{{2, 0}, 2.0}, {{0, 2}, 1.0}});
  const ConditionReport ra = check_ellipticity({a, false}, right_region());
  CHECK(ra.quantity == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(std::abs(ra.witness.xi(0)) < 1e-3);
  CHECK(ra.margin == doctest::Approx(ra.quantity - ra.tolerance));
}

TEST_CASE("a hyperbolic symbol is not elliptic") {
  const Symbol h = testing::constant_symbol(2, 2, {{{2, 0}, 1.0}, {{0, 2}, -1.0}});
  const ConditionReport r = check_ellipticity({h, false}, right_region());
  CHECK(r.verdict == Verdict::fails);
  CHECK(std::abs(std::abs(r.witness.xi(0)) - std::abs(r.witness.xi(1))) < 1e-4);
}

TEST_CASE("empty regions and degenerate weights are input errors") {
  SampleRegion none;
  CHECK_THROWS_AS(check_ellipticity({testing::laplacian2(), false}, none), Error);
  const Scenario flat = with_weight(testing::laplacian2(), WeightSpec::direct(expr("1"), expr("1")));
  CHECK_THROWS_AS(check_subellipticity(flat, Side::right, right_region()), Error);
}

TEST_CASE("sub-ellipticity: quadratic weight holds, linear weight fails") {
  const auto q = expr("(x1^2 + (x2 + 1)^2)/2");
  const Scenario quad = with_weight(testing::laplacian2(), WeightSpec::direct(q, q));
  const ConditionReport rq = check_subellipticity(quad, Side::right, right_region());
  CHECK(rq.verdict == Verdict::holds);
  CHECK(rq.margin > 0.0);

  const auto l = expr("x2");
  const Scenario lin = with_weight(testing::laplacian2(), WeightSpec::direct(l, l));
  const ConditionReport rl = check_subellipticity(lin, Side::right, right_region());
  CHECK(rl.verdict == Verdict::fails);
  // the witness is a characteristic point of p_phi: |xi| = tau |phi'|, xi . phi' = 0
  REQUIRE(rl.witness.tau);
  const double tau = *rl.witness.tau;
  CHECK(std::abs(rl.witness.xi.norm() - tau) < 1e-3);
  CHECK(std::abs(rl.witness.xi(1)) < 1e-3);
}

TEST_CASE("property: tau = 0 restriction holds for elliptic operators") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const Symbol p = testing::random_elliptic2(rng);
    const auto l = expr("x2 + x1/3");
    const Scenario s = with_weight(p, WeightSpec::direct(l, l));
    SampleRegion r = right_region(256);
    r.tau_zero_only = true;
    CHECK(check_subellipticity(s, Side::right, r).verdict == Verdict::holds);
  }
}

TEST_CASE("pseudo-convexity and simple characteristics with linear psi") {
  const auto psi = expr("x2");
  const Scenario lap = with_weight(testing::laplacian2(), WeightSpec::two_parameter(psi, psi, 1.0));
  CHECK(check_strong_pseudoconvexity(lap, Side::right, right_region()).verdict == Verdict::holds);
  CHECK(check_simple_characteristic(lap, Side::right, right_region()).verdict == Verdict::holds);

  Scenario bil = with_weight(testing::bilaplacian2(), WeightSpec::two_parameter(psi, psi, 1.0));
  const ConditionReport sc = check_simple_characteristic(bil, Side::right, right_region());
  CHECK(sc.verdict == Verdict::fails);
  CHECK(sc.quantity < 1e-6);
}

TEST_CASE("simple-characteristic quantity, closed form for the Laplacian") {
  // xi1^2 + (xi2 + i t)^2 = 0 at t = i xi2 +- xi1: gap 2|xi1|, midpoint i xi2
  const auto p = testing::laplacian2().freeze(Eigen::VectorXd::Zero(2));
  const Eigen::VectorXd g = v2(0.0, 1.0);
  for (double a : {0.1, 0.5, 0.9}) {
    const Eigen::VectorXd xi = v2(a, std::sqrt(1 - a * a));
    const double q = simple_characteristic_quantity(p, g, xi);
    CHECK(q == doctest::Approx(std::max(2 * a, std::sqrt(1 - a * a))).epsilon(1e-8));
  }
}

TEST_CASE("gamma search on a linear psi") {
  const auto psi = expr("x2");
  const Scenario lap = with_weight(testing::laplacian2(), WeightSpec::two_parameter(psi, psi, 1.0));
  const GammaSearch gs = find_gamma_star(lap, Side::right, right_region(256));
  CHECK(gs.verdict == Verdict::holds);
  REQUIRE(gs.gamma_star);
  CHECK(*gs.gamma_star >= 1.0);
  CHECK(with_gamma(lap, 7.0).weight.gamma() == 7.0);
}

TEST_CASE("property: more samples never raise the coarse minimum") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    const Symbol p = testing::random_symbol(rng, 2);
    double last = 1e300;
    for (int n : {64, 128, 256, 512, 1024}) {
      SampleRegion r = right_region(n);
      r.refine.rounds = 0;
      const double q = check_ellipticity({p, false}, r).quantity;
      CHECK(q <= last + 1e-15);
      last = q;
    }
  }
}

TEST_CASE("property: verdicts are independent of the weight's additive constant") {
  const auto a = expr("(x1^2 + (x2 + 1)^2)/2");
  const auto b = expr("(x1^2 + (x2 + 1)^2)/2 + 5");
  const Scenario sa = with_weight(testing::laplacian2(), WeightSpec::direct(a, a));
  const Scenario sb = with_weight(testing::laplacian2(), WeightSpec::direct(b, b));
  const ConditionReport ra = check_subellipticity(sa, Side::right, right_region(256));
  const ConditionReport rb = check_subellipticity(sb, Side::right, right_region(256));
  CHECK(ra.verdict == rb.verdict);
  CHECK(ra.quantity == doctest::Approx(rb.quantity));
}

TEST_CASE("verdict from margin") {
  CHECK(verdict_from_margin(1.0, 0.1) == Verdict::holds);
  CHECK(verdict_from_margin(-1.0, 0.1) == Verdict::fails);
  CHECK(verdict_from_margin(0.05, 0.1) == Verdict::indeterminate);
  CHECK(worst(Verdict::holds, Verdict::indeterminate) == Verdict::indeterminate);
  CHECK(worst(Verdict::fails, Verdict::indeterminate) == Verdict::fails);
}
