// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <random>

#include "carleman/error.hpp"
#include "carleman/estimator.hpp"
#include "carleman/expression.hpp"
#include "carleman/parallel.hpp"
#include "carleman/scenario_io.hpp"
#include "support.hpp"

using namespace carleman;

namespace {

Eigen::VectorXd v1(double a) { return (Eigen::VectorXd(1) << a).finished(); }

EstimatorOptions small(int n = 64) {
  EstimatorOptions o;
  o.length = 0.5;
  o.grid_n = n;
  return o;
}

}  // namespace

TEST_CASE("derivative stencil is exact on quartics") {
  const int n = 40;
  const double h = 0.05;
  const Eigen::MatrixXcd d = Eigen::MatrixXcd(derivative_matrix(n, h));
  for (int k = 0; k <= 4; ++k) {
    Eigen::VectorXcd f(n + 1), df(n + 1);
    for (int i = 0; i <= n; ++i) {
      const double y = i * h;
      f(i) = std::pow(y, k);
      df(i) = k == 0 ? 0.0 : k * std::pow(y, k - 1);
    }
    CHECK((d * f - df).cwiseAbs().maxCoeff() < 1e-9);
  }
  CHECK_THROWS_AS(derivative_matrix(3, 0.1), Error);
}

TEST_CASE("cutoff mask") {
  const ModelProblem mp(testing::diffusion(0.5, 1.0), v1(0.0), small(80));
  const Eigen::VectorXd y = mp.grid(), m = mp.mask();
  CHECK(y(0) == 0.0);
  CHECK(y(80) == doctest::Approx(0.5));
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (y(i) <= 0.25) CHECK(m(i) == 1.0);
    if (y(i) >= 0.5 * 7 / 8) CHECK(m(i) == 0.0);
    if (i > 0) CHECK(m(i) <= m(i - 1));
  }
}

TEST_CASE("conjugated ODE agrees with the continuous operator where the mask is 1") {
  // right: xi'^2 u - u'' + 2 tau g u' - tau^2 g^2 u for u = cos(3y)
  // left (reflected slope -g1): xi'^2 u - u'' - 2 tau g1 u' - tau^2 g1^2 u
  const double g1 = 0.5, g2 = 1.2, xi = 0.7, tau = 2.0;
  const ModelProblem mp(testing::diffusion(g1, g2), v1(xi), small(400));
  const Eigen::VectorXd y = mp.grid();
  Eigen::VectorXcd u(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) u(i) = std::cos(3 * y(i));
  for (Side side : {Side::right, Side::left}) {
    const double s = side == Side::right ? g2 : -g1;
    const Eigen::VectorXcd pu = build_conjugated_ode(mp, side, tau) * u;
    double err = 0.0;
    for (Eigen::Index i = 0; y(i) < 0.2; ++i) {
      const double c = std::cos(3 * y(i)), sn = std::sin(3 * y(i));
      const double expect = xi * xi * c + 9 * c - 6 * tau * s * sn - tau * tau * s * s * c;
      err = std::max(err, std::abs(pu(i) - expect));
    }
    CHECK(err < 1e-5);
  }
}

TEST_CASE("property: interior norm form equals the direct discrete norm") {
  std::mt19937_64 rng(51);
  std::normal_distribution<double> g;
  const ModelProblem mp(testing::diffusion(0.5, 1.0), v1(0.8), small(64));
  for (int order : {1, 2, 3}) {
    for (double tau : {1.0, 7.5}) {
      Eigen::VectorXcd v(65);
      for (int i = 0; i <= 64; ++i) v(i) = Complex(g(rng), g(rng));
      const SparseMatrixC f = interior_norm_form(mp, order, Eigen::VectorXd::Constant(65, tau),
                                                 Eigen::VectorXd::Ones(65));
      const Complex q = v.dot(f * v);
      const double direct = interior_norm(mp, order, tau, v);
      CHECK(std::abs(q.imag()) < 1e-9 * direct);
      CHECK(q.real() == doctest::Approx(direct).epsilon(1e-10));
    }
  }
}

TEST_CASE("pencil forms are Hermitian and the right form is positive") {
  const ModelProblem mp(testing::diffusion(0.5, 1.0), v1(0.4), small(64));
  const PencilForms f = assemble_forms(mp, 6.0);
  CHECK(f.dim == 130);
  const Eigen::MatrixXcd l(f.left), r(f.right);
  CHECK((l - l.adjoint()).norm() < 1e-9 * l.norm());
  CHECK((r - r.adjoint()).norm() < 1e-9 * r.norm());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(r);
  CHECK(es.eigenvalues().minCoeff() > -1e-9 * es.eigenvalues().maxCoeff());
  CHECK_THROWS_AS(assemble_forms(mp, 0.5), Error);
}

TEST_CASE("property: Lanczos matches the dense generalized eigensolver") {
  for (double g1 : {0.5, 1.0}) {
    EstimatorOptions o = small(64);
    const ModelProblem mp(testing::diffusion(g1, 1.0), v1(0.6), o);
    for (double tau : {2.0, 10.0}) {
      const PencilForms f = assemble_forms(mp, tau);
      EstimatorOptions dense = o;
      dense.solver = PencilSolver::dense;
      const RatioResult a = solve_pencil(f, o);
      const RatioResult b = solve_pencil(f, dense);
      CHECK(a.c == doctest::Approx(b.c).epsilon(1e-8));
      CHECK(a.eps == b.eps);
    }
  }
}

TEST_CASE("property: C does not depend on an additive weight constant") {
  const auto a = CoefficientField::from_expression(Expression::parse("x2"), {});
  const auto b = CoefficientField::from_expression(Expression::parse("x2 + 3"), {});
  Scenario sa = testing::diffusion(1.0, 1.0), sb = sa;
  sa.weight = WeightSpec::direct(a, a);
  sb.weight = WeightSpec::direct(b, b);
  const double ca = carleman_ratio(ModelProblem(sa, v1(0.5), small()), 4.0).c;
  const double cb = carleman_ratio(ModelProblem(sb, v1(0.5), small()), 4.0).c;
  CHECK(ca == doctest::Approx(cb).epsilon(1e-9));
}

TEST_CASE("model problem preconditions") {
  EstimatorOptions o = small(8);
  CHECK_THROWS_AS(ModelProblem(testing::diffusion(0.5, 1.0), v1(0.0), o), Error);
  o = small();
  o.mode = EstimateMode::two_parameter;
  CHECK_THROWS_AS(ModelProblem(testing::diffusion(0.5, 1.0), v1(0.0), o), Error);
  const Scenario tilted = resolve_scenario("laplace-quadratic").instantiate({{"y1", 0.5}});
  CHECK_THROWS_AS(ModelProblem(tilted, v1(0.0), small()), Error);
  CHECK_THROWS_AS(ModelProblem(testing::diffusion(0.5, 1.0), Eigen::VectorXd::Zero(2), small()),
                  Error);
}

TEST_CASE("sweep: shape, blow-up direction and thread independence") {
  const Scenario bad = testing::diffusion(1.0, 0.5);
  EstimatorOptions o = small(80);
  set_thread_count(1);
  const EstimateCurve a = sweep(bad, {2.0, 8.0, 32.0}, {}, {0.0, 0.5, 1.0}, o);
  set_thread_count(3);
  const EstimateCurve b = sweep(bad, {2.0, 8.0, 32.0}, {}, {0.0, 0.5, 1.0}, o);
  set_thread_count(0);
  REQUIRE(a.points.size() == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(a.points[i].c == b.points[i].c);
    CHECK(a.points[i].per_sample.size() == 3);
    CHECK(a.points[i].c == *std::max_element(a.points[i].per_sample.begin(),
                                             a.points[i].per_sample.end()));
  }
  CHECK(a.points[2].c > a.points[1].c);
  CHECK(a.points[1].c > a.points[0].c);
  CHECK_THROWS_AS(sweep(bad, {}, {}, {0.0}, o), Error);
  CHECK_THROWS_AS(sweep(bad, {2.0}, {4.0}, {0.0}, o), Error);
}

TEST_CASE("fixed-product sweep sets tau = T / gamma") {
  const ScenarioTemplate t = resolve_scenario("twoparam-diffusion");
  EstimatorOptions o;
  o.length = t.estimator().length;
  o.grid_n = 160;
  o.mode = EstimateMode::simple_characteristic;
  const EstimateCurve c = sweep_fixed_product(t.instantiate(), 32.0, {2.0, 4.0}, {0.0, 1.0}, o);
  REQUIRE(c.points.size() == 2);
  CHECK(c.points[0].tau == doctest::Approx(16.0));
  CHECK(c.points[1].tau == doctest::Approx(8.0));
  CHECK(c.points[1].gamma == 4.0);
  CHECK(c.points[0].c > 0.0);
  CHECK(default_xi_samples().size() == 8);
}
