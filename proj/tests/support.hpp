// SPDX-License-Identifier: Apache-2.0
//
// Scenario builders and random generators shared by the tests. Scenarios
// are built directly from symbols here, not from the builtin files.

#ifndef CARLEMAN_TEST_SUPPORT_HPP
#define CARLEMAN_TEST_SUPPORT_HPP

#include <cmath>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "carleman/polynomial.hpp"
#include "carleman/symbols.hpp"

namespace testing {

using carleman::Complex;
using carleman::CoefficientField;
using carleman::MultiIndex;
using carleman::Scenario;
using carleman::Side;
using carleman::Symbol;
using carleman::SymbolTerm;

using Monomials = std::vector<std::pair<MultiIndex, Complex>>;

inline Symbol constant_symbol(int dim, int order, const Monomials& ms) {
  std::vector<SymbolTerm> terms;
  for (const auto& [a, c] : ms) terms.push_back({a, CoefficientField::constant(c)});
  return Symbol(dim, order, std::move(terms));
}

inline Symbol laplacian2() { return constant_symbol(2, 2, {{{2, 0}, 1.0}, {{0, 2}, 1.0}}); }

inline Symbol bilaplacian2() {
  return constant_symbol(2, 4, {{{4, 0}, 1.0}, {{2, 2}, 2.0}, {{0, 4}, 1.0}});
}

/// a x2 as a coefficient field in two dimensions.
inline CoefficientField linear_x2(double a) {
  return CoefficientField::analytic([a](const Eigen::VectorXd& x) {
    carleman::Jet<Complex> j(Complex(a * x(1)), 2);
    j.grad(1) = a;
    return j;
  });
}

inline carleman::TransmissionOpSpec top(Side s, int index, int order, Symbol p) {
  carleman::TransmissionOpSpec t;
  t.side = s;
  t.index = index;
  t.order = order;
  t.principal = std::move(p);
  return t;
}

/// Laplacians on both sides, continuity of u and of d_2 u, phi = g_k x2.
inline Scenario diffusion(double g1, double g2) {
  Scenario s;
  s.name = "test-diffusion";
  s.dim = 2;
  s.left.principal = laplacian2();
  s.right.principal = laplacian2();
  s.transmission.push_back({top(Side::left, 1, 0, constant_symbol(2, 0, {{{0, 0}, -1.0}})),
                            top(Side::right, 1, 0, constant_symbol(2, 0, {{{0, 0}, 1.0}}))});
  s.transmission.push_back({top(Side::left, 2, 1, constant_symbol(2, 1, {{{0, 1}, -1.0}})),
                            top(Side::right, 2, 1, constant_symbol(2, 1, {{{0, 1}, 1.0}}))});
  s.weight = carleman::WeightSpec::direct(linear_x2(g1), linear_x2(g2));
  s.x0 = Eigen::VectorXd::Zero(2);
  s.validate();
  return s;
}

/// Random real symmetric positive definite 2x2 second-order symbol.
inline Symbol random_elliptic2(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::Matrix2d b;
  b << u(rng), u(rng), u(rng), u(rng);
  const Eigen::Matrix2d a = b * b.transpose() + 0.2 * Eigen::Matrix2d::Identity();
  return constant_symbol(2, 2, {{{2, 0}, a(0, 0)}, {{1, 1}, 2.0 * a(0, 1)}, {{0, 2}, a(1, 1)}});
}

/// Random homogeneous symbol of the given order and dimension 2.
inline Symbol random_symbol(std::mt19937_64& rng, int order, bool complex_coeffs = false) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Monomials ms;
  for (int a = 0; a <= order; ++a)
    ms.push_back({{a, order - a}, Complex(u(rng), complex_coeffs ? u(rng) : 0.0)});
  return constant_symbol(2, order, ms);
}

/// Random scenario with orders (ml, mr), ml + mr even, and weights g_k x2.
inline Scenario random_scenario(std::mt19937_64& rng, int ml, int mr) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Scenario s;
  s.name = "random";
  s.dim = 2;
  s.relaxed_orders = true;
  s.left.principal = ml == 2 ? random_elliptic2(rng) : random_symbol(rng, ml);
  s.right.principal = mr == 2 ? random_elliptic2(rng) : random_symbol(rng, mr);
  const int m = (ml + mr) / 2;
  for (int j = 0; j < m; ++j) {
    std::uniform_int_distribution<int> ol(0, ml - 1), orr(0, mr - 1);
    const int bl = ol(rng), br = orr(rng);
    s.transmission.push_back({top(Side::left, j + 1, bl, random_symbol(rng, bl, true)),
                              top(Side::right, j + 1, br, random_symbol(rng, br, true))});
  }
  const double g1 = u(rng), g2 = u(rng);
  s.weight = carleman::WeightSpec::direct(linear_x2(std::abs(g1) < 0.05 ? 0.5 : g1),
                                          linear_x2(std::abs(g2) < 0.05 ? 0.5 : g2));
  s.x0 = Eigen::VectorXd::Zero(2);
  return s;
}

/// Monic polynomial from roots by repeated multiplication with (z - r).
inline carleman::ComplexPolynomial expand_roots(const std::vector<Complex>& rs) {
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(rs.size() + 1);
  c(0) = 1.0;
  for (std::size_t k = 0; k < rs.size(); ++k) {
    Eigen::VectorXcd next = Eigen::VectorXcd::Zero(rs.size() + 1);
    for (std::size_t i = 0; i <= k; ++i) {
      next(i + 1) += c(i);
      next(i) -= rs[k] * c(i);
    }
    c = next;
  }
  return carleman::ComplexPolynomial(c);
}

/// Roots with |Im| >= gap and pairwise distance >= gap.
inline std::vector<Complex> separated_roots(std::mt19937_64& rng, int degree, double gap) {
  std::uniform_real_distribution<double> re(-2.0, 2.0), im(gap, 2.0);
  std::bernoulli_distribution sign(0.5);
  std::vector<Complex> rs;
  while (static_cast<int>(rs.size()) < degree) {
    const Complex z(re(rng), sign(rng) ? im(rng) : -im(rng));
    bool ok = true;
    for (const Complex& r : rs) ok = ok && std::abs(r - z) >= gap;
    if (ok) rs.push_back(z);
  }
  return rs;
}

/// Roots of a polynomial via the eigenvalues of its companion matrix.
inline std::vector<Complex> companion_roots(const carleman::ComplexPolynomial& p) {
  const int d = p.degree();
  Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(d, d);
  for (int i = 1; i < d; ++i) c(i, i - 1) = 1.0;
  for (int i = 0; i < d; ++i) c(i, d - 1) = -p[i] / p.leading();
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(c);
  std::vector<Complex> out(es.eigenvalues().data(), es.eigenvalues().data() + d);
  return out;
}

}  // namespace testing

#endif  // CARLEMAN_TEST_SUPPORT_HPP
