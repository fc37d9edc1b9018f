// SPDX-License-Identifier: Apache-2.0
//
// Univariate polynomials in the normal covariable, their roots, and the
// factorization of a polynomial by the sign of the imaginary part of its
// roots.

#ifndef CARLEMAN_POLYNOMIAL_HPP
#define CARLEMAN_POLYNOMIAL_HPP

#include <algorithm>
#include <complex>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "carleman/error.hpp"

namespace carleman {

using Complex = std::complex<double>;

/// Dense polynomial c_0 + c_1 z + ... + c_d z^d.
///
/// Exact trailing zero coefficients are trimmed on construction, so
/// `degree()` is the true degree except for the zero polynomial (degree 0).
template <typename Scalar>
class Polynomial {
 public:
  using Coefficients = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Polynomial() : coeffs_(Coefficients::Zero(1)) {}

  explicit Polynomial(Coefficients coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.size() == 0) coeffs_ = Coefficients::Zero(1);
    trim();
  }

  Polynomial(std::initializer_list<Scalar> coeffs) {
    coeffs_.resize(static_cast<Eigen::Index>(coeffs.size()));
    Eigen::Index k = 0;
    for (const Scalar& c : coeffs) coeffs_(k++) = c;
    if (coeffs_.size() == 0) coeffs_ = Coefficients::Zero(1);
    trim();
  }

  static Polynomial constant(Scalar c) {
    Coefficients v(1);
    v(0) = c;
    return Polynomial(std::move(v));
  }

  static Polynomial monomial(int k, Scalar c = Scalar(1)) {
    Coefficients v = Coefficients::Zero(k + 1);
    v(k) = c;
    return Polynomial(std::move(v));
  }

  /// z - root
  static Polynomial linear_factor(Scalar root) { return Polynomial{-root, Scalar(1)}; }

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.size() == 1 && coeffs_(0) == Scalar(0); }
  const Coefficients& coeffs() const { return coeffs_; }
  Scalar leading() const { return coeffs_(coeffs_.size() - 1); }

  Scalar operator[](int k) const {
    return (k >= 0 && k <= degree()) ? coeffs_(k) : Scalar(0);
  }

  /// Horner evaluation.
  template <typename T>
  auto operator()(const T& z) const {
    using R = decltype(Scalar() * z);
    R acc = R(coeffs_(coeffs_.size() - 1));
    for (Eigen::Index k = coeffs_.size() - 2; k >= 0; --k) acc = acc * z + R(coeffs_(k));
    return acc;
  }

  Polynomial derivative() const {
    if (degree() == 0) return Polynomial();
    Coefficients d(degree());
    for (int k = 1; k <= degree(); ++k) d(k - 1) = Scalar(double(k)) * coeffs_(k);
    return Polynomial(std::move(d));
  }

  /// Coefficients padded (or truncated) to the given length.
  Coefficients padded(int length) const {
    Coefficients out = Coefficients::Zero(length);
    const int n = std::min<int>(length, static_cast<int>(coeffs_.size()));
    out.head(n) = coeffs_.head(n);
    return out;
  }

  Polynomial monic() const {
    if (is_zero()) throw Error("cannot normalize the zero polynomial");
    return Polynomial(Coefficients(coeffs_ / leading()));
  }

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    const int n = std::max(a.degree(), b.degree()) + 1;
    return Polynomial(Coefficients(a.padded(n) + b.padded(n)));
  }
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b) {
    const int n = std::max(a.degree(), b.degree()) + 1;
    return Polynomial(Coefficients(a.padded(n) - b.padded(n)));
  }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    Coefficients c = Coefficients::Zero(a.degree() + b.degree() + 1);
    for (int i = 0; i <= a.degree(); ++i)
      for (int j = 0; j <= b.degree(); ++j) c(i + j) += a.coeffs_(i) * b.coeffs_(j);
    return Polynomial(std::move(c));
  }
  friend Polynomial operator*(Scalar s, const Polynomial& p) {
    return Polynomial(Coefficients(s * p.coeffs_));
  }

 private:
  void trim() {
    Eigen::Index n = coeffs_.size();
    while (n > 1 && coeffs_(n - 1) == Scalar(0)) --n;
    if (n != coeffs_.size()) coeffs_.conservativeResize(n);
  }

  Coefficients coeffs_;
};

using ComplexPolynomial = Polynomial<Complex>;
using RealPolynomial = Polynomial<double>;

/// Product of (z - r) over the given roots.
ComplexPolynomial from_roots(std::span<const Complex> roots);

/// Largest relative coefficient deviation between two polynomials,
/// normalized by the largest coefficient magnitude of `reference`.
double relative_coefficient_error(const ComplexPolynomial& candidate,
                                  const ComplexPolynomial& reference);

/// All d roots with repetition: eigenvalues of the balanced companion
/// matrix, then up to five Newton steps on the original polynomial.
std::vector<Complex> roots(const ComplexPolynomial& p);

struct RootCluster {
  Complex center;
  int multiplicity = 0;
};

/// Single-linkage clustering at radius `delta`; clusters are ordered by the
/// index of their first member and centered at the arithmetic mean.
std::vector<RootCluster> cluster_multiplicities(std::span<const Complex> rs, double delta);

enum class RootClass { positive, negative, zero };

const char* to_string(RootClass c);

struct RootEntry {
  Complex root;
  int multiplicity = 0;
  RootClass root_class = RootClass::zero;
};

/// Classified root set; `entries` multiplicities add to `source_degree`.
struct RootSplit {
  std::vector<RootEntry> entries;
  double eps_im = 0.0;
  double delta = 0.0;
  int source_degree = 0;

  int count(RootClass c) const;
};

struct SplitOptions {
  /// Defaults to 1e-7 * max(1, max|root|).
  std::optional<double> eps_im;
  /// Defaults to 1e-5 * max(1, max|root|).
  std::optional<double> delta;
};

/// p = lead * p_plus * p_minus * p_zero with monic factors.
struct Split {
  ComplexPolynomial p_plus;
  ComplexPolynomial p_minus;
  ComplexPolynomial p_zero;
  Complex lead;
  RootSplit roots;

  int negative_degree() const { return p_minus.degree(); }
  ComplexPolynomial reconstruct() const;
};

double default_eps_im(std::span<const Complex> rs);
double default_delta(std::span<const Complex> rs);

/// Throws `Error` for the zero polynomial.
Split split(const ComplexPolynomial& p, const SplitOptions& options = {});

/// kappa = p_plus * p_zero (monic, degree d - deg p_minus).
ComplexPolynomial kappa(const Split& sp);

}  // namespace carleman

#endif  // CARLEMAN_POLYNOMIAL_HPP
