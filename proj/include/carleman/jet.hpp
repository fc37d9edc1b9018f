// SPDX-License-Identifier: Apache-2.0
//
// Second-order forward-mode jets: value, gradient and Hessian of a function
// of n variables, propagated through arithmetic and a few elementary
// functions.

#ifndef CARLEMAN_JET_HPP
#define CARLEMAN_JET_HPP

#include <cmath>
#include <complex>

#include <Eigen/Dense>

namespace carleman {

template <typename Scalar>
struct Jet {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  Scalar value{};
  Vector grad;
  Matrix hess;

  Jet() = default;
  Jet(Scalar v, int n) : value(v), grad(Vector::Zero(n)), hess(Matrix::Zero(n, n)) {}

  static Jet constant(Scalar v, int n) { return Jet(v, n); }

  /// The coordinate function x_k evaluated at `xk`.
  static Jet variable(int k, double xk, int n) {
    Jet j(Scalar(xk), n);
    j.grad(k) = Scalar(1);
    return j;
  }

  int dim() const { return static_cast<int>(grad.size()); }

  /// Applies a scalar function with derivatives f0, f1, f2 at `value`.
  Jet chain(Scalar f0, Scalar f1, Scalar f2) const {
    Jet r;
    r.value = f0;
    r.grad = f1 * grad;
    r.hess = f1 * hess + f2 * grad * grad.transpose();
    return r;
  }

  Jet& operator+=(const Jet& o) {
    value += o.value;
    grad += o.grad;
    hess += o.hess;
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    value -= o.value;
    grad -= o.grad;
    hess -= o.hess;
    return *this;
  }
};

template <typename S>
Jet<S> operator+(Jet<S> a, const Jet<S>& b) { return a += b; }

template <typename S>
Jet<S> operator-(Jet<S> a, const Jet<S>& b) { return a -= b; }

template <typename S>
Jet<S> operator-(const Jet<S>& a) {
  Jet<S> r = a;
  r.value = -r.value;
  r.grad = -r.grad;
  r.hess = -r.hess;
  return r;
}

template <typename S>
Jet<S> operator*(const Jet<S>& a, const Jet<S>& b) {
  Jet<S> r;
  r.value = a.value * b.value;
  r.grad = a.value * b.grad + b.value * a.grad;
  r.hess = a.value * b.hess + b.value * a.hess + a.grad * b.grad.transpose() +
           b.grad * a.grad.transpose();
  return r;
}

template <typename S>
Jet<S> operator*(S s, Jet<S> a) {
  a.value *= s;
  a.grad *= s;
  a.hess *= s;
  return a;
}

template <typename S>
Jet<S> reciprocal(const Jet<S>& a) {
  const S v = S(1) / a.value;
  return a.chain(v, -v * v, S(2) * v * v * v);
}

template <typename S>
Jet<S> operator/(const Jet<S>& a, const Jet<S>& b) { return a * reciprocal(b); }

template <typename S>
Jet<S> exp(const Jet<S>& a) {
  using std::exp;
  const S e = exp(a.value);
  return a.chain(e, e, e);
}

template <typename S>
Jet<S> sqrt(const Jet<S>& a) {
  using std::sqrt;
  const S s = sqrt(a.value);
  return a.chain(s, S(0.5) / s, S(-0.25) / (s * a.value));
}

/// Integer power by repeated squaring; negative exponents go through 1/a.
template <typename S>
Jet<S> pow(const Jet<S>& a, int k) {
  if (k < 0) return reciprocal(pow(a, -k));
  Jet<S> result = Jet<S>::constant(S(1), a.dim());
  Jet<S> base = a;
  while (k > 0) {
    if (k & 1) result = result * base;
    base = base * base;
    k >>= 1;
  }
  return result;
}

}  // namespace carleman

#endif  // CARLEMAN_JET_HPP
