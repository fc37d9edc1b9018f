// SPDX-License-Identifier: Apache-2.0

#include "carleman/symbols.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace carleman {

Eigen::VectorXd reflect_point(const Eigen::VectorXd& x) {
  Eigen::VectorXd y = x;
  y(y.size() - 1) = -y(y.size() - 1);
  return y;
}

namespace {

Complex ipow(Complex z, int k) {
  Complex r = 1.0;
  for (int i = 0; i < k; ++i) r *= z;
  return r;
}

Jet<Complex> finite_difference_jet(const CoefficientField::ValueEvaluator& f,
                                   const Eigen::VectorXd& x) {
  const int n = static_cast<int>(x.size());
  const double eps = std::numeric_limits<double>::epsilon();
  const double h = std::cbrt(eps) * (1.0 + x.norm());
  const double h2 = std::pow(eps, 0.25) * (1.0 + x.norm());
  Jet<Complex> j(f(x), n);
  for (int a = 0; a < n; ++a) {
    Eigen::VectorXd xp = x, xm = x;
    xp(a) += h;
    xm(a) -= h;
    j.grad(a) = (f(xp) - f(xm)) / (2.0 * h);
  }
  for (int a = 0; a < n; ++a) {
    for (int b = a; b < n; ++b) {
      auto shifted = [&](double sa, double sb) {
        Eigen::VectorXd y = x;
        y(a) += sa * h2;
        y(b) += sb * h2;
        return f(y);
      };
      const Complex v = (shifted(1, 1) - shifted(1, -1) - shifted(-1, 1) + shifted(-1, -1)) /
                        (4.0 * h2 * h2);
      j.hess(a, b) = j.hess(b, a) = v;
    }
  }
  return j;
}

}  // namespace

struct CoefficientField::Impl {
  JetEvaluator jet;
  bool finite_difference = false;
  bool zero_constant = false;
};

CoefficientField::CoefficientField() : CoefficientField(constant(0.0)) {}

CoefficientField CoefficientField::constant(Complex c) {
  CoefficientField f(analytic([c](const Eigen::VectorXd& x) {
    return Jet<Complex>::constant(c, static_cast<int>(x.size()));
  }));
  auto impl = std::make_shared<Impl>(*f.impl_);
  impl->zero_constant = (c == Complex(0.0));
  f.impl_ = impl;
  return f;
}

CoefficientField CoefficientField::analytic(JetEvaluator f) {
  CoefficientField out(nullptr);
  auto impl = std::make_shared<Impl>();
  impl->jet = std::move(f);
  out.impl_ = impl;
  return out;
}

CoefficientField CoefficientField::from_expression(Expression e, ParamMap params) {
  return analytic([e = std::move(e), params = std::move(params)](const Eigen::VectorXd& x) {
    return e.evaluate(x, params);
  });
}

CoefficientField CoefficientField::finite_difference(ValueEvaluator f) {
  CoefficientField out(nullptr);
  auto impl = std::make_shared<Impl>();
  impl->jet = [f = std::move(f)](const Eigen::VectorXd& x) { return finite_difference_jet(f, x); };
  impl->finite_difference = true;
  out.impl_ = impl;
  return out;
}

Jet<Complex> CoefficientField::jet(const Eigen::VectorXd& x) const { return impl_->jet(x); }

Complex CoefficientField::value(const Eigen::VectorXd& x) const { return jet(x).value; }

bool CoefficientField::uses_finite_differences() const { return impl_->finite_difference; }

bool CoefficientField::is_zero_constant() const { return impl_->zero_constant; }

CoefficientField CoefficientField::reflected(double sign) const {
  const auto inner = impl_;
  CoefficientField out(nullptr);
  auto impl = std::make_shared<Impl>(*inner);
  impl->jet = [inner, sign](const Eigen::VectorXd& x) {
    Jet<Complex> j = inner->jet(reflect_point(x));
    const Eigen::Index n = x.size() - 1;
    j.grad(n) = -j.grad(n);
    j.hess.row(n) *= -1.0;
    j.hess.col(n) *= -1.0;
    return Complex(sign) * j;
  };
  out.impl_ = impl;
  return out;
}

// Private null constructor used by the factories above.
CoefficientField::CoefficientField(std::nullptr_t) {}

Complex FrozenSymbol::eval(const Eigen::VectorXcd& zeta) const {
  Complex acc = 0.0;
  for (const auto& t : terms_) {
    Complex mono = t.c;
    for (int j = 0; j < dim_; ++j) mono *= ipow(zeta(j), t.alpha[j]);
    acc += mono;
  }
  return acc;
}

Eigen::VectorXcd FrozenSymbol::dzeta(const Eigen::VectorXcd& zeta) const {
  Eigen::VectorXcd g = Eigen::VectorXcd::Zero(dim_);
  for (const auto& t : terms_) {
    for (int j = 0; j < dim_; ++j) {
      if (t.alpha[j] == 0) continue;
      Complex mono = t.c * double(t.alpha[j]);
      for (int l = 0; l < dim_; ++l) mono *= ipow(zeta(l), t.alpha[l] - (l == j ? 1 : 0));
      g(j) += mono;
    }
  }
  return g;
}

Eigen::VectorXcd FrozenSymbol::dx(const Eigen::VectorXcd& zeta) const {
  Eigen::VectorXcd g = Eigen::VectorXcd::Zero(dim_);
  for (const auto& t : terms_) {
    Complex mono = 1.0;
    for (int j = 0; j < dim_; ++j) mono *= ipow(zeta(j), t.alpha[j]);
    g += mono * t.dc;
  }
  return g;
}

ComplexPolynomial FrozenSymbol::along(const Eigen::VectorXcd& base,
                                      const Eigen::VectorXcd& dir) const {
  ComplexPolynomial acc;
  for (const auto& t : terms_) {
    ComplexPolynomial mono = ComplexPolynomial::constant(t.c);
    for (int j = 0; j < dim_; ++j) {
      if (t.alpha[j] == 0) continue;
      const ComplexPolynomial lin{base(j), dir(j)};
      for (int k = 0; k < t.alpha[j]; ++k) mono = mono * lin;
    }
    acc = acc + mono;
  }
  return acc;
}

Symbol::Symbol(int dim, int order, std::vector<SymbolTerm> terms)
    : dim_(dim), order_(order), terms_(std::move(terms)) {
  for (const auto& t : terms_) {
    if (static_cast<int>(t.alpha.size()) != dim_)
      throw Error("multi-index length does not match dimension " + std::to_string(dim_));
    int total = 0;
    for (int a : t.alpha) {
      if (a < 0) throw Error("negative multi-index entry");
      total += a;
    }
    if (total != order_)
      throw Error("term of degree " + std::to_string(total) + " in a symbol of order " +
                  std::to_string(order_));
  }
}

bool Symbol::uses_finite_differences() const {
  for (const auto& t : terms_)
    if (t.coeff.uses_finite_differences()) return true;
  return false;
}

FrozenSymbol Symbol::freeze(const Eigen::VectorXd& x) const {
  std::vector<FrozenSymbol::Term> frozen;
  frozen.reserve(terms_.size());
  for (const auto& t : terms_) {
    const Jet<Complex> j = t.coeff.jet(x);
    frozen.push_back({t.alpha, j.value, j.grad});
  }
  return FrozenSymbol(dim_, std::move(frozen));
}

Complex Symbol::coefficient(const MultiIndex& alpha, const Eigen::VectorXd& x) const {
  Complex acc = 0.0;
  for (const auto& t : terms_)
    if (t.alpha == alpha) acc += t.coeff.value(x);
  return acc;
}

Symbol Symbol::reflected() const {
  std::vector<SymbolTerm> out;
  out.reserve(terms_.size());
  for (const auto& t : terms_) {
    const double sign = (t.alpha.back() % 2 == 0) ? 1.0 : -1.0;
    out.push_back({t.alpha, t.coeff.reflected(sign)});
  }
  return Symbol(dim_, order_, std::move(out));
}

WeightJet reflect(const WeightJet& w) {
  WeightJet r = w;
  const Eigen::Index n = w.grad.size() - 1;
  r.grad(n) = -r.grad(n);
  r.hess.row(n) *= -1.0;
  r.hess.col(n) *= -1.0;
  return r;
}

WeightSpec WeightSpec::direct(CoefficientField phi_left, CoefficientField phi_right) {
  WeightSpec w;
  w.kind_ = Kind::direct;
  w.field_ = {std::move(phi_left), std::move(phi_right)};
  return w;
}

WeightSpec WeightSpec::two_parameter(CoefficientField psi_left, CoefficientField psi_right,
                                     double gamma) {
  if (!(gamma > 0.0)) throw Error("gamma must be positive");
  WeightSpec w;
  w.kind_ = Kind::two_parameter;
  w.field_ = {std::move(psi_left), std::move(psi_right)};
  w.gamma_ = gamma;
  return w;
}

WeightSpec WeightSpec::with_gamma(double gamma) const {
  if (kind_ != Kind::two_parameter) throw Error("gamma applies to two-parameter weights only");
  return two_parameter(field_[0], field_[1], gamma);
}

bool WeightSpec::uses_finite_differences() const {
  return field_[0].uses_finite_differences() || field_[1].uses_finite_differences();
}

WeightJet WeightSpec::psi(Side side, const Eigen::VectorXd& x) const {
  const Jet<Complex> j = field_[side_index(side)].jet(x);
  return {j.value.real(), j.grad.real(), j.hess.real()};
}

WeightJet WeightSpec::phi(Side side, const Eigen::VectorXd& x) const {
  WeightJet s = psi(side, x);
  if (kind_ == Kind::direct) return s;
  const double e = std::exp(gamma_ * s.value);
  WeightJet w;
  w.value = e;
  w.grad = gamma_ * e * s.grad;
  w.hess = gamma_ * e * (s.hess + gamma_ * s.grad * s.grad.transpose());
  return w;
}

WeightJet WeightSpec::local_phi(Side side, const Eigen::VectorXd& x) const {
  WeightJet s = psi(side, x);
  if (kind_ == Kind::direct) return s;
  WeightJet w;
  w.value = 1.0 / gamma_;
  w.grad = s.grad;
  w.hess = s.hess + gamma_ * s.grad * s.grad.transpose();
  return w;
}

double WeightSpec::local_scale(Side side, const Eigen::VectorXd& x) const {
  if (kind_ == Kind::direct) return 1.0;
  return gamma_ * std::exp(gamma_ * psi(side, x).value);
}

InterfaceQuadruple::InterfaceQuadruple(Eigen::VectorXd x, Eigen::VectorXd xi_tangential,
                                       double tau)
    : x_(std::move(x)), xi_(std::move(xi_tangential)), tau_(tau) {
  if (x_.size() < 2 || xi_.size() != x_.size() - 1)
    throw Error("interface quadruple: tangential covector must have n-1 entries");
  if (std::abs(x_(x_.size() - 1)) > 1e-12) throw Error("interface quadruple: x_n must be 0");
  if (tau_ < 0.0) throw Error("interface quadruple: tau must be non-negative");
  scale_ = std::sqrt(xi_.squaredNorm() + tau_ * tau_);
  if (scale_ == 0.0) throw Error("interface quadruple: zero covector (xi', tau)");
  xi_ /= scale_;
  tau_ /= scale_;
}

OperatorSpec reflect_left(const OperatorSpec& op) {
  return {op.principal.reflected(), op.eigenvalue_shift};
}

TransmissionOpSpec reflect_left(const TransmissionOpSpec& op) {
  TransmissionOpSpec r = op;
  r.principal = op.principal.reflected();
  return r;
}

SystemSide system_side(const Scenario& scn, Side side, const Eigen::VectorXd& x) {
  SystemSide s;
  s.shift = scn.eigenvalue_shift;
  s.order = scn.op(side).order();
  const bool reflect_this = side == Side::left && !scn.eigenvalue_shift;
  if (reflect_this) {
    s.p = scn.left.principal.reflected();
    for (const auto& pair : scn.transmission) s.t.push_back(pair.left.principal.reflected());
    s.phi = reflect(scn.weight.local_phi(Side::left, reflect_point(x)));
  } else {
    s.p = scn.op(side).principal;
    for (const auto& pair : scn.transmission)
      s.t.push_back(side == Side::left ? pair.left.principal : pair.right.principal);
    s.phi = scn.weight.local_phi(side, x);
  }
  return s;
}

namespace {

void check_interface_point(const Eigen::VectorXd& x, const Eigen::VectorXd& xi, double tau,
                           int dim) {
  if (x.size() != dim || xi.size() != dim - 1) throw Error("interface point has wrong dimension");
  if (std::abs(x(dim - 1)) > 1e-12) throw Error("non-interface point: x_n != 0");
  if (xi.squaredNorm() + tau * tau == 0.0) throw Error("zero covector (xi', tau) = 0");
}

ComplexPolynomial normal_polynomial(const FrozenSymbol& p, const WeightJet& phi,
                                    const Eigen::VectorXd& xi, double tau) {
  const int n = p.dim();
  Eigen::VectorXcd base(n);
  for (int j = 0; j < n - 1; ++j) base(j) = Complex(xi(j), tau * phi.grad(j));
  base(n - 1) = Complex(0.0, tau * phi.grad(n - 1));
  Eigen::VectorXcd dir = Eigen::VectorXcd::Zero(n);
  dir(n - 1) = 1.0;
  return p.along(base, dir);
}

}  // namespace

ComplexPolynomial conjugated_normal_polynomial(const Scenario& scn, Side side,
                                               const Eigen::VectorXd& x,
                                               const Eigen::VectorXd& xi_tangential, double tau) {
  check_interface_point(x, xi_tangential, tau, scn.dim);
  const SystemSide s = system_side(scn, side, x);
  ComplexPolynomial poly = normal_polynomial(s.p.freeze(x), s.phi, xi_tangential, tau);
  if (s.shift) poly = poly - ComplexPolynomial::constant(std::pow(tau, s.order));
  return poly;
}

ComplexPolynomial conjugated_normal_polynomial(const Scenario& scn, Side side,
                                               const InterfaceQuadruple& q) {
  return conjugated_normal_polynomial(scn, side, q.x(), q.xi(), q.tau());
}

ComplexPolynomial conjugated_transmission_polynomial(const Scenario& scn, Side side, int j,
                                                     const Eigen::VectorXd& x,
                                                     const Eigen::VectorXd& xi_tangential,
                                                     double tau) {
  check_interface_point(x, xi_tangential, tau, scn.dim);
  const SystemSide s = system_side(scn, side, x);
  if (s.t.at(j).is_zero()) return ComplexPolynomial();
  return normal_polynomial(s.t[j].freeze(x), s.phi, xi_tangential, tau);
}

Complex poisson_bracket(const SymbolDerivatives& f, const SymbolDerivatives& g) {
  return (f.dxi.array() * g.dx.array() - f.dx.array() * g.dxi.array()).sum();
}

SymbolDerivatives conjugated_symbol(const FrozenSymbol& p, const WeightJet& phi,
                                    const Eigen::VectorXd& xi, double tau) {
  const Eigen::VectorXcd zeta =
      xi.cast<Complex>() + Complex(0.0, tau) * phi.grad.cast<Complex>();
  SymbolDerivatives d;
  d.value = p.eval(zeta);
  d.dxi = p.dzeta(zeta);
  d.dx = p.dx(zeta) + Complex(0.0, tau) * (phi.hess.transpose().cast<Complex>() * d.dxi);
  return d;
}

BracketValue subellipticity_bracket(const FrozenSymbol& p, const WeightJet& phi,
                                    const Eigen::VectorXd& xi, double tau, int shift_order) {
  const SymbolDerivatives d = conjugated_symbol(p, phi, xi, tau);
  BracketValue out;
  out.p_phi = d.value;
  if (shift_order > 0) out.p_phi -= std::pow(tau, shift_order);
  const Eigen::ArrayXcd px = d.dx.array(), pxi = d.dxi.array();
  out.value = (pxi.real() * px.imag() - px.real() * pxi.imag()).sum();
  const Complex c =
      (pxi.conjugate() * px - px.conjugate() * pxi).sum() / Complex(0.0, 2.0);
  const double scale = (pxi.abs() * px.abs()).sum();
  out.imaginary_residue = scale > 0.0 ? std::abs(c.imag()) / scale : 0.0;
  return out;
}

BracketValue subellipticity_bracket(const Scenario& scn, Side side, const Eigen::VectorXd& x,
                                    const Eigen::VectorXd& xi, double tau) {
  if (tau < 0.0) throw Error("tau must be non-negative");
  if (xi.squaredNorm() + tau * tau == 0.0) throw Error("zero covector (xi, tau) = 0");
  const OperatorSpec& op = scn.op(side);
  return subellipticity_bracket(op.principal.freeze(x), scn.weight.local_phi(side, x), xi, tau,
                                scn.eigenvalue_shift ? op.order() : 0);
}

std::vector<std::string> Scenario::validate() const {
  std::vector<std::string> warnings;
  auto violate = [&](const std::string& invariant, const std::string& what) {
    throw InvariantError(invariant, what);
  };
  if (dim < 2) violate("dimension", "n must be at least 2");
  if (x0.size() != dim) violate("base-point", "x0 must have n entries");
  if (std::abs(x0(dim - 1)) > 1e-12) violate("base-point", "x0 must lie on the interface x_n = 0");
  for (Side s : {Side::left, Side::right}) {
    const int mk = op(s).order();
    if (op(s).principal.dim() != dim)
      violate("dimension", std::string(to_string(s)) + " operator has the wrong dimension");
    if (mk <= 0 || mk % 2 != 0)
      violate("even-order", std::string(to_string(s)) + " operator order must be even and positive");
  }
  if (static_cast<int>(transmission.size()) != m())
    violate("transmission-count", "expected m = (m_left + m_right)/2 = " + std::to_string(m()) +
                                      " transmission pairs, got " +
                                      std::to_string(transmission.size()));

  // Sampled points: x0 and small tangential and normal offsets.
  std::vector<Eigen::VectorXd> interface_pts{x0};
  for (int j = 0; j + 1 < dim; ++j) {
    for (double s : {-0.25, 0.25}) {
      Eigen::VectorXd y = x0;
      y(j) += s;
      interface_pts.push_back(y);
    }
  }
  Eigen::VectorXd en = Eigen::VectorXd::Zero(dim);
  en(dim - 1) = 1.0;

  for (Side s : {Side::left, Side::right}) {
    MultiIndex top(dim, 0);
    top[dim - 1] = op(s).order();
    Eigen::VectorXd inside = x0;
    inside(dim - 1) = (s == Side::left && !eigenvalue_shift) ? -0.25 : 0.25;
    std::vector<Eigen::VectorXd> pts = interface_pts;
    pts.push_back(inside);
    for (const auto& y : pts) {
      const Complex c = op(s).principal.coefficient(top, y);
      if (std::abs(c - 1.0) > 1e-12) {
        std::ostringstream os;
        os << to_string(s) << " operator: coefficient of xi_n^" << op(s).order() << " is " << c
           << ", must be 1";
        violate("normalization", os.str());
      }
    }
  }

  for (std::size_t j = 0; j < transmission.size(); ++j) {
    const auto& pair = transmission[j];
    const std::string tag = "transmission." + std::to_string(j + 1);
    for (Side s : {Side::left, Side::right}) {
      const TransmissionOpSpec& t = s == Side::left ? pair.left : pair.right;
      if (t.principal.dim() != dim && !t.principal.is_zero())
        violate("dimension", tag + " " + to_string(s) + " has the wrong dimension");
      if (t.order < 0 || t.order >= op(s).order())
        violate("transmission-order", tag + " " + to_string(s) + " order must lie in [0, m_k)");
      bool normal = false;
      if (!t.principal.is_zero()) {
        const Complex v = t.principal.freeze(x0).eval(en.cast<Complex>());
        normal = std::abs(v) > 1e-12;
      }
      if (!normal) {
        const std::string msg = tag + " " + to_string(s) + " symbol vanishes at the conormal e_n";
        if (relaxed_orders)
          warnings.push_back("normality: " + msg);
        else
          violate("normality", msg);
      }
    }
    if (left.order() - pair.left.order != right.order() - pair.right.order) {
      const std::string msg = tag + ": m_left - beta_left != m_right - beta_right";
      if (relaxed_orders)
        warnings.push_back("order-compatibility: " + msg);
      else
        violate("order-compatibility", msg);
    }
  }

  for (const auto& y : interface_pts) {
    const double a = weight.phi(Side::left, y).value;
    const double b = weight.phi(Side::right, y).value;
    if (std::abs(a - b) > 1e-10 * std::max({1.0, std::abs(a), std::abs(b)}))
      violate("weight-continuity", "phi_left != phi_right on the interface");
  }
  if (weight.kind() == WeightSpec::Kind::two_parameter && !(weight.gamma() > 0.0))
    violate("weight-gamma", "gamma must be positive");
  return warnings;
}

}  // namespace carleman
