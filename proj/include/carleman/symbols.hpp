// SPDX-License-Identifier: Apache-2.0
//
// Principal symbols, weight functions and the quantities built from them:
// conjugated symbols p(x, xi + i tau phi'(x)), the reflection of the left
// side onto {x_n > 0}, Poisson brackets and the sub-ellipticity bracket.

#ifndef CARLEMAN_SYMBOLS_HPP
#define CARLEMAN_SYMBOLS_HPP

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "carleman/expression.hpp"
#include "carleman/jet.hpp"
#include "carleman/polynomial.hpp"

namespace carleman {

enum class Side { left, right };

inline const char* to_string(Side s) { return s == Side::left ? "left" : "right"; }
inline int side_index(Side s) { return s == Side::left ? 0 : 1; }

using MultiIndex = std::vector<int>;

/// x -> (x', -x_n)
Eigen::VectorXd reflect_point(const Eigen::VectorXd& x);

/// A complex coefficient field a(x) with value, gradient and Hessian.
///
/// Fields built from expressions or closures with jets are analytic. Fields
/// built from plain value closures fall back to central differences with
/// step eps^(1/3) * (1 + |x|) and report `uses_finite_differences()`.
class CoefficientField {
 public:
  using JetEvaluator = std::function<Jet<Complex>(const Eigen::VectorXd&)>;
  using ValueEvaluator = std::function<Complex(const Eigen::VectorXd&)>;

  CoefficientField();
  static CoefficientField constant(Complex c);
  static CoefficientField analytic(JetEvaluator f);
  static CoefficientField from_expression(Expression e, ParamMap params);
  static CoefficientField finite_difference(ValueEvaluator f);

  Jet<Complex> jet(const Eigen::VectorXd& x) const;
  Complex value(const Eigen::VectorXd& x) const;
  Eigen::VectorXcd grad(const Eigen::VectorXd& x) const { return jet(x).grad; }

  bool uses_finite_differences() const;
  bool is_zero_constant() const;

  /// x -> a(sigma x) * sign
  CoefficientField reflected(double sign = 1.0) const;

 private:
  struct Impl;
  explicit CoefficientField(std::nullptr_t);
  std::shared_ptr<const Impl> impl_;
};

struct SymbolTerm {
  MultiIndex alpha;
  CoefficientField coeff;
};

/// Coefficients of a symbol evaluated at one point x.
class FrozenSymbol {
 public:
  struct Term {
    MultiIndex alpha;
    Complex c;
    Eigen::VectorXcd dc;
  };

  FrozenSymbol(int dim, std::vector<Term> terms) : dim_(dim), terms_(std::move(terms)) {}

  int dim() const { return dim_; }
  const std::vector<Term>& terms() const { return terms_; }

  /// p(x, zeta) for complex zeta.
  Complex eval(const Eigen::VectorXcd& zeta) const;
  /// d p / d zeta_j (x, zeta)
  Eigen::VectorXcd dzeta(const Eigen::VectorXcd& zeta) const;
  /// d p / d x_j (x, zeta), coefficients differentiated
  Eigen::VectorXcd dx(const Eigen::VectorXcd& zeta) const;
  /// s -> p(x, base + s dir) as a polynomial in s.
  ComplexPolynomial along(const Eigen::VectorXcd& base, const Eigen::VectorXcd& dir) const;

 private:
  int dim_;
  std::vector<Term> terms_;
};

/// Homogeneous principal symbol sum_{|alpha| = order} a_alpha(x) xi^alpha.
class Symbol {
 public:
  Symbol() = default;
  Symbol(int dim, int order, std::vector<SymbolTerm> terms);

  int dim() const { return dim_; }
  int order() const { return order_; }
  const std::vector<SymbolTerm>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool uses_finite_differences() const;

  FrozenSymbol freeze(const Eigen::VectorXd& x) const;

  /// Coefficient of xi^alpha at x (zero if absent).
  Complex coefficient(const MultiIndex& alpha, const Eigen::VectorXd& x) const;

  /// a_alpha(x) -> (-1)^{alpha_n} a_alpha(sigma x)
  Symbol reflected() const;

 private:
  int dim_ = 0;
  int order_ = 0;
  std::vector<SymbolTerm> terms_;
};

struct OperatorSpec {
  Symbol principal;
  bool eigenvalue_shift = false;

  int order() const { return principal.order(); }
};

struct TransmissionOpSpec {
  Side side = Side::left;
  int index = 1;
  /// beta; kept even for the zero symbol.
  int order = 0;
  Symbol principal;
};

struct TransmissionPair {
  TransmissionOpSpec left;
  TransmissionOpSpec right;
};

struct WeightJet {
  double value = 0.0;
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;
};

/// (value, grad, hess) of f o sigma at sigma(x), given the jet of f at x.
WeightJet reflect(const WeightJet& w);

class WeightSpec {
 public:
  enum class Kind { direct, two_parameter };

  WeightSpec() = default;
  static WeightSpec direct(CoefficientField phi_left, CoefficientField phi_right);
  static WeightSpec two_parameter(CoefficientField psi_left, CoefficientField psi_right,
                                  double gamma);

  Kind kind() const { return kind_; }
  double gamma() const { return gamma_; }
  /// Same fields with gamma replaced (two-parameter mode only).
  WeightSpec with_gamma(double gamma) const;
  bool uses_finite_differences() const;

  /// phi_k, with phi = exp(gamma psi) in two-parameter mode.
  WeightJet phi(Side side, const Eigen::VectorXd& x) const;
  /// psi_k; in direct mode this is phi_k.
  WeightJet psi(Side side, const Eigen::VectorXd& x) const;
  /// phi_k scaled by 1/(gamma phi_k(x)) in two-parameter mode, so that the
  /// gradient is psi' and the Hessian psi'' + gamma psi' psi'^T. Direct mode
  /// returns phi_k unchanged.
  WeightJet local_phi(Side side, const Eigen::VectorXd& x) const;
  /// The positive factor removed by local_phi (1 in direct mode).
  double local_scale(Side side, const Eigen::VectorXd& x) const;

 private:
  Kind kind_ = Kind::direct;
  std::array<CoefficientField, 2> field_;
  double gamma_ = 1.0;
};

/// Point (x, xi', tau) on the interface cosphere; nu = e_n.
class InterfaceQuadruple {
 public:
  /// Normalizes (xi', tau) to unit length; throws on a zero covector,
  /// tau < 0 or x_n != 0.
  InterfaceQuadruple(Eigen::VectorXd x, Eigen::VectorXd xi_tangential, double tau);

  const Eigen::VectorXd& x() const { return x_; }
  const Eigen::VectorXd& xi() const { return xi_; }
  double tau() const { return tau_; }
  /// |(xi', tau)| before normalization.
  double scale() const { return scale_; }

 private:
  Eigen::VectorXd x_;
  Eigen::VectorXd xi_;
  double tau_ = 0.0;
  double scale_ = 1.0;
};

struct Scenario {
  std::string name;
  int dim = 2;
  OperatorSpec left;
  OperatorSpec right;
  std::vector<TransmissionPair> transmission;
  WeightSpec weight;
  Eigen::VectorXd x0;
  /// Interior-eigenvalue variant: P_k - tau^{m_k}, both sides on {x_n > 0}.
  bool eigenvalue_shift = false;
  /// Downgrades order compatibility and normality to warnings.
  bool relaxed_orders = false;
  ParamMap params;

  int m() const { return (left.order() + right.order()) / 2; }
  const OperatorSpec& op(Side s) const { return s == Side::left ? left : right; }
  const TransmissionOpSpec& t(Side s, int j) const {
    return s == Side::left ? transmission[j].left : transmission[j].right;
  }

  /// Throws InvariantError on the first violated invariant; returns the
  /// warnings for relaxed invariants.
  std::vector<std::string> validate() const;
};

/// Reflected operator for the left side (coefficient a(sigma x) (-1)^{alpha_n}).
OperatorSpec reflect_left(const OperatorSpec& op);
TransmissionOpSpec reflect_left(const TransmissionOpSpec& op);

/// Operator and weight as seen in the system formulation on {x_n > 0}:
/// the left side is reflected unless the scenario is an interior-eigenvalue
/// problem.
struct SystemSide {
  Symbol p;
  std::vector<Symbol> t;
  WeightJet phi;
  bool shift = false;
  int order = 0;
};

SystemSide system_side(const Scenario& scn, Side side, const Eigen::VectorXd& x);

/// xi_n -> p_{k,phi}(x, xi', xi_n, tau) (minus tau^{m_k} with the shift).
ComplexPolynomial conjugated_normal_polynomial(const Scenario& scn, Side side,
                                               const InterfaceQuadruple& q);

/// Same for an arbitrary (not normalized) interface point.
ComplexPolynomial conjugated_normal_polynomial(const Scenario& scn, Side side,
                                               const Eigen::VectorXd& x,
                                               const Eigen::VectorXd& xi_tangential, double tau);

/// xi_n -> t^j_{k,phi}(x, xi', xi_n, tau), j zero-based.
ComplexPolynomial conjugated_transmission_polynomial(const Scenario& scn, Side side, int j,
                                                     const Eigen::VectorXd& x,
                                                     const Eigen::VectorXd& xi_tangential,
                                                     double tau);

/// A symbol value with its first derivatives in x and xi.
struct SymbolDerivatives {
  Complex value;
  Eigen::VectorXcd dx;
  Eigen::VectorXcd dxi;
};

/// sum_j d_xi_j f d_x_j g - d_x_j f d_xi_j g
Complex poisson_bracket(const SymbolDerivatives& f, const SymbolDerivatives& g);

/// p(x, xi + i tau phi'(x)) and its (x, xi) derivatives at fixed tau.
SymbolDerivatives conjugated_symbol(const FrozenSymbol& p, const WeightJet& phi,
                                    const Eigen::VectorXd& xi, double tau);

struct BracketValue {
  /// {Re p_phi, Im p_phi}
  double value = 0.0;
  /// Imaginary part of (1/2i){conj p_phi, p_phi} relative to its modulus.
  double imaginary_residue = 0.0;
  /// p_phi itself (minus tau^m with the shift).
  Complex p_phi;
};

BracketValue subellipticity_bracket(const FrozenSymbol& p, const WeightJet& phi,
                                    const Eigen::VectorXd& xi, double tau, int shift_order = 0);

/// Bracket for side k of the scenario at x (original coordinates, local
/// weight normalization).
BracketValue subellipticity_bracket(const Scenario& scn, Side side, const Eigen::VectorXd& x,
                                    const Eigen::VectorXd& xi, double tau);

}  // namespace carleman

#endif  // CARLEMAN_SYMBOLS_HPP
