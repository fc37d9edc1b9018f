// SPDX-License-Identifier: Apache-2.0
//
// A small expression language for coefficient and weight fields:
//
//   expr   := term (('+' | '-') term)*
//   term   := unary (('*' | '/') unary)*
//   unary  := ('+' | '-') unary | power
//   power  := atom ('^' integer)?
//   atom   := number | 'i' | x1..xn | name | func '(' expr ')' | '(' expr ')'
//   func   := exp | sqrt
//
// Names other than x1..xn and i refer to scalar parameters resolved at
// evaluation time.

#ifndef CARLEMAN_EXPRESSION_HPP
#define CARLEMAN_EXPRESSION_HPP

#include <map>
#include <memory>
#include <set>
#include <string>

#include "carleman/jet.hpp"
#include "carleman/polynomial.hpp"

namespace carleman {

using ParamMap = std::map<std::string, double>;

class Expression {
 public:
  struct Node;

  Expression();
  /// Throws `Error` with the column of the offending token.
  static Expression parse(const std::string& text);
  static Expression constant(Complex c);

  /// Value, gradient and Hessian with respect to x at the real point `x`.
  Jet<Complex> evaluate(const Eigen::VectorXd& x, const ParamMap& params) const;
  Complex value(const Eigen::VectorXd& x, const ParamMap& params) const;

  /// Parameter names referenced by the expression.
  std::set<std::string> parameters() const;
  /// Largest k for which x_k appears (0 if none).
  int max_variable() const;
  const std::string& text() const { return text_; }

 private:
  std::shared_ptr<const Node> root_;
  std::string text_;
};

}  // namespace carleman

#endif  // CARLEMAN_EXPRESSION_HPP
