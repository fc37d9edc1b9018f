// SPDX-License-Identifier: Apache-2.0

#include "carleman/expression.hpp"

#include <cctype>
#include <cstdlib>
#include <vector>

namespace carleman {

struct Expression::Node {
  enum class Kind { number, variable, parameter, add, sub, mul, div, neg, pow, exp, sqrt };
  Kind kind = Kind::number;
  Complex number{};
  int index = 0;  // variable index or integer exponent
  std::string name;
  std::shared_ptr<const Node> a, b;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Kind = Expression::Node::Kind;

NodePtr make(Kind k, NodePtr a = nullptr, NodePtr b = nullptr) {
  auto n = std::make_shared<Expression::Node>();
  n->kind = k;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  NodePtr parse() {
    NodePtr e = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected character '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw Error("expression \"" + s_ + "\" column " + std::to_string(pos_ + 1) + ": " + what);
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+'))
        lhs = make(Kind::add, lhs, term());
      else if (accept('-'))
        lhs = make(Kind::sub, lhs, term());
      else
        return lhs;
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*'))
        lhs = make(Kind::mul, lhs, unary());
      else if (accept('/'))
        lhs = make(Kind::div, lhs, unary());
      else
        return lhs;
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Kind::neg, unary());
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = atom();
    if (accept('^')) {
      skip();
      bool negative = false;
      if (accept('-')) negative = true;
      skip();
      const std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (start == pos_) fail("exponent must be an integer literal");
      auto n = std::make_shared<Expression::Node>();
      n->kind = Kind::pow;
      n->index = std::atoi(s_.substr(start, pos_ - start).c_str()) * (negative ? -1 : 1);
      n->a = base;
      return n;
    }
    return base;
  }

  NodePtr atom() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if (accept('(')) {
      NodePtr e = expr();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = s_.c_str() + pos_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) fail("malformed number");
      pos_ += static_cast<std::size_t>(end - begin);
      auto n = std::make_shared<Expression::Node>();
      n->kind = Kind::number;
      n->number = v;
      return n;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
        ++pos_;
      const std::string name = s_.substr(start, pos_ - start);
      if (name == "exp" || name == "sqrt") {
        if (!accept('(')) fail("expected '(' after " + name);
        NodePtr arg = expr();
        if (!accept(')')) fail("expected ')'");
        return make(name == "exp" ? Kind::exp : Kind::sqrt, arg);
      }
      auto n = std::make_shared<Expression::Node>();
      if (name == "i") {
        n->kind = Kind::number;
        n->number = Complex(0.0, 1.0);
      } else if (name.size() > 1 && name[0] == 'x' &&
                 name.find_first_not_of("0123456789", 1) == std::string::npos) {
        n->kind = Kind::variable;
        n->index = std::atoi(name.c_str() + 1);
        if (n->index < 1) fail("variables are numbered from x1");
      } else {
        n->kind = Kind::parameter;
        n->name = name;
      }
      return n;
    }
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

Jet<Complex> eval(const Expression::Node& n, const Eigen::VectorXd& x, const ParamMap& params) {
  const int dim = static_cast<int>(x.size());
  switch (n.kind) {
    case Kind::number: return Jet<Complex>::constant(n.number, dim);
    case Kind::variable:
      if (n.index > dim)
        throw Error("variable x" + std::to_string(n.index) + " exceeds dimension " +
                    std::to_string(dim));
      return Jet<Complex>::variable(n.index - 1, x(n.index - 1), dim);
    case Kind::parameter: {
      auto it = params.find(n.name);
      if (it == params.end()) throw Error("unknown parameter '" + n.name + "'");
      return Jet<Complex>::constant(it->second, dim);
    }
    case Kind::add: return eval(*n.a, x, params) + eval(*n.b, x, params);
    case Kind::sub: return eval(*n.a, x, params) - eval(*n.b, x, params);
    case Kind::mul: return eval(*n.a, x, params) * eval(*n.b, x, params);
    case Kind::div: return eval(*n.a, x, params) / eval(*n.b, x, params);
    case Kind::neg: return -eval(*n.a, x, params);
    case Kind::pow: return pow(eval(*n.a, x, params), n.index);
    case Kind::exp: return exp(eval(*n.a, x, params));
    case Kind::sqrt: return sqrt(eval(*n.a, x, params));
  }
  throw Error("corrupt expression node");
}

void collect(const Expression::Node& n, std::set<std::string>& names, int& max_var) {
  if (n.kind == Kind::parameter) names.insert(n.name);
  if (n.kind == Kind::variable) max_var = std::max(max_var, n.index);
  if (n.a) collect(*n.a, names, max_var);
  if (n.b) collect(*n.b, names, max_var);
}

}  // namespace

Expression::Expression() {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::number;
  root_ = n;
  text_ = "0";
}

Expression Expression::parse(const std::string& text) {
  Expression e;
  e.root_ = Parser(text).parse();
  e.text_ = text;
  return e;
}

Expression Expression::constant(Complex c) {
  Expression e;
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::number;
  n->number = c;
  e.root_ = n;
  e.text_ = c.imag() == 0.0 ? std::to_string(c.real()) : "(complex)";
  return e;
}

Jet<Complex> Expression::evaluate(const Eigen::VectorXd& x, const ParamMap& params) const {
  return eval(*root_, x, params);
}

Complex Expression::value(const Eigen::VectorXd& x, const ParamMap& params) const {
  return evaluate(x, params).value;
}

std::set<std::string> Expression::parameters() const {
  std::set<std::string> names;
  int mv = 0;
  collect(*root_, names, mv);
  return names;
}

int Expression::max_variable() const {
  std::set<std::string> names;
  int mv = 0;
  collect(*root_, names, mv);
  return mv;
}

}  // namespace carleman
