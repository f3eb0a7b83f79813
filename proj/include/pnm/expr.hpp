// Copyright 2026 The pnmkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Scalar functions of time parsed from text.
//
// Grammar (one variable `t`):
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?
//   primary := number | 't' | name '(' expr ')' | '(' expr ')'
//
// `^` binds tighter than unary minus and is right-associative, so
// "-2^2" is -4 and "2^3^2" is 512. Function names: exp log sin cos cosh sinh
// tanh sqrt abs.

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>

#include "pnm/errors.hpp"

namespace pnm {

enum class BinaryOp : char { Add = '+', Sub = '-', Mul = '*', Div = '/', Pow = '^' };

enum class Function { Exp, Log, Sin, Cos, Cosh, Sinh, Tanh, Sqrt, Abs };

struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

struct NumberNode {
  double value;
};
struct VariableNode {};
struct UnaryMinusNode {
  ExprPtr operand;
};
struct BinaryNode {
  BinaryOp op;
  ExprPtr left;
  ExprPtr right;
};
struct CallNode {
  Function fn;
  ExprPtr argument;
};

struct ExprNode {
  std::variant<NumberNode, VariableNode, UnaryMinusNode, BinaryNode, CallNode> node;
};

/// Immutable expression tree; cheap to copy (shared structure).
class ExprAst {
 public:
  ExprAst() = default;
  explicit ExprAst(ExprPtr root) : root_(std::move(root)) {}

  const ExprPtr& root() const noexcept { return root_; }
  bool empty() const noexcept { return root_ == nullptr; }

  static ExprAst number(double v) {
    return ExprAst(std::make_shared<const ExprNode>(ExprNode{NumberNode{v}}));
  }
  static ExprAst variable() {
    return ExprAst(std::make_shared<const ExprNode>(ExprNode{VariableNode{}}));
  }
  static ExprAst binary(BinaryOp op, const ExprAst& l, const ExprAst& r) {
    return ExprAst(std::make_shared<const ExprNode>(ExprNode{BinaryNode{op, l.root_, r.root_}}));
  }

 private:
  ExprPtr root_;
};

namespace detail {

struct FunctionName {
  std::string_view name;
  Function fn;
};

inline constexpr std::array<FunctionName, 9> kFunctions{{
    {"exp", Function::Exp},
    {"log", Function::Log},
    {"sin", Function::Sin},
    {"cos", Function::Cos},
    {"cosh", Function::Cosh},
    {"sinh", Function::Sinh},
    {"tanh", Function::Tanh},
    {"sqrt", Function::Sqrt},
    {"abs", Function::Abs},
}};

inline std::string_view function_name(Function fn) {
  for (const auto& f : kFunctions) {
    if (f.fn == fn) return f.name;
  }
  return "?";
}

inline double apply_function(Function fn, double x) {
  switch (fn) {
    case Function::Exp: return std::exp(x);
    case Function::Log: return std::log(x);
    case Function::Sin: return std::sin(x);
    case Function::Cos: return std::cos(x);
    case Function::Cosh: return std::cosh(x);
    case Function::Sinh: return std::sinh(x);
    case Function::Tanh: return std::tanh(x);
    case Function::Sqrt: return std::sqrt(x);
    case Function::Abs: return std::abs(x);
  }
  return std::nan("");
}

class Parser {
 public:
  explicit Parser(std::string_view text) : src_(text) {}

  ExprAst parse() {
    if (src_.empty()) throw SyntaxError("empty expression", 0);
    for (std::size_t i = 0; i < src_.size(); ++i) {
      if (static_cast<unsigned char>(src_[i]) > 127) throw SyntaxError("non-ASCII character", i);
    }
    ExprPtr e = expr();
    skip_ws();
    if (pos_ < src_.size()) {
      if (src_[pos_] == ')') throw UnbalancedParens("unmatched ')'", pos_);
      throw SyntaxError(std::string("unexpected '") + src_[pos_] + "'", pos_);
    }
    return ExprAst(std::move(e));
  }

 private:
  static ExprPtr make(ExprNode n) { return std::make_shared<const ExprNode>(std::move(n)); }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  ExprPtr expr() {
    ExprPtr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = make({BinaryNode{BinaryOp::Add, lhs, term()}});
      } else if (accept('-')) {
        lhs = make({BinaryNode{BinaryOp::Sub, lhs, term()}});
      } else {
        return lhs;
      }
    }
  }

  ExprPtr term() {
    ExprPtr lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = make({BinaryNode{BinaryOp::Mul, lhs, unary()}});
      } else if (accept('/')) {
        lhs = make({BinaryNode{BinaryOp::Div, lhs, unary()}});
      } else {
        return lhs;
      }
    }
  }

  ExprPtr unary() {
    if (accept('-')) return make({UnaryMinusNode{unary()}});
    return power();
  }

  ExprPtr power() {
    ExprPtr base = primary();
    if (accept('^')) return make({BinaryNode{BinaryOp::Pow, base, unary()}});
    return base;
  }

  ExprPtr primary() {
    skip_ws();
    if (pos_ >= src_.size()) throw SyntaxError("unexpected end of expression", pos_);
    const char c = src_[pos_];
    if (c == '(') {
      const std::size_t open = pos_;
      ++pos_;
      ExprPtr inner = expr();
      if (!accept(')')) throw UnbalancedParens("missing ')' for '('", open);
      return inner;
    }
    if (c == ')') throw UnbalancedParens("unexpected ')'", pos_);
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    throw SyntaxError(std::string("unexpected '") + c + "'", pos_);
  }

  ExprPtr number() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.')) {
      ++pos_;
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) ++p;
      if (p < src_.size() && std::isdigit(static_cast<unsigned char>(src_[p]))) {
        pos_ = p;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      }
    }
    const std::string token(src_.substr(start, pos_ - start));
    char* end = nullptr;
    const double v = std::strtod(token.c_str(), &end);
    if (end != token.c_str() + token.size()) throw SyntaxError("malformed number '" + token + "'", start);
    return make({NumberNode{v}});
  }

  ExprPtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && std::isalnum(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    const std::string_view name = src_.substr(start, pos_ - start);
    skip_ws();
    const bool call = pos_ < src_.size() && src_[pos_] == '(';
    if (!call) {
      if (name == "t") return make({VariableNode{}});
      throw SyntaxError("unknown identifier '" + std::string(name) + "'", start);
    }
    for (const auto& f : kFunctions) {
      if (f.name == name) {
        const std::size_t open = pos_;
        ++pos_;
        ExprPtr arg = expr();
        if (!accept(')')) throw UnbalancedParens("missing ')' for call", open);
        return make({CallNode{f.fn, std::move(arg)}});
      }
    }
    throw UnknownFunction("unknown function '" + std::string(name) + "'", start);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

inline double eval_node(const ExprNode& n, double t) {
  return std::visit(
      [t](const auto& x) -> double {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, NumberNode>) {
          return x.value;
        } else if constexpr (std::is_same_v<T, VariableNode>) {
          return t;
        } else if constexpr (std::is_same_v<T, UnaryMinusNode>) {
          return -eval_node(*x.operand, t);
        } else if constexpr (std::is_same_v<T, BinaryNode>) {
          const double l = eval_node(*x.left, t);
          const double r = eval_node(*x.right, t);
          switch (x.op) {
            case BinaryOp::Add: return l + r;
            case BinaryOp::Sub: return l - r;
            case BinaryOp::Mul: return l * r;
            case BinaryOp::Div: return l / r;
            case BinaryOp::Pow: return std::pow(l, r);
          }
          return std::nan("");
        } else {
          return apply_function(x.fn, eval_node(*x.argument, t));
        }
      },
      n.node);
}

inline bool nodes_equal(const ExprPtr& a, const ExprPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->node.index() != b->node.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const auto& y = std::get<T>(b->node);
        if constexpr (std::is_same_v<T, NumberNode>) {
          return x.value == y.value;
        } else if constexpr (std::is_same_v<T, VariableNode>) {
          return true;
        } else if constexpr (std::is_same_v<T, UnaryMinusNode>) {
          return nodes_equal(x.operand, y.operand);
        } else if constexpr (std::is_same_v<T, BinaryNode>) {
          return x.op == y.op && nodes_equal(x.left, y.left) && nodes_equal(x.right, y.right);
        } else {
          return x.fn == y.fn && nodes_equal(x.argument, y.argument);
        }
      },
      a->node);
}

inline std::string format_number(double v) {
  // Shortest representation that round-trips.
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline void print_node(const ExprNode& n, std::string& out) {
  std::visit(
      [&out](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, NumberNode>) {
          if (x.value < 0) {
            out += "(" + format_number(x.value) + ")";
          } else {
            out += format_number(x.value);
          }
        } else if constexpr (std::is_same_v<T, VariableNode>) {
          out += "t";
        } else if constexpr (std::is_same_v<T, UnaryMinusNode>) {
          out += "(-";
          print_node(*x.operand, out);
          out += ")";
        } else if constexpr (std::is_same_v<T, BinaryNode>) {
          out += "(";
          print_node(*x.left, out);
          out += static_cast<char>(x.op);
          print_node(*x.right, out);
          out += ")";
        } else {
          out += function_name(x.fn);
          out += "(";
          print_node(*x.argument, out);
          out += ")";
        }
      },
      n.node);
}

inline ExprPtr substitute_node(const ExprPtr& n, const ExprPtr& replacement) {
  return std::visit(
      [&](const auto& x) -> ExprPtr {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, NumberNode>) {
          return n;
        } else if constexpr (std::is_same_v<T, VariableNode>) {
          return replacement;
        } else if constexpr (std::is_same_v<T, UnaryMinusNode>) {
          return std::make_shared<const ExprNode>(
              ExprNode{UnaryMinusNode{substitute_node(x.operand, replacement)}});
        } else if constexpr (std::is_same_v<T, BinaryNode>) {
          return std::make_shared<const ExprNode>(ExprNode{BinaryNode{
              x.op, substitute_node(x.left, replacement), substitute_node(x.right, replacement)}});
        } else {
          return std::make_shared<const ExprNode>(
              ExprNode{CallNode{x.fn, substitute_node(x.argument, replacement)}});
        }
      },
      n->node);
}

}  // namespace detail

inline ExprAst parse_expr(std::string_view text) { return detail::Parser(text).parse(); }

inline bool operator==(const ExprAst& a, const ExprAst& b) {
  return detail::nodes_equal(a.root(), b.root());
}

/// Fully parenthesized text that parses back to an equal tree.
inline std::string to_string(const ExprAst& ast) {
  std::string out;
  if (ast.root()) detail::print_node(*ast.root(), out);
  return out;
}

/// Replaces every occurrence of `t` with `replacement`.
inline ExprAst substitute(const ExprAst& ast, const ExprAst& replacement) {
  return ExprAst(detail::substitute_node(ast.root(), replacement.root()));
}

struct Interval {
  double lo;
  double hi;
};

/// A parsed scalar function f(t). Evaluation is pure.
class ScalarFn {
 public:
  static constexpr double kDerivativeStep = 1e-6;

  ScalarFn() = default;
  explicit ScalarFn(ExprAst ast, std::optional<Interval> domain = std::nullopt)
      : ast_(std::move(ast)), domain_(domain) {}

  static ScalarFn parse(std::string_view text) { return ScalarFn(parse_expr(text)); }
  static ScalarFn constant(double v) { return ScalarFn(ExprAst::number(v)); }

  const ExprAst& ast() const noexcept { return ast_; }
  const std::optional<Interval>& domain_hint() const noexcept { return domain_; }
  std::string text() const { return to_string(ast_); }

  /// IEEE evaluation; may return inf or NaN.
  double operator()(double t) const { return detail::eval_node(*ast_.root(), t); }

  double eval_finite(double t) const {
    const double v = (*this)(t);
    if (!std::isfinite(v)) {
      throw NonFiniteResult("f(" + detail::format_number(t) + ") = " + detail::format_number(v) +
                            " for f = " + text());
    }
    return v;
  }

  /// Central difference with h = 1e-6 (truncation error O(h^2)).
  double derivative(double t) const {
    const double h = kDerivativeStep;
    const double v = (eval_finite(t + h) - eval_finite(t - h)) / (2.0 * h);
    if (!std::isfinite(v)) throw NonFiniteResult("non-finite derivative");
    return v;
  }

  /// f(t + shift) as a new function.
  ScalarFn shifted(double shift) const {
    const ExprAst arg = ExprAst::binary(BinaryOp::Add, ExprAst::variable(), ExprAst::number(shift));
    return ScalarFn(substitute(ast_, arg));
  }

  ScalarFn scaled(double factor) const {
    return ScalarFn(ExprAst::binary(BinaryOp::Mul, ast_, ExprAst::number(factor)));
  }

 private:
  ExprAst ast_ = ExprAst::number(0.0);
  std::optional<Interval> domain_;
};

inline double eval_expr(const ScalarFn& f, double t) { return f.eval_finite(t); }
inline double numeric_derivative(const ScalarFn& f, double t) { return f.derivative(t); }

}  // namespace pnm
