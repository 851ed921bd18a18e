#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "th/geometry.hpp"

namespace th {

enum class Op { Constant, Variable, Add, Sub, Mul, Div, IntPow, Sin, Cos, Exp };

/// Immutable expression tree over the coordinates x0, x1, ... of the ambient
/// space. Copies share structure, so passing by value is cheap and the tree
/// may be evaluated from many threads at once.
class Expression {
 public:
  struct Node;

  Expression();  // the constant 0

  static Expression constant(double value);
  static Expression variable(std::size_t index);
  static Expression binary(Op op, Expression lhs, Expression rhs);
  static Expression power(Expression base, unsigned exponent);
  static Expression unary(Op op, Expression arg);

  Op op() const;
  double value() const;        // Constant only
  std::size_t index() const;   // Variable only
  unsigned exponent() const;   // IntPow only
  Expression lhs() const;      // first operand (or sole operand of unary nodes)
  Expression rhs() const;      // second operand of binary nodes

  bool is_constant() const { return op() == Op::Constant; }
  bool is_constant(double v) const { return is_constant() && value() == v; }

  /// One past the largest variable index referenced, 0 for closed expressions.
  std::size_t variable_bound() const;

  std::size_t node_count() const;

  const Node* node() const { return node_.get(); }

 private:
  explicit Expression(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

Expression operator+(const Expression& a, const Expression& b);
Expression operator-(const Expression& a, const Expression& b);
Expression operator*(const Expression& a, const Expression& b);
Expression operator/(const Expression& a, const Expression& b);

/// Parses the text grammar: numeric literals, x0..x{dimension-1}, + - * /,
/// ^ with a nonnegative integer literal exponent, sin/cos/exp and
/// parentheses. Precedence is ^ > unary minus > * / > + -, with left
/// associativity among equal-precedence binaries. Throws ParseError.
Expression parse(std::string_view text, std::size_t dimension);

/// Throws Error(Domain) on division by zero.
double evaluate(const Expression& e, std::span<const double> point);
inline double evaluate(const Expression& e, const Point& p) {
  return evaluate(e, std::span<const double>(p.data(), p.size()));
}

/// Exact partial derivative with respect to x_var, already simplified.
Expression differentiate(const Expression& e, std::size_t var);

/// Constant folding and 0/1 identity elimination. Evaluation is unchanged
/// at every point where the input is defined.
Expression simplify(const Expression& e);

/// Canonical printer; its output parses back to an evaluation-equivalent tree.
std::string to_string(const Expression& e);

/// Polynomial degree in x_var, or nullopt when e is not polynomial in it.
/// Sums report the maximum over terms, so cancellation is not detected.
std::optional<int> degree_in(const Expression& e, std::size_t var);

}  // namespace th
