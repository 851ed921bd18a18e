#include "th/expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <string>

#include "th/error.hpp"

namespace th {

struct Expression::Node {
  Op op = Op::Constant;
  double value = 0.0;
  std::size_t index = 0;
  unsigned exponent = 0;
  std::shared_ptr<const Node> a;
  std::shared_ptr<const Node> b;
};

namespace {

bool is_binary(Op op) {
  return op == Op::Add || op == Op::Sub || op == Op::Mul || op == Op::Div;
}

}  // namespace

Expression::Expression() : Expression(constant(0.0)) {}

Expression Expression::constant(double value) {
  auto n = std::make_shared<Node>();
  n->op = Op::Constant;
  n->value = value;
  return Expression(std::move(n));
}

Expression Expression::variable(std::size_t index) {
  auto n = std::make_shared<Node>();
  n->op = Op::Variable;
  n->index = index;
  return Expression(std::move(n));
}

Expression Expression::binary(Op op, Expression lhs, Expression rhs) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->a = std::move(lhs.node_);
  n->b = std::move(rhs.node_);
  return Expression(std::move(n));
}

Expression Expression::power(Expression base, unsigned exponent) {
  auto n = std::make_shared<Node>();
  n->op = Op::IntPow;
  n->exponent = exponent;
  n->a = std::move(base.node_);
  return Expression(std::move(n));
}

Expression Expression::unary(Op op, Expression arg) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->a = std::move(arg.node_);
  return Expression(std::move(n));
}

Op Expression::op() const { return node_->op; }
double Expression::value() const { return node_->value; }
std::size_t Expression::index() const { return node_->index; }
unsigned Expression::exponent() const { return node_->exponent; }
Expression Expression::lhs() const { return Expression(node_->a); }
Expression Expression::rhs() const { return Expression(node_->b); }

std::size_t Expression::variable_bound() const {
  switch (op()) {
    case Op::Constant:
      return 0;
    case Op::Variable:
      return index() + 1;
    default:
      break;
  }
  std::size_t bound = lhs().variable_bound();
  if (is_binary(op())) bound = std::max(bound, rhs().variable_bound());
  return bound;
}

std::size_t Expression::node_count() const {
  switch (op()) {
    case Op::Constant:
    case Op::Variable:
      return 1;
    default:
      break;
  }
  std::size_t n = 1 + lhs().node_count();
  if (is_binary(op())) n += rhs().node_count();
  return n;
}

Expression operator+(const Expression& a, const Expression& b) {
  return Expression::binary(Op::Add, a, b);
}
Expression operator-(const Expression& a, const Expression& b) {
  return Expression::binary(Op::Sub, a, b);
}
Expression operator*(const Expression& a, const Expression& b) {
  return Expression::binary(Op::Mul, a, b);
}
Expression operator/(const Expression& a, const Expression& b) {
  return Expression::binary(Op::Div, a, b);
}

// ---------------------------------------------------------------------------
// Parser

namespace {

class Parser {
 public:
  Parser(std::string_view text, std::size_t dimension)
      : text_(text), dimension_(dimension) {}

  Expression parse_all() {
    Expression e = parse_sum();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& message) const { throw ParseError(pos_, message); }
  [[noreturn]] void fail_at(std::size_t at, const std::string& message) const {
    throw ParseError(at, message);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      if (pos_ >= text_.size()) fail(std::string("expected '") + c + "' before end of input");
      fail(std::string("expected '") + c + "'");
    }
  }

  Expression parse_sum() {
    Expression e = parse_product();
    for (;;) {
      if (accept('+')) {
        e = e + parse_product();
      } else if (accept('-')) {
        e = e - parse_product();
      } else {
        return e;
      }
    }
  }

  Expression parse_product() {
    Expression e = parse_unary();
    for (;;) {
      if (accept('*')) {
        e = e * parse_unary();
      } else if (accept('/')) {
        e = e / parse_unary();
      } else {
        return e;
      }
    }
  }

  Expression parse_unary() {
    if (accept('-')) {
      Expression arg = parse_unary();
      if (arg.is_constant()) return Expression::constant(-arg.value());
      return Expression::constant(-1.0) * arg;
    }
    if (accept('+')) return parse_unary();
    return parse_power();
  }

  Expression parse_power() {
    Expression base = parse_primary();
    while (accept('^')) {
      skip_ws();
      const std::size_t at = pos_;
      if (at < text_.size() && text_[at] == '-') fail("negative exponent");
      if (at >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[at])))
        fail("exponent must be a nonnegative integer literal");
      std::size_t end = at;
      while (end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[end]))) ++end;
      if (end < text_.size() && (text_[end] == '.' || text_[end] == 'e' || text_[end] == 'E'))
        fail_at(at, "non-integer exponent");
      unsigned k = 0;
      auto [ptr, ec] = std::from_chars(text_.data() + at, text_.data() + end, k);
      if (ec != std::errc() || ptr != text_.data() + end) fail_at(at, "exponent out of range");
      pos_ = end;
      base = Expression::power(base, k);
    }
    return base;
  }

  Expression parse_primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expression e = parse_sum();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c))) return parse_identifier();
    fail("unexpected '" + std::string(1, c) + "'");
  }

  Expression parse_number() {
    const std::size_t at = pos_;
    std::size_t end = pos_;
    auto digits = [&] {
      while (end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[end]))) ++end;
    };
    digits();
    if (end < text_.size() && text_[end] == '.') {
      ++end;
      digits();
    }
    if (end < text_.size() && (text_[end] == 'e' || text_[end] == 'E')) {
      std::size_t exp_end = end + 1;
      if (exp_end < text_.size() && (text_[exp_end] == '+' || text_[exp_end] == '-')) ++exp_end;
      if (exp_end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[exp_end]))) {
        end = exp_end;
        digits();
      }
    }
    const std::string literal(text_.substr(at, end - at));
    char* stop = nullptr;
    const double value = std::strtod(literal.c_str(), &stop);
    if (literal.empty() || stop != literal.c_str() + literal.size()) fail_at(at, "malformed number");
    pos_ = end;
    return Expression::constant(value);
  }

  Expression parse_identifier() {
    const std::size_t at = pos_;
    std::size_t end = pos_;
    while (end < text_.size() && std::isalnum(static_cast<unsigned char>(text_[end]))) ++end;
    const std::string_view word = text_.substr(at, end - at);
    pos_ = end;
    if (word == "sin" || word == "cos" || word == "exp") {
      expect('(');
      Expression arg = parse_sum();
      expect(')');
      const Op op = word == "sin" ? Op::Sin : word == "cos" ? Op::Cos : Op::Exp;
      return Expression::unary(op, arg);
    }
    if (word.size() >= 2 && word[0] == 'x' &&
        std::all_of(word.begin() + 1, word.end(),
                    [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); })) {
      std::size_t index = 0;
      auto [ptr, ec] = std::from_chars(word.data() + 1, word.data() + word.size(), index);
      if (ec != std::errc() || index >= dimension_)
        fail_at(at, "variable " + std::string(word) + " out of range for dimension " +
                        std::to_string(dimension_));
      return Expression::variable(index);
    }
    fail_at(at, "unknown identifier '" + std::string(word) + "'");
  }

  std::string_view text_;
  std::size_t dimension_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression parse(std::string_view text, std::size_t dimension) {
  return Parser(text, dimension).parse_all();
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

double ipow(double base, unsigned k) {
  double result = 1.0;
  while (k != 0) {
    if (k & 1U) result *= base;
    base *= base;
    k >>= 1U;
  }
  return result;
}

double eval_node(const Expression::Node* n, std::span<const double> p) {
  switch (n->op) {
    case Op::Constant:
      return n->value;
    case Op::Variable:
      if (n->index >= p.size())
        throw Error(ErrorKind::Domain, "variable x" + std::to_string(n->index) +
                                           " not bound by a point of dimension " +
                                           std::to_string(p.size()));
      return p[n->index];
    case Op::Add:
      return eval_node(n->a.get(), p) + eval_node(n->b.get(), p);
    case Op::Sub:
      return eval_node(n->a.get(), p) - eval_node(n->b.get(), p);
    case Op::Mul:
      return eval_node(n->a.get(), p) * eval_node(n->b.get(), p);
    case Op::Div: {
      const double den = eval_node(n->b.get(), p);
      if (den == 0.0) throw Error(ErrorKind::Domain, "division by zero");
      return eval_node(n->a.get(), p) / den;
    }
    case Op::IntPow:
      return ipow(eval_node(n->a.get(), p), n->exponent);
    case Op::Sin:
      return std::sin(eval_node(n->a.get(), p));
    case Op::Cos:
      return std::cos(eval_node(n->a.get(), p));
    case Op::Exp:
      return std::exp(eval_node(n->a.get(), p));
  }
  return 0.0;
}

}  // namespace

double evaluate(const Expression& e, std::span<const double> point) {
  return eval_node(e.node(), point);
}

// ---------------------------------------------------------------------------
// Simplification

namespace {

Expression fold_constant(Op op, const Expression& a, const Expression& b) {
  const double x = a.value();
  switch (op) {
    case Op::Add:
      return Expression::constant(x + b.value());
    case Op::Sub:
      return Expression::constant(x - b.value());
    case Op::Mul:
      return Expression::constant(x * b.value());
    case Op::Div:
      return Expression::constant(x / b.value());
    default:
      return Expression::binary(op, a, b);
  }
}

Expression simplify_binary(Op op, const Expression& a, const Expression& b) {
  if (a.is_constant() && b.is_constant() && !(op == Op::Div && b.value() == 0.0))
    return fold_constant(op, a, b);
  switch (op) {
    case Op::Add:
      if (a.is_constant(0.0)) return b;
      if (b.is_constant(0.0)) return a;
      // a + (-c)*y  ->  a - c*y
      if (b.op() == Op::Mul && b.lhs().is_constant() && b.lhs().value() < 0.0) {
        const double c = -b.lhs().value();
        return simplify_binary(Op::Sub, a, simplify_binary(Op::Mul, Expression::constant(c), b.rhs()));
      }
      return a + b;
    case Op::Sub:
      if (b.is_constant(0.0)) return a;
      if (a.is_constant(0.0)) return simplify_binary(Op::Mul, Expression::constant(-1.0), b);
      return a - b;
    case Op::Mul:
      if (a.is_constant(0.0) || b.is_constant(0.0)) return Expression::constant(0.0);
      if (a.is_constant(1.0)) return b;
      if (b.is_constant(1.0)) return a;
      if (b.is_constant()) return simplify_binary(Op::Mul, b, a);
      if (a.is_constant() && b.op() == Op::Mul && b.lhs().is_constant())
        return simplify_binary(Op::Mul, Expression::constant(a.value() * b.lhs().value()), b.rhs());
      return a * b;
    case Op::Div:
      if (a.is_constant(0.0) && !b.is_constant()) return Expression::constant(0.0);
      if (b.is_constant(1.0)) return a;
      return a / b;
    default:
      return Expression::binary(op, a, b);
  }
}

Expression simplify_power(const Expression& base, unsigned k) {
  if (k == 0) return Expression::constant(1.0);
  if (k == 1) return base;
  if (base.is_constant()) return Expression::constant(ipow(base.value(), k));
  if (base.op() == Op::IntPow) return simplify_power(base.lhs(), base.exponent() * k);
  return Expression::power(base, k);
}

}  // namespace

Expression simplify(const Expression& e) {
  switch (e.op()) {
    case Op::Constant:
    case Op::Variable:
      return e;
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div:
      return simplify_binary(e.op(), simplify(e.lhs()), simplify(e.rhs()));
    case Op::IntPow:
      return simplify_power(simplify(e.lhs()), e.exponent());
    case Op::Sin:
    case Op::Cos:
    case Op::Exp: {
      Expression arg = simplify(e.lhs());
      if (arg.is_constant()) {
        const double x = arg.value();
        return Expression::constant(e.op() == Op::Sin   ? std::sin(x)
                                    : e.op() == Op::Cos ? std::cos(x)
                                                        : std::exp(x));
      }
      return Expression::unary(e.op(), arg);
    }
  }
  return e;
}

// ---------------------------------------------------------------------------
// Differentiation

namespace {

Expression derive(const Expression& e, std::size_t var) {
  using E = Expression;
  switch (e.op()) {
    case Op::Constant:
      return E::constant(0.0);
    case Op::Variable:
      return E::constant(e.index() == var ? 1.0 : 0.0);
    case Op::Add:
      return derive(e.lhs(), var) + derive(e.rhs(), var);
    case Op::Sub:
      return derive(e.lhs(), var) - derive(e.rhs(), var);
    case Op::Mul:
      return derive(e.lhs(), var) * e.rhs() + e.lhs() * derive(e.rhs(), var);
    case Op::Div:
      return (derive(e.lhs(), var) * e.rhs() - e.lhs() * derive(e.rhs(), var)) /
             E::power(e.rhs(), 2);
    case Op::IntPow: {
      const unsigned k = e.exponent();
      if (k == 0) return E::constant(0.0);
      return E::constant(static_cast<double>(k)) * E::power(e.lhs(), k - 1) *
             derive(e.lhs(), var);
    }
    case Op::Sin:
      return E::unary(Op::Cos, e.lhs()) * derive(e.lhs(), var);
    case Op::Cos:
      return E::constant(-1.0) * (E::unary(Op::Sin, e.lhs()) * derive(e.lhs(), var));
    case Op::Exp:
      return e * derive(e.lhs(), var);
  }
  return E::constant(0.0);
}

}  // namespace

Expression differentiate(const Expression& e, std::size_t var) {
  return simplify(derive(simplify(e), var));
}

// ---------------------------------------------------------------------------
// Printing

namespace {

constexpr int kPrecSum = 1;
constexpr int kPrecProduct = 2;
constexpr int kPrecAtom = 5;

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  // Prefer the shortest representation that round-trips.
  for (int digits = 1; digits <= 17; ++digits) {
    char shorter[40];
    std::snprintf(shorter, sizeof shorter, "%.*g", digits, v);
    if (std::strtod(shorter, nullptr) == v) return shorter;
  }
  return buf;
}

int precedence(const Expression& e) {
  switch (e.op()) {
    case Op::Add:
    case Op::Sub:
      return kPrecSum;
    case Op::Mul:
    case Op::Div:
      return kPrecProduct;
    case Op::IntPow:
      return 4;
    default:
      return kPrecAtom;
  }
}

void print(const Expression& e, int min_prec, std::string& out);

void print_child(const Expression& e, int min_prec, std::string& out) {
  if (precedence(e) < min_prec) {
    out += '(';
    print(e, 0, out);
    out += ')';
  } else {
    print(e, min_prec, out);
  }
}

void print(const Expression& e, int /*min_prec*/, std::string& out) {
  switch (e.op()) {
    case Op::Constant:
      if (e.value() < 0.0 || std::signbit(e.value())) {
        out += "(-" + format_number(-e.value()) + ")";
      } else {
        out += format_number(e.value());
      }
      return;
    case Op::Variable:
      out += "x" + std::to_string(e.index());
      return;
    case Op::Add:
    case Op::Sub:
      print_child(e.lhs(), kPrecSum, out);
      out += e.op() == Op::Add ? " + " : " - ";
      print_child(e.rhs(), kPrecProduct, out);
      return;
    case Op::Mul:
    case Op::Div:
      print_child(e.lhs(), kPrecProduct, out);
      out += e.op() == Op::Mul ? " * " : " / ";
      print_child(e.rhs(), kPrecProduct + 1, out);
      return;
    case Op::IntPow:
      print_child(e.lhs(), kPrecAtom, out);
      out += "^" + std::to_string(e.exponent());
      return;
    case Op::Sin:
    case Op::Cos:
    case Op::Exp:
      out += e.op() == Op::Sin ? "sin(" : e.op() == Op::Cos ? "cos(" : "exp(";
      print(e.lhs(), 0, out);
      out += ')';
      return;
  }
}

}  // namespace

std::string to_string(const Expression& e) {
  std::string out;
  print(e, 0, out);
  return out;
}

// ---------------------------------------------------------------------------

std::optional<int> degree_in(const Expression& e, std::size_t var) {
  switch (e.op()) {
    case Op::Constant:
      return 0;
    case Op::Variable:
      return e.index() == var ? 1 : 0;
    case Op::Add:
    case Op::Sub: {
      auto a = degree_in(e.lhs(), var);
      auto b = degree_in(e.rhs(), var);
      if (!a || !b) return std::nullopt;
      return std::max(*a, *b);
    }
    case Op::Mul: {
      auto a = degree_in(e.lhs(), var);
      auto b = degree_in(e.rhs(), var);
      if (!a || !b) return std::nullopt;
      return *a + *b;
    }
    case Op::Div: {
      auto den = degree_in(e.rhs(), var);
      if (!den || *den != 0) return std::nullopt;
      return degree_in(e.lhs(), var);
    }
    case Op::IntPow: {
      auto a = degree_in(e.lhs(), var);
      if (!a) return std::nullopt;
      return *a * static_cast<int>(e.exponent());
    }
    case Op::Sin:
    case Op::Cos:
    case Op::Exp: {
      auto a = degree_in(e.lhs(), var);
      if (!a || *a != 0) return std::nullopt;
      return 0;
    }
  }
  return std::nullopt;
}

}  // namespace th
