#include "resolvlab/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <vector>

namespace resolvlab::expr {

namespace {

enum class Op {
  Literal, VarX, VarN,
  Add, Sub, Mul, Div, Pow, Neg,
  Sin, Cos, Exp, Abs, Min, Max, Indicator,
};

}  // namespace

struct Expression::Node {
  Op op = Op::Literal;
  double value = 0.0;
  std::shared_ptr<const Node> a;
  std::shared_ptr<const Node> b;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

NodePtr make_node(Op op, NodePtr a = nullptr, NodePtr b = nullptr, double value = 0.0) {
  auto n = std::make_shared<Expression::Node>();
  n->op = op;
  n->value = value;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  NodePtr run() {
    NodePtr root = parse_sum();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorKind::ParseError,
                "column " + std::to_string(pos_ + 1) + ": " + msg);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool consume(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  NodePtr parse_sum() {
    NodePtr lhs = parse_product();
    while (true) {
      if (consume('+')) lhs = make_node(Op::Add, lhs, parse_product());
      else if (consume('-')) lhs = make_node(Op::Sub, lhs, parse_product());
      else return lhs;
    }
  }

  NodePtr parse_product() {
    NodePtr lhs = parse_unary();
    while (true) {
      if (consume('*')) lhs = make_node(Op::Mul, lhs, parse_unary());
      else if (consume('/')) lhs = make_node(Op::Div, lhs, parse_unary());
      else return lhs;
    }
  }

  NodePtr parse_unary() {
    if (consume('-')) return make_node(Op::Neg, parse_unary());
    if (consume('+')) return parse_unary();
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_atom();
    if (consume('^')) return make_node(Op::Pow, base, parse_unary());   // right associative
    return base;
  }

  NodePtr parse_atom() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c))) return parse_identifier();
    if (c == '(') {
      ++pos_;
      NodePtr inner = parse_sum();
      if (!consume(')')) fail("expected ')'");
      return inner;
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  NodePtr parse_number() {
    const char* begin = text_.data() + pos_;
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) fail("malformed number");
    pos_ += static_cast<std::size_t>(end - begin);
    return make_node(Op::Literal, nullptr, nullptr, v);
  }

  NodePtr parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    const std::string name(text_.substr(start, pos_ - start));
    if (name == "x") return make_node(Op::VarX);
    if (name == "n") return make_node(Op::VarN);

    Op op;
    std::size_t arity;
    if (name == "sin") { op = Op::Sin; arity = 1; }
    else if (name == "cos") { op = Op::Cos; arity = 1; }
    else if (name == "exp") { op = Op::Exp; arity = 1; }
    else if (name == "abs") { op = Op::Abs; arity = 1; }
    else if (name == "min") { op = Op::Min; arity = 2; }
    else if (name == "max") { op = Op::Max; arity = 2; }
    else if (name == "indicator") { op = Op::Indicator; arity = 2; }
    else fail("unknown identifier '" + name + "'");

    if (!consume('(')) fail("expected '(' after '" + name + "'");
    std::vector<NodePtr> args;
    args.push_back(parse_sum());
    while (consume(',')) args.push_back(parse_sum());
    if (!consume(')')) fail("expected ')'");
    if (args.size() != arity)
      fail("'" + name + "' takes " + std::to_string(arity) + " argument(s)");
    return make_node(op, args[0], arity == 2 ? args[1] : nullptr);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

double eval_node(const Expression::Node& node, double x, double n) {
  switch (node.op) {
    case Op::Literal: return node.value;
    case Op::VarX: return x;
    case Op::VarN: return n;
    case Op::Add: return eval_node(*node.a, x, n) + eval_node(*node.b, x, n);
    case Op::Sub: return eval_node(*node.a, x, n) - eval_node(*node.b, x, n);
    case Op::Mul: return eval_node(*node.a, x, n) * eval_node(*node.b, x, n);
    case Op::Div: return eval_node(*node.a, x, n) / eval_node(*node.b, x, n);
    case Op::Pow: return std::pow(eval_node(*node.a, x, n), eval_node(*node.b, x, n));
    case Op::Neg: return -eval_node(*node.a, x, n);
    case Op::Sin: return std::sin(eval_node(*node.a, x, n));
    case Op::Cos: return std::cos(eval_node(*node.a, x, n));
    case Op::Exp: return std::exp(eval_node(*node.a, x, n));
    case Op::Abs: return std::abs(eval_node(*node.a, x, n));
    case Op::Min: return std::min(eval_node(*node.a, x, n), eval_node(*node.b, x, n));
    case Op::Max: return std::max(eval_node(*node.a, x, n), eval_node(*node.b, x, n));
    case Op::Indicator: {
      const double lo = eval_node(*node.a, x, n);
      const double hi = eval_node(*node.b, x, n);
      return (x >= lo && x < hi) ? 1.0 : 0.0;
    }
  }
  return 0.0;
}

}  // namespace

Expression Expression::parse(std::string_view text) {
  Parser parser(text);
  return Expression(parser.run(), std::string(text));
}

double Expression::eval(double x, double n) const { return eval_node(*root_, x, n); }

namespace {

bool node_uses_n(const Expression::Node& node) {
  if (node.op == Op::VarN) return true;
  if (node.a && node_uses_n(*node.a)) return true;
  if (node.b && node_uses_n(*node.b)) return true;
  return false;
}

}  // namespace

bool Expression::uses_n() const { return node_uses_n(*root_); }

}  // namespace resolvlab::expr
