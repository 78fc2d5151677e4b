#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "resolvlab/errors.hpp"

namespace resolvlab::expr {

/// Compiled arithmetic expression in the variables x (a point of the
/// interval) and n (the family index). Grammar: numeric literals; x, n;
/// binary + - * / ^ (^ binds right); unary minus; functions sin, cos, exp,
/// abs, min(a,b), max(a,b) and indicator(lo,hi), which is 1 when
/// lo <= x < hi and 0 otherwise.
class Expression {
 public:
  struct Node;

  static Expression parse(std::string_view text);

  double eval(double x, double n) const;
  bool uses_n() const;
  const std::string& text() const noexcept { return text_; }

 private:
  Expression(std::shared_ptr<const Node> root, std::string text)
      : root_(std::move(root)), text_(std::move(text)) {}

  std::shared_ptr<const Node> root_;
  std::string text_;
};

}  // namespace resolvlab::expr
