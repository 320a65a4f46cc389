#pragma once

#include <gmpxx.h>

#include <memory>
#include <string>
#include <vector>

#include "transkit/errors.hpp"
#include "transkit/series.hpp"

namespace transkit {

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Kind { Const, Var, Neg, Add, Sub, Mul, Div, Pow, Log, Exp };
  Kind kind = Kind::Const;
  // Literal value for Const, exponent for Pow.
  mpq_class value;
  std::vector<ExprPtr> args;
  // Source span [begin, end).
  std::size_t begin = 0;
  std::size_t end = 0;

  static ExprPtr constant(const mpq_class& q);
  static ExprPtr var();
  static ExprPtr unary(Kind k, ExprPtr a);
  static ExprPtr binary(Kind k, ExprPtr a, ExprPtr b);
  static ExprPtr power(ExprPtr base, const mpq_class& r);
};

// Structural equality ignoring spans.
bool same_tree(const Expr& a, const Expr& b);

// Grammar, loosest first:  + -,  * /,  unary -,  ^ with a rational literal.
// Atoms are numbers, x, log(...), exp(...) and parenthesised expressions.
// A quotient of two literals folds to one literal.
ExprPtr parse(const std::string& src);

// Text that parses back to the same tree.
std::string to_text(const Expr& e);
// Debug form such as Div(1, Sub(1, Div(1, x))).
std::string to_tree(const Expr& e);

enum class Backend { Exact, Float };

// Kernel error annotated with the failing subexpression.
class ElaborationError : public InvalidInput {
 public:
  ElaborationError(std::size_t begin, std::size_t end, const std::string& msg)
      : InvalidInput("at offset " + std::to_string(begin) + "-" + std::to_string(end) + ": " + msg),
        begin_(begin), end_(end) {}
  std::size_t begin() const { return begin_; }
  std::size_t end() const { return end_; }

 private:
  std::size_t begin_;
  std::size_t end_;
};

Series elaborate(const Expr& e, Backend backend = Backend::Exact);

}  // namespace transkit
