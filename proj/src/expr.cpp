#include "transkit/expr.hpp"

#include <cctype>

#include "transkit/calculus.hpp"

namespace transkit {

ExprPtr Expr::constant(const mpq_class& q) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Const;
  e->value = q;
  e->value.canonicalize();
  return e;
}

ExprPtr Expr::var() {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Var;
  return e;
}

ExprPtr Expr::unary(Kind k, ExprPtr a) {
  auto e = std::make_shared<Expr>();
  e->kind = k;
  e->args = {std::move(a)};
  return e;
}

ExprPtr Expr::binary(Kind k, ExprPtr a, ExprPtr b) {
  auto e = std::make_shared<Expr>();
  e->kind = k;
  e->args = {std::move(a), std::move(b)};
  return e;
}

ExprPtr Expr::power(ExprPtr base, const mpq_class& r) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Pow;
  e->value = r;
  e->value.canonicalize();
  e->args = {std::move(base)};
  return e;
}

bool same_tree(const Expr& a, const Expr& b) {
  if (a.kind != b.kind || a.args.size() != b.args.size()) return false;
  if ((a.kind == Expr::Kind::Const || a.kind == Expr::Kind::Pow) && a.value != b.value) return false;
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (!same_tree(*a.args[i], *b.args[i])) return false;
  return true;
}

namespace {

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  ExprPtr run() {
    auto e = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw SyntaxError(pos_, msg); }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!eat(c)) fail(std::string("expected '") + c + "'");
  }

  static ExprPtr spanned(ExprPtr e, std::size_t b, std::size_t end) {
    auto m = std::const_pointer_cast<Expr>(e);
    m->begin = b;
    m->end = end;
    return m;
  }

  ExprPtr expr() {
    skip();
    std::size_t b = pos_;
    auto lhs = term();
    while (true) {
      if (eat('+')) {
        lhs = spanned(Expr::binary(Expr::Kind::Add, lhs, term()), b, pos_);
      } else if (eat('-')) {
        lhs = spanned(Expr::binary(Expr::Kind::Sub, lhs, term()), b, pos_);
      } else {
        return lhs;
      }
    }
  }

  ExprPtr term() {
    skip();
    std::size_t b = pos_;
    auto lhs = unary();
    while (true) {
      if (eat('*')) {
        lhs = spanned(Expr::binary(Expr::Kind::Mul, lhs, unary()), b, pos_);
      } else if (eat('/')) {
        auto rhs = unary();
        if (lhs->kind == Expr::Kind::Const && rhs->kind == Expr::Kind::Const && rhs->value != 0) {
          lhs = spanned(Expr::constant(lhs->value / rhs->value), b, pos_);
        } else {
          lhs = spanned(Expr::binary(Expr::Kind::Div, lhs, rhs), b, pos_);
        }
      } else {
        return lhs;
      }
    }
  }

  ExprPtr unary() {
    skip();
    std::size_t b = pos_;
    if (eat('-')) return spanned(Expr::unary(Expr::Kind::Neg, unary()), b, pos_);
    return power();
  }

  ExprPtr power() {
    skip();
    std::size_t b = pos_;
    auto base = primary();
    if (eat('^')) {
      mpq_class r = exponent();
      auto e = spanned(Expr::power(base, r), b, pos_);
      skip();
      if (pos_ < s_.size() && s_[pos_] == '^') fail("chained exponents need parentheses");
      return e;
    }
    return base;
  }

  // Integer or decimal literal at the current position.
  std::optional<mpq_class> number() {
    skip();
    std::size_t b = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    std::size_t int_end = pos_;
    std::size_t frac_len = 0;
    if (pos_ < s_.size() && s_[pos_] == '.' && int_end > b) {
      ++pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        ++pos_;
        ++frac_len;
      }
      if (frac_len == 0) fail("digits expected after '.'");
    }
    if (int_end == b) return std::nullopt;
    std::string digits = s_.substr(b, int_end - b);
    if (frac_len > 0) digits += s_.substr(int_end + 1, frac_len);
    mpz_class num(digits);
    mpz_class den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, frac_len);
    mpq_class q(num, den);
    q.canonicalize();
    return q;
  }

  mpq_class exponent() {
    skip();
    if (eat('(')) {
      bool neg = eat('-');
      auto p = number();
      if (!p) fail("rational exponent literal expected");
      mpq_class r = *p;
      if (eat('/')) {
        auto q = number();
        if (!q || *q == 0) fail("nonzero denominator expected");
        r /= *q;
      }
      expect(')');
      return neg ? mpq_class(-r) : r;
    }
    bool neg = eat('-');
    auto p = number();
    if (!p) fail("rational exponent literal expected");
    return neg ? mpq_class(-*p) : *p;
  }

  ExprPtr primary() {
    skip();
    std::size_t b = pos_;
    if (pos_ >= s_.size()) fail("unexpected end of input");
    if (auto n = number()) return spanned(Expr::constant(*n), b, pos_);
    if (eat('(')) {
      auto e = expr();
      expect(')');
      return e;
    }
    std::size_t e = pos_;
    while (e < s_.size() && std::isalpha(static_cast<unsigned char>(s_[e]))) ++e;
    std::string word = s_.substr(pos_, e - pos_);
    if (word == "x") {
      pos_ = e;
      return spanned(Expr::var(), b, pos_);
    }
    if (word == "log" || word == "exp") {
      pos_ = e;
      expect('(');
      auto arg = expr();
      expect(')');
      return spanned(Expr::unary(word == "log" ? Expr::Kind::Log : Expr::Kind::Exp, arg), b, pos_);
    }
    if (!word.empty()) fail("unknown identifier '" + word + "'");
    fail("unexpected '" + std::string(1, s_[pos_]) + "'");
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

int prec_of(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Add:
    case Expr::Kind::Sub:
      return 1;
    case Expr::Kind::Mul:
    case Expr::Kind::Div:
      return 2;
    case Expr::Kind::Neg:
      return 3;
    case Expr::Kind::Pow:
      return 4;
    case Expr::Kind::Const:
      return e.value.get_den() == 1 ? 5 : 2;
    default:
      return 5;
  }
}

std::string wrap(const Expr& e, int min_prec) {
  std::string s = to_text(e);
  return prec_of(e) < min_prec ? "(" + s + ")" : s;
}

}  // namespace

ExprPtr parse(const std::string& src) { return Parser(src).run(); }

std::string to_text(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Const:
      return e.value.get_str();
    case Expr::Kind::Var:
      return "x";
    case Expr::Kind::Neg:
      return "-" + wrap(*e.args[0], 3);
    case Expr::Kind::Add:
      return wrap(*e.args[0], 1) + " + " + wrap(*e.args[1], 2);
    case Expr::Kind::Sub:
      return wrap(*e.args[0], 1) + " - " + wrap(*e.args[1], 2);
    case Expr::Kind::Mul:
      return wrap(*e.args[0], 2) + "*" + wrap(*e.args[1], 3);
    case Expr::Kind::Div:
      return wrap(*e.args[0], 2) + "/" + wrap(*e.args[1], 3);
    case Expr::Kind::Pow: {
      const mpq_class& r = e.value;
      std::string ex = r.get_den() == 1 ? r.get_str() : "(" + r.get_str() + ")";
      return wrap(*e.args[0], 5) + "^" + ex;
    }
    case Expr::Kind::Log:
      return "log(" + to_text(*e.args[0]) + ")";
    case Expr::Kind::Exp:
      return "exp(" + to_text(*e.args[0]) + ")";
  }
  return "";
}

std::string to_tree(const Expr& e) {
  auto two = [&](const char* n) {
    return std::string(n) + "(" + to_tree(*e.args[0]) + ", " + to_tree(*e.args[1]) + ")";
  };
  switch (e.kind) {
    case Expr::Kind::Const:
      return e.value.get_str();
    case Expr::Kind::Var:
      return "x";
    case Expr::Kind::Neg:
      return "Neg(" + to_tree(*e.args[0]) + ")";
    case Expr::Kind::Add:
      return two("Add");
    case Expr::Kind::Sub:
      return two("Sub");
    case Expr::Kind::Mul:
      return two("Mul");
    case Expr::Kind::Div:
      return two("Div");
    case Expr::Kind::Pow:
      return "Pow(" + to_tree(*e.args[0]) + ", " + e.value.get_str() + ")";
    case Expr::Kind::Log:
      return "Log(" + to_tree(*e.args[0]) + ")";
    case Expr::Kind::Exp:
      return "Exp(" + to_tree(*e.args[0]) + ")";
  }
  return "";
}

namespace {

Series elab(const Expr& e, Backend b) {
  std::vector<Series> a;
  for (const auto& c : e.args) a.push_back(elab(*c, b));
  try {
    switch (e.kind) {
      case Expr::Kind::Const:
        return Series(b == Backend::Float ? Constant::real(e.value.get_d()) : Constant(e.value));
      case Expr::Kind::Var:
        return Series::x();
      case Expr::Kind::Neg:
        return -a[0];
      case Expr::Kind::Add:
        return a[0] + a[1];
      case Expr::Kind::Sub:
        return a[0] - a[1];
      case Expr::Kind::Mul:
        return a[0] * a[1];
      case Expr::Kind::Div:
        return a[0] / a[1];
      case Expr::Kind::Pow:
        return pow_series(a[0], e.value);
      case Expr::Kind::Log:
        return log_series(a[0]);
      case Expr::Kind::Exp:
        return exp_series(a[0]);
    }
  } catch (const ElaborationError&) {
    throw;
  } catch (const Error& err) {
    throw ElaborationError(e.begin, e.end, err.what());
  }
  return Series();
}

}  // namespace

Series elaborate(const Expr& e, Backend backend) { return elab(e, backend); }

}  // namespace transkit
