#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <optional>
#include <string>
#include <variant>

namespace transkit {

// A coefficient: an exact rational or a double. Mixed arithmetic promotes
// to double. exp, log and rational powers are partial on the exact side.
class Constant {
 public:
  Constant() : v_(mpq_class(0)) {}
  Constant(int n) : v_(mpq_class(n)) {}
  Constant(long n) : v_(mpq_class(n)) {}
  Constant(const mpq_class& q) : v_(q) { std::get<mpq_class>(v_).canonicalize(); }
  static Constant real(double d) { Constant c; c.v_ = d; return c; }
  static Constant ratio(long p, long q);

  bool exact() const { return std::holds_alternative<mpq_class>(v_); }
  bool is_zero() const;
  bool is_one() const;
  int sign() const;
  // Exact value; a double converts without rounding.
  mpq_class rational() const;
  double to_double() const;
  bool is_integer() const;

  Constant operator-() const;
  friend Constant operator+(const Constant& a, const Constant& b);
  friend Constant operator-(const Constant& a, const Constant& b);
  friend Constant operator*(const Constant& a, const Constant& b);
  friend Constant operator/(const Constant& a, const Constant& b);
  Constant& operator+=(const Constant& o) { return *this = *this + o; }
  Constant& operator*=(const Constant& o) { return *this = *this * o; }

  // Structural equality: 1/2 exact and 0.5 float are different values.
  friend bool operator==(const Constant& a, const Constant& b);
  friend bool operator!=(const Constant& a, const Constant& b) { return !(a == b); }
  // Numeric order.
  friend bool operator<(const Constant& a, const Constant& b);

  static std::optional<Constant> exp(const Constant& c);
  static std::optional<Constant> log(const Constant& c);
  static std::optional<Constant> pow(const Constant& c, const mpq_class& r);

  std::string str() const;
  std::size_t hash() const;

 private:
  std::variant<mpq_class, double> v_;
};

std::string rational_str(const mpq_class& q);

}  // namespace transkit
