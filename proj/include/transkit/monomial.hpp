#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "transkit/constant.hpp"

namespace transkit {

struct Term;

// A log-exp monomial  prod_k log_k(x)^{r_k} * exp(L),  where log_0 = x and L is
// a finite purely large series. The identity is represented by an empty rep.
class Monomial {
 public:
  using LogPowers = std::vector<std::pair<int, mpq_class>>;

  Monomial() = default;
  static Monomial x();
  // log_k(x)^r; atom 0 is x itself.
  static Monomial atom(int k, const mpq_class& r = 1);
  // exp of a finite list of purely large terms, canonicalised so that terms
  // c*log_j(x) with j >= 1 become power factors.
  static Monomial exp_of(const std::vector<Term>& arg);

  bool is_one() const { return !rep_; }
  bool pure_log() const;
  const LogPowers& log_powers() const;
  const std::vector<Term>& exp_arg() const;
  int height() const;
  int log_depth() const;
  std::size_t hash() const;

  Monomial operator*(const Monomial& o) const;
  Monomial operator/(const Monomial& o) const { return *this * o.inverse(); }
  Monomial inverse() const { return pow(mpq_class(-1)); }
  Monomial pow(const mpq_class& q) const;

  std::string str() const;

  friend bool operator==(const Monomial& a, const Monomial& b);
  friend bool operator!=(const Monomial& a, const Monomial& b) { return !(a == b); }

  struct Rep;

 private:
  explicit Monomial(std::shared_ptr<const Rep> r) : rep_(std::move(r)) {}
  static Monomial make(LogPowers logs, std::vector<Term> ex, bool check_bounds);
  friend int mono_cmp(const Monomial&, const Monomial&);
  std::shared_ptr<const Rep> rep_;
};

struct Term {
  Constant coeff;
  Monomial mono;
  friend bool operator==(const Term& a, const Term& b) {
    return a.coeff == b.coeff && a.mono == b.mono;
  }
};

// Sign of (a relative to b) in the asymptotic order: 1 when a is larger.
int mono_cmp(const Monomial& a, const Monomial& b);
inline bool prec(const Monomial& a, const Monomial& b) { return mono_cmp(a, b) < 0; }
inline bool preceq(const Monomial& a, const Monomial& b) { return mono_cmp(a, b) <= 0; }
inline Monomial mono_max(const Monomial& a, const Monomial& b) { return prec(a, b) ? b : a; }
inline Monomial mono_mul(const Monomial& a, const Monomial& b) { return a * b; }
inline Monomial mono_pow(const Monomial& a, const mpq_class& q) { return a.pow(q); }

struct HeightDepth {
  int height;
  int log_depth;
};
HeightDepth height_depth(const Monomial& m);

// Terms of the logarithm of a monomial: sum_k r_k log_{k+1}(x) + L.
std::vector<Term> pre_log_terms(const Monomial& m);

std::string atom_name(int k);
std::string exponent_suffix(const mpq_class& r);
// Renders terms already sorted in decreasing order.
std::string format_terms(const std::vector<Term>& ts);
std::string format_term(const Term& t);

struct MonomialHash {
  std::size_t operator()(const Monomial& m) const { return m.hash(); }
};

}  // namespace transkit
