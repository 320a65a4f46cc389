#include "transkit/constant.hpp"

#include <cmath>
#include <cstdio>
#include <functional>

#include "transkit/errors.hpp"

namespace transkit {

namespace {

std::size_t hash_mpz(const mpz_class& z) {
  std::size_t h = static_cast<std::size_t>(mpz_sgn(z.get_mpz_t()) + 7);
  std::size_t n = mpz_size(z.get_mpz_t());
  for (std::size_t i = 0; i < n; ++i)
    h = h * 1000003u ^ static_cast<std::size_t>(mpz_getlimbn(z.get_mpz_t(), i));
  return h;
}

// Exact r-th root of a nonnegative integer when it exists.
std::optional<mpz_class> exact_root(const mpz_class& z, unsigned long k) {
  mpz_class r;
  if (mpz_root(r.get_mpz_t(), z.get_mpz_t(), k) == 0) return std::nullopt;
  return r;
}

}  // namespace

Constant Constant::ratio(long p, long q) {
  if (q == 0) throw DivisionByZero("division by zero");
  return Constant(mpq_class(p, q));
}

bool Constant::is_zero() const {
  if (exact()) return std::get<mpq_class>(v_) == 0;
  return std::get<double>(v_) == 0.0;
}

bool Constant::is_one() const {
  if (exact()) return std::get<mpq_class>(v_) == 1;
  return std::get<double>(v_) == 1.0;
}

int Constant::sign() const {
  if (exact()) return sgn(std::get<mpq_class>(v_));
  double d = std::get<double>(v_);
  return (d > 0) - (d < 0);
}

mpq_class Constant::rational() const {
  if (exact()) return std::get<mpq_class>(v_);
  mpq_class q(std::get<double>(v_));
  q.canonicalize();
  return q;
}

double Constant::to_double() const {
  if (exact()) return std::get<mpq_class>(v_).get_d();
  return std::get<double>(v_);
}

bool Constant::is_integer() const {
  mpq_class q = rational();
  return q.get_den() == 1;
}

Constant Constant::operator-() const {
  if (exact()) return Constant(mpq_class(-std::get<mpq_class>(v_)));
  return real(-std::get<double>(v_));
}

Constant operator+(const Constant& a, const Constant& b) {
  if (a.exact() && b.exact())
    return Constant(mpq_class(std::get<mpq_class>(a.v_) + std::get<mpq_class>(b.v_)));
  return Constant::real(a.to_double() + b.to_double());
}

Constant operator-(const Constant& a, const Constant& b) { return a + (-b); }

Constant operator*(const Constant& a, const Constant& b) {
  if (a.exact() && b.exact())
    return Constant(mpq_class(std::get<mpq_class>(a.v_) * std::get<mpq_class>(b.v_)));
  return Constant::real(a.to_double() * b.to_double());
}

Constant operator/(const Constant& a, const Constant& b) {
  if (b.is_zero()) throw DivisionByZero("division by zero constant");
  if (a.exact() && b.exact())
    return Constant(mpq_class(std::get<mpq_class>(a.v_) / std::get<mpq_class>(b.v_)));
  return Constant::real(a.to_double() / b.to_double());
}

bool operator==(const Constant& a, const Constant& b) {
  if (a.exact() != b.exact()) return false;
  if (a.exact()) return std::get<mpq_class>(a.v_) == std::get<mpq_class>(b.v_);
  return std::get<double>(a.v_) == std::get<double>(b.v_);
}

bool operator<(const Constant& a, const Constant& b) {
  if (a.exact() && b.exact()) return std::get<mpq_class>(a.v_) < std::get<mpq_class>(b.v_);
  return a.to_double() < b.to_double();
}

std::optional<Constant> Constant::exp(const Constant& c) {
  if (!c.exact()) return real(std::exp(c.to_double()));
  if (c.is_zero()) return Constant(1);
  return std::nullopt;
}

std::optional<Constant> Constant::log(const Constant& c) {
  if (c.sign() <= 0) throw DomainError("logarithm of a non-positive constant " + c.str());
  if (!c.exact()) return real(std::log(c.to_double()));
  if (c.is_one()) return Constant(0);
  return std::nullopt;
}

std::optional<Constant> Constant::pow(const Constant& c, const mpq_class& r) {
  if (r == 0) return Constant(1);
  bool integral = r.get_den() == 1;
  if (c.is_zero()) {
    if (r < 0) throw DivisionByZero("zero raised to a negative power");
    return Constant(0);
  }
  if (!integral && c.sign() < 0)
    throw DomainError("fractional power of a negative constant " + c.str());
  if (!c.exact()) return real(std::pow(c.to_double(), r.get_d()));
  const mpq_class& q = std::get<mpq_class>(c.v_);
  mpz_class num = r.get_num(), den = r.get_den();
  if (!num.fits_slong_p() || !den.fits_ulong_p())
    throw ResourceError("exponent too large");
  long n = num.get_si();
  unsigned long d = den.get_ui();
  mpq_class base = q;
  if (d != 1) {
    mpz_class pn = q.get_num(), pd = q.get_den();
    auto rn = exact_root(pn, d);
    auto rd = exact_root(pd, d);
    if (!rn || !rd) return std::nullopt;
    base = mpq_class(*rn, *rd);
  }
  unsigned long e = static_cast<unsigned long>(n < 0 ? -n : n);
  if (e > 4096) throw ResourceError("exponent too large");
  mpz_class a, b;
  mpz_pow_ui(a.get_mpz_t(), base.get_num().get_mpz_t(), e);
  mpz_pow_ui(b.get_mpz_t(), base.get_den().get_mpz_t(), e);
  mpq_class out(a, b);
  out.canonicalize();
  if (n < 0) out = 1 / out;
  return Constant(out);
}

std::string rational_str(const mpq_class& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

std::string Constant::str() const {
  if (exact()) return rational_str(std::get<mpq_class>(v_));
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", std::get<double>(v_));
  std::string s(buf);
  // Keep floats visibly distinct from exact integers.
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::size_t Constant::hash() const {
  if (!exact()) return std::hash<double>()(std::get<double>(v_)) ^ 0x5bd1e995u;
  const mpq_class& q = std::get<mpq_class>(v_);
  return hash_mpz(q.get_num()) * 31u + hash_mpz(q.get_den());
}

}  // namespace transkit
