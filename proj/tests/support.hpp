#pragma once

// Shared helpers and independent oracles for the test suites.

#include <map>
#include <random>
#include <string>
#include <vector>

#include "transkit/calculus.hpp"
#include "transkit/errors.hpp"
#include "transkit/limits.hpp"
#include "transkit/powerseries.hpp"
#include "transkit/series.hpp"
#include "transkit/taylor.hpp"

namespace tk_test {

using namespace transkit;

inline Monomial xp(const mpq_class& r) { return Monomial::atom(0, r); }
inline Monomial lg(int k, const mpq_class& r = 1) { return Monomial::atom(k, r); }
inline Monomial ex(const Series& arg) { return Monomial::exp_of(arg.prefix(64)); }
inline Series S(const Monomial& m, const Constant& c = Constant(1)) { return Series::monomial(m, c); }
inline Series C(long p, long q = 1) { return Series(Constant::ratio(p, q)); }
inline Series X() { return Series::x(); }
inline mpq_class Q(long p, long q = 1) { return mpq_class(p, q); }

// Terms of a finite series, all of them.
inline std::vector<Term> all_terms(const Series& s) {
  return s.prefix(std::numeric_limits<std::size_t>::max());
}

// Equality on the first n terms of either side. A side whose stream cannot
// be advanced within the step budget defers to the other side's cutoff.
inline bool series_equal(const Series& a, const Series& b, std::size_t n, std::string* why = nullptr) {
  auto nth = [n](const Series& s, bool& exhausted, bool& stuck) -> std::optional<Monomial> {
    exhausted = stuck = false;
    try {
      auto ts = s.prefix(n);
      if (ts.size() < n) {
        exhausted = true;
        return ts.empty() ? std::nullopt : std::optional<Monomial>(ts.back().mono);
      }
      return ts.back().mono;
    } catch (const BudgetExceeded&) {
      stuck = true;
      return std::nullopt;
    }
  };
  bool ea, sa, eb, sb;
  auto ca = nth(a, ea, sa);
  auto cb = nth(b, eb, sb);
  auto fail = [why](const std::string& w) {
    if (why) *why = w;
    return false;
  };
  if (sa && sb) return fail("neither side resolves within budget");
  if (ea && eb) {
    Agreement ag = agree_to_terms(a, b, n + 1);
    if (!ag.equal) return fail(ag.detail);
    return true;
  }
  std::optional<Monomial> cut;
  if (ca && cb) {
    cut = prec(*ca, *cb) ? *cb : *ca;
  } else {
    cut = ca ? ca : cb;
  }
  if (!cut) {
    // One side is empty.
    const Series& other = ca ? a : b;
    try {
      if (other.term(0)) return fail("one side is zero");
    } catch (const BudgetExceeded&) {
    }
    return true;
  }
  Agreement ag = agree_above(a, b, *cut);
  if (!ag.equal) return fail(ag.detail.empty() ? "mismatch above " + cut->str() : ag.detail);
  return true;
}

// Independent Cauchy product oracle on explicit term lists.
inline std::vector<Term> brute_mul(const std::vector<Term>& a, const std::vector<Term>& b) {
  std::vector<Term> acc;
  for (const auto& s : a)
    for (const auto& t : b) {
      Monomial m = s.mono * t.mono;
      Constant c = s.coeff * t.coeff;
      bool found = false;
      for (auto& u : acc)
        if (u.mono == m) {
          u.coeff = u.coeff + c;
          found = true;
          break;
        }
      if (!found) acc.push_back({c, m});
    }
  std::vector<Term> out;
  for (auto& t : acc)
    if (!t.coeff.is_zero()) out.push_back(t);
  std::sort(out.begin(), out.end(), [](const Term& p, const Term& q) { return prec(q.mono, p.mono); });
  return out;
}

// Random grid-based series with positive coefficients.
class SeriesGen {
 public:
  explicit SeriesGen(std::uint64_t seed) : rng_(seed) {}

  std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }

  Constant coeff() { return Constant::ratio(1 + static_cast<long>(pick(5)), 1 + static_cast<long>(pick(3))); }

  Monomial any_monomial() {
    static const std::vector<Monomial> pool = {
        Monomial(), xp(1), xp(2), xp(-1), xp(Q(1, 2)), lg(1), xp(1) * lg(1), xp(-3),
        ex(X()), ex(X()) * xp(-1), xp(-2) * lg(1, -1), lg(2)};
    return pool[pick(pool.size())];
  }

  Monomial small_monomial() {
    static const std::vector<Monomial> pool = {
        xp(-1), xp(Q(-1, 2)), xp(-2), lg(1, -1), xp(-1) * lg(1), ex(-X()), xp(-1) * lg(1, -1)};
    return pool[pick(pool.size())];
  }

  Series finite() {
    std::size_t n = 1 + pick(4);
    Series s;
    for (std::size_t i = 0; i < n; ++i) s = s + S(any_monomial(), coeff());
    return s.is_zero() ? S(any_monomial(), coeff()) : s;
  }

  // c * m / (1 - u)
  Series geometric() {
    Monomial u = small_monomial();
    Series g = invert(C(1) - S(u));
    return scale(g, coeff(), any_monomial());
  }

  Series any() {
    switch (pick(4)) {
      case 0:
        return finite();
      case 1:
        return geometric();
      case 2:
        return finite() + geometric();
      default:
        return geometric() * finite();
    }
  }

  std::mt19937_64& rng() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

// Power series constructors used across suites.
inline PowerSeries ps_geometric() {
  return PowerSeries::from_monomial_law(
      MonomialLaw{[](std::size_t) { return Constant(1); }, [](std::size_t) { return Monomial(); }, 0},
      BiCertificate{{{Monomial(), 0}}, {{Monomial(), 1}}});
}

inline PowerSeries ps_exponential() {
  return PowerSeries::from_monomial_law(
      MonomialLaw{[](std::size_t k) { return Constant(mpq_class(1) / factorial(k)); },
                  [](std::size_t) { return Monomial(); }, 0},
      BiCertificate{{{Monomial(), 0}}, {{Monomial(), 1}}});
}

// sum_k c^k u^k X^k
inline PowerSeries ps_monomial_geometric(const Monomial& u) {
  return PowerSeries::from_monomial_law(
      MonomialLaw{[](std::size_t) { return Constant(1); },
                  [u](std::size_t k) { return u.pow(mpq_class(static_cast<long>(k))); }, 0},
      BiCertificate{{{Monomial(), 0}}, {{u, 1}}});
}

// sum_k x^(-2^k) X^k
inline PowerSeries ps_double_exponent() {
  return PowerSeries::from_monomial_law(
      MonomialLaw{[](std::size_t) { return Constant(1); },
                  [](std::size_t k) {
                    mpz_class e = 1;
                    e <<= static_cast<mp_bitcnt_t>(k);
                    return Monomial::x().pow(mpq_class(-e));
                  },
                  0},
      BiCertificate{{{Monomial::x().inverse(), 0}}, {{Monomial::x().inverse(), 0}, {Monomial(), 1}}});
}

}  // namespace tk_test
