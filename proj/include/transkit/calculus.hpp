#pragma once

#include <memory>
#include <vector>

#include "transkit/series.hpp"

namespace transkit {

// Logarithm of a monomial as a finite series.
Series pre_log(const Monomial& m);
// Logarithmic derivative m'/m, a finite series (memoised).
Series dagger(const Monomial& m);
Series derive(const Series& s);
Series nth_derivative(const Series& s, std::size_t n);

Series log_series(const Series& s);
Series exp_series(const Series& s);
Series pow_series(const Series& s, const mpq_class& r);

// Right composition with a positive infinitely large series g. Images of
// monomials and of the logarithmic atoms are memoised per handle.
class CompositionHandle {
 public:
  explicit CompositionHandle(Series g);
  const Series& g() const;
  bool identity() const;
  // log_k(x) composed with g.
  Series atom(int k) const;
  Series monomial(const Monomial& m) const;
  // Dominant monomial of m composed with g.
  Monomial dominant(const Monomial& m) const;
  GridCertificate certificate(const GridCertificate& c) const;

 private:
  struct State;
  std::shared_ptr<State> st_;
};

Series compose(const Series& f, const CompositionHandle& h);
Series compose(const Series& f, const Series& g);

// k-th coefficient of the Taylor expansion of (f o g)(x + X), from f^{(n)}(g)
// for n <= k and g^{(v)} for 1 <= v <= k.
Series faa_di_bruno_coeff(const std::vector<Series>& f_derivs_at_g,
                          const std::vector<Series>& g_derivs, std::size_t k);

mpq_class factorial(std::size_t n);
mpq_class binomial(const mpq_class& r, std::size_t k);

}  // namespace transkit
