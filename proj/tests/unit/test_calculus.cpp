#include <gtest/gtest.h>

#include "support.hpp"

using namespace tk_test;

namespace {
Series geo() { return invert(C(1) - S(xp(-1))); }
}  // namespace

TEST(Calculus, Dagger) {
  EXPECT_EQ(render(dagger(ex(X())), 4), "1");
  EXPECT_EQ(render(dagger(xp(1)), 4), "x^-1");
  EXPECT_EQ(render(dagger(lg(1)), 4), "x^-1*log(x)^-1");
  EXPECT_TRUE(dagger(Monomial()).is_zero());
  // Logarithmic derivative of a product is the sum.
  Monomial a = xp(2) * lg(1, -1) * ex(X() * X());
  Monomial b = lg(2, Q(1, 2)) * ex(-X());
  EXPECT_TRUE(series_equal(dagger(a * b), dagger(a) + dagger(b), 8));
}

TEST(Calculus, Derive) {
  EXPECT_EQ(render(derive(X() * X() + X()), 8), "2*x + 1");
  EXPECT_EQ(render(derive(S(ex(X() * X()))), 8), "2*x*exp(x^2)");
  auto ts = derive(geo()).prefix(6);
  ASSERT_EQ(ts.size(), 6u);
  for (std::size_t k = 0; k < 6; ++k) {
    EXPECT_EQ(ts[k].mono, xp(-static_cast<long>(k) - 2));
    EXPECT_EQ(ts[k].coeff, Constant(-static_cast<long>(k) - 1));
  }
}

TEST(Calculus, DeriveOracleOnLogPowers) {
  // (x^a log(x)^b)' = a x^(a-1) log^b + b x^(a-1) log^(b-1)
  for (long a = -2; a <= 2; ++a)
    for (long b = -2; b <= 2; ++b) {
      Series got = derive(S(xp(a) * lg(1, b)));
      Series expect = scale(S(xp(a - 1) * lg(1, b)), Constant(a)) +
                      scale(S(xp(a - 1) * lg(1, b - 1)), Constant(b));
      EXPECT_TRUE(series_equal(got, expect, 4)) << a << " " << b;
    }
}

TEST(Calculus, LogSeries) {
  EXPECT_EQ(render(log_series(X()), 4), "log(x)");
  // 2 log x + sum (-1)^(k-1)/k x^-k
  Series l = log_series(X() * X() * (C(1) + S(xp(-1))));
  auto ts = l.prefix(8);
  ASSERT_EQ(ts.size(), 8u);
  EXPECT_EQ(format_term(ts[0]), "2*log(x)");
  for (std::size_t k = 1; k < 8; ++k) {
    EXPECT_EQ(ts[k].mono, xp(-static_cast<long>(k)));
    EXPECT_EQ(ts[k].coeff, Constant::ratio(k % 2 ? 1 : -1, static_cast<long>(k)));
  }
  EXPECT_EQ(render(log_series(S(ex(X())) * (C(1) + S(xp(-1)))), 3), "x + x^-1 - 1/2*x^-2 + O(x^-3)");
  EXPECT_THROW(log_series(C(2)), PartialConstant);
  EXPECT_THROW(log_series(-X()), DomainError);
}

TEST(Calculus, ExpSeries) {
  EXPECT_EQ(render(exp_series(X()), 4), "exp(x)");
  auto ts = exp_series(S(xp(-1))).prefix(8);
  for (std::size_t k = 0; k < 8; ++k) EXPECT_EQ(ts[k].coeff, Constant(mpq_class(1) / factorial(k)));
  EXPECT_EQ(render(exp_series(X() * X() + S(xp(-1))), 3),
            "exp(x^2) + x^-1*exp(x^2) + 1/2*x^-2*exp(x^2) + O(x^-3*exp(x^2))");
  EXPECT_THROW(exp_series(C(1)), PartialConstant);
}

TEST(Calculus, ExpLogInverse) {
  // Corpus where every comparison cutoff sits above any cancelling run.
  std::vector<Series> corpus = {
      C(1) + S(xp(-1)),
      X() * X() * (C(1) + S(xp(-1))),
      S(ex(X())) * (C(1) + S(xp(-1)) + S(xp(-2))),
      X() * S(lg(1)) + C(3),
      C(1) + S(ex(-X())),
      invert(C(1) - S(xp(-1))),
      S(xp(Q(1, 2))) * invert(C(1) - S(lg(1, -1)))};
  for (const auto& t : corpus) {
    std::string why;
    EXPECT_TRUE(series_equal(exp_series(log_series(t)), t, 6, &why)) << render(t, 4) << ": " << why;
  }
  EXPECT_EQ(render(log_series(exp_series(X())), 4), "x");
}

TEST(Calculus, ExactCancellationExhaustsBudget) {
  // exp(log t) must cancel infinitely many x^-k before reaching log(x)*exp(-x).
  Series t = S(xp(-2) * lg(1)) + S(xp(-3)) + S(xp(-2) * lg(1) * ex(-X()));
  Series e = exp_series(log_series(t));
  EXPECT_EQ(format_terms(e.prefix(2)), format_terms(t.prefix(2)));
  Limits l = limits();
  l.step_budget = 20000;
  LimitsScope scope(l);
  EXPECT_THROW(e.prefix(3), BudgetExceeded);
}

TEST(Calculus, Compose) {
  EXPECT_EQ(render(compose(S(lg(1)), S(ex(X()))), 4), "x");
  EXPECT_EQ(render(compose(S(xp(-1)), X() * X()), 4), "x^-2");
  Agreement a = agree_above(compose(geo(), X() + C(1)), C(1) + S(xp(-1)), xp(-8));
  EXPECT_TRUE(a.equal) << a.detail;
  EXPECT_THROW(compose(X(), S(xp(-1))), PreconditionError);
}

TEST(Calculus, ComposeBinomialOracle) {
  // (x+1)^(-2) = sum_k (-1)^k (k+1) x^(-k-2)
  auto ts = compose(S(xp(-2)), X() + C(1)).prefix(8);
  ASSERT_EQ(ts.size(), 8u);
  for (long k = 0; k < 8; ++k) {
    EXPECT_EQ(ts[k].mono, xp(-k - 2));
    EXPECT_EQ(ts[k].coeff, Constant((k % 2 ? -1 : 1) * (k + 1)));
  }
}

TEST(Calculus, ChainRule) {
  SeriesGen gen(9);
  std::vector<Series> gs = {X() * X(), X() + S(lg(1)), S(ex(X())), X() + S(xp(-1))};
  for (int i = 0; i < 12; ++i) {
    Series f = gen.any();
    const Series& g = gs[i % gs.size()];
    Series lhs = derive(compose(f, g));
    Series rhs = compose(derive(f), g) * derive(g);
    std::string why;
    EXPECT_TRUE(series_equal(lhs, rhs, 6, &why)) << render(f, 4) << " o " << render(g, 4) << ": " << why;
  }
}

TEST(Calculus, FaaDiBruno) {
  Series f = X() * X();
  Series g = X() + S(xp(-1));
  std::vector<Series> fd, gd;
  for (std::size_t n = 0; n <= 2; ++n) {
    fd.push_back(compose(nth_derivative(f, n), g));
    gd.push_back(nth_derivative(g, n));
  }
  EXPECT_TRUE(series_equal(faa_di_bruno_coeff(fd, gd, 0), compose(f, g), 6));
  EXPECT_TRUE(series_equal(faa_di_bruno_coeff(fd, gd, 1), fd[1] * gd[1], 6));
  Series second = scale(derive(derive(compose(f, g))), Constant::ratio(1, 2));
  EXPECT_TRUE(series_equal(faa_di_bruno_coeff(fd, gd, 2), second, 6));
  Limits l = limits();
  l.faa_di_bruno_order = 1;
  LimitsScope scope(l);
  EXPECT_THROW(faa_di_bruno_coeff(fd, gd, 2), ResourceError);
}

TEST(Calculus, PowSeries) {
  // (x+1)^(1/2) = x^(1/2) (1 + 1/2 x^-1 - 1/8 x^-2 + 1/16 x^-3 ...)
  auto ts = pow_series(X() + C(1), Q(1, 2)).prefix(5);
  mpq_class c = 1;
  for (long k = 0; k < 5; ++k) {
    EXPECT_EQ(ts[k].mono, xp(Q(1, 2) - k));
    EXPECT_EQ(ts[k].coeff, Constant(c));
    c = c * (mpq_class(1, 2) - k) / (k + 1);
  }
}
