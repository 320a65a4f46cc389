#include <gtest/gtest.h>

#include "support.hpp"

using namespace tk_test;

namespace {

Series geo() { return invert(C(1) - S(xp(-1))); }
LocusSpec ident(const Series& d) { return {OperatorHandle::identity(), d}; }
LocusSpec comp(const Series& g, const Series& d) { return {OperatorHandle::right_compose(g), d}; }

}  // namespace

TEST(Taylor, Flatness) {
  EXPECT_TRUE(is_flat(xp(2)));
  EXPECT_TRUE(is_flat(lg(1)));
  EXPECT_TRUE(is_flat(xp(-3) * lg(2)));
  EXPECT_FALSE(is_flat(ex(X())));
  EXPECT_FALSE(is_flat(ex(X() * X())));
  EXPECT_FALSE(is_flat(ex(S(xp(Q(1, 2))))));
}

TEST(Taylor, SpecCondition) {
  auto a = spec_condition_check(xp(2));
  EXPECT_TRUE(a.flat);
  EXPECT_TRUE(a.pass);
  auto b = spec_condition_check(ex(X() * X()));
  EXPECT_FALSE(b.flat);
  EXPECT_TRUE(b.pass) << b.detail;
  EXPECT_GT(b.checked, 0u);
  auto c = spec_condition_check(ex(X()) * xp(3) * lg(1));
  EXPECT_FALSE(c.flat);
  EXPECT_TRUE(c.pass) << c.detail;
}

TEST(Taylor, LocusExamples) {
  EXPECT_EQ(locus_contains(ident(C(1)), geo()).verdict, ConvVerdict::CertifiedConvergent);
  ConvReport d = locus_contains(ident(C(1)), S(ex(X())));
  EXPECT_EQ(d.verdict, ConvVerdict::CertifiedDivergent);
  ASSERT_FALSE(d.witnesses.empty());
  EXPECT_EQ(d.witnesses.front(), ex(X()));
  EXPECT_EQ(locus_contains(comp(X() * X(), S(xp(-1))), S(ex(X()))).verdict,
            ConvVerdict::CertifiedConvergent);
  // delta not below op(x)
  EXPECT_EQ(locus_contains(ident(X() * X()), S(ex(X()))).verdict, ConvVerdict::CertifiedDivergent);
}

TEST(Taylor, LocusGroupAndDifferentialStability) {
  LocusSpec spec = comp(X() * X(), S(xp(-1)));
  std::vector<Monomial> ok = {xp(3), lg(1), ex(X()), ex(X()) * xp(-1), lg(2, -1)};
  for (const auto& a : ok)
    for (const auto& b : ok) {
      EXPECT_TRUE(locus_contains(spec, S(a * b)).convergent()) << (a * b).str();
      EXPECT_TRUE(locus_contains(spec, S(a.inverse())).convergent()) << a.str();
    }
  for (const auto& a : ok) {
    Series d = derive(S(a));
    for (const auto& t : d.prefix(6)) EXPECT_TRUE(locus_contains(spec, S(t.mono)).convergent()) << t.mono.str();
  }
}

TEST(Taylor, LocusReductionAgainstSupport) {
  SeriesGen gen(17);
  std::vector<LocusSpec> specs = {ident(C(1)), ident(S(xp(-1))), comp(X() * X(), S(xp(-1))),
                                  comp(X() * X(), C(1)), ident(X())};
  for (int i = 0; i < 20; ++i) {
    Series f = gen.any();
    for (const auto& spec : specs) {
      ConvVerdict a = locus_contains(spec, f).verdict;
      ConvVerdict b = locus_by_support(spec, f).verdict;
      if (a == ConvVerdict::CertifiedConvergent) EXPECT_NE(b, ConvVerdict::CertifiedDivergent) << render(f, 4);
      if (a == ConvVerdict::CertifiedDivergent) EXPECT_EQ(b, ConvVerdict::CertifiedDivergent) << render(f, 4);
    }
  }
}

TEST(Taylor, Sharpness) {
  std::vector<std::pair<Series, LocusSpec>> cases = {
      {S(ex(X())), ident(C(1))},
      {S(ex(X() * X())), ident(S(xp(-1)))},
      {S(ex(X())) + X(), ident(C(2))},
      {S(ex(X())), comp(X() * X(), C(1))},
      {S(ex(X() * S(lg(1)))), ident(C(1))},
      {S(xp(-1)) + S(ex(X() * X())), comp(X(), S(xp(Q(-1, 2))))}};
  for (const auto& [f, spec] : cases) {
    ConvReport r = locus_contains(spec, f);
    EXPECT_EQ(r.verdict, ConvVerdict::CertifiedDivergent) << render(f, 2) << " " << r.reason;
    EXPECT_FALSE(r.witnesses.empty());
  }
}

TEST(Taylor, TaylorSeriesExamples) {
  PowerSeries p = taylor_series(X());
  EXPECT_EQ(p.str(4, 4), "x + X");
  PowerSeries q = taylor_series(X() * X());
  EXPECT_EQ(q.str(4, 4), "x^2 + 2*x*X + X^2");
  // Closed form: (1 - x^-1)^-1 has k-th derivative / k! equal to x^-k-1 ... via 1/(x-1) shape.
  PowerSeries g = taylor_series(geo());
  Series y = invert(X() - C(1));  // geo = 1 + y
  for (std::size_t k = 1; k <= 5; ++k) {
    // (1/(x-1))^(k)/k! = (-1)^k (x-1)^-(k+1)
    Series expect = C(k % 2 ? -1 : 1);
    for (std::size_t j = 0; j <= k; ++j) expect = expect * y;
    EXPECT_TRUE(series_equal(g.coeff(k), expect, 6)) << k;
  }
}

TEST(Taylor, TaylorSeriesMultiplicative) {
  Series f = geo(), h = S(lg(1)) + X();
  PowerSeries lhs = taylor_series(f * h);
  PowerSeries rhs = ps_mul(taylor_series(f), taylor_series(h));
  for (std::size_t k = 0; k <= 4; ++k) EXPECT_TRUE(series_equal(lhs.coeff(k), rhs.coeff(k), 6)) << k;
}

TEST(Taylor, TaylorSeriesFaaDiBruno) {
  Series f = S(lg(1));
  Series g = X() * X() + X();
  PowerSeries t = taylor_series(compose(f, g));
  std::vector<Series> fd, gd;
  for (std::size_t n = 0; n <= 5; ++n) {
    fd.push_back(compose(nth_derivative(f, n), g));
    gd.push_back(nth_derivative(g, n));
  }
  for (std::size_t k = 0; k <= 5; ++k)
    EXPECT_TRUE(series_equal(t.coeff(k), faa_di_bruno_coeff(fd, gd, k), 6)) << k;
}

TEST(Taylor, DeformExamples) {
  EXPECT_TRUE(series_equal(taylor_deform(S(xp(-1)), ident(C(1))), invert(X() + C(1)), 8));
  Series d = S(xp(-1)) + S(lg(1, -1));
  EXPECT_EQ(all_terms(taylor_deform(X(), ident(d))), all_terms(X() + d));
  EXPECT_EQ(all_terms(taylor_deform(X(), comp(X() * X(), S(xp(-1))))), all_terms(X() * X() + S(xp(-1))));
  Series e = taylor_deform(S(ex(X())), comp(X() * X(), S(xp(-1))));
  EXPECT_TRUE(series_equal(e, exp_series(X() * X() + S(xp(-1))), 8));
  EXPECT_TRUE(series_equal(e, compose(S(ex(X())), X() * X() + S(xp(-1))), 8));
  EXPECT_THROW(taylor_deform(S(ex(X())), ident(C(1))), LocusRefused);
}

TEST(Taylor, DeformZeroDelta) {
  Series f = geo() + S(ex(X()));
  EXPECT_TRUE(series_equal(taylor_deform(f, ident(Series())), f, 8));
  EXPECT_TRUE(series_equal(taylor_deform(f, comp(X() * X(), Series())), compose(f, X() * X()), 8));
}

TEST(Taylor, DeformRingMorphism) {
  LocusSpec spec = comp(X() * X(), S(xp(-1)));
  std::vector<Series> fs = {X(), S(lg(1)), geo(), S(ex(X())) * (C(1) + S(xp(-1)))};
  for (const auto& f : fs)
    for (const auto& h : fs) {
      Series lhs = taylor_deform(f * h, spec);
      Series rhs = taylor_deform(f, spec) * taylor_deform(h, spec);
      std::string why;
      EXPECT_TRUE(series_equal(lhs, rhs, 6, &why)) << render(f, 2) << " * " << render(h, 2) << ": " << why;
    }
}

TEST(Taylor, Descent) {
  std::vector<std::pair<Series, LocusSpec>> cases = {
      {S(xp(-1)), ident(C(1))}, {S(lg(1)), ident(C(1))}, {S(ex(X())), comp(X() * X(), S(xp(-1)))}};
  for (const auto& [f, spec] : cases) {
    DescentReport r = descent_check(f, spec, 4);
    EXPECT_TRUE(r.holds) << r.detail;
    EXPECT_GT(r.checked, 0u);
  }
}

TEST(Taylor, IdentityCheckExamples) {
  IdentityReport a = taylor_identity_check(S(xp(-1)), X(), C(1), 8);
  EXPECT_EQ(a.status, CheckStatus::Equal) << a.reason;
  IdentityReport b = taylor_identity_check(S(lg(1)), X(), C(1), 6);
  EXPECT_EQ(b.status, CheckStatus::Equal) << b.reason;
  Series expect = S(lg(1)) + log_series(C(1) + S(xp(-1)));
  EXPECT_TRUE(series_equal(b.rhs, expect, 6));
  IdentityReport c = taylor_identity_check(S(ex(X())), X(), C(1), 8);
  EXPECT_EQ(c.status, CheckStatus::Skipped);
  EXPECT_EQ(c.locus.verdict, ConvVerdict::CertifiedDivergent);
  EXPECT_FALSE(c.reason.empty());
  EXPECT_EQ(to_string(CheckStatus::Unequal), "UNEQUAL");
}

TEST(Taylor, AnalyticCommutation) {
  EXPECT_EQ(analytic_commutation_check(X(), ident(C(1)), 6).status, CheckStatus::Equal);
  EXPECT_EQ(analytic_commutation_check(X() * X(), ident(C(1)), 6).status, CheckStatus::Equal);
  EXPECT_EQ(analytic_commutation_check(S(ex(X())) * (C(1) + S(xp(-1))), comp(X() * X(), S(xp(-1))), 5).status,
            CheckStatus::Equal);
  EXPECT_EQ(analytic_commutation_check(S(ex(X())), ident(C(1)), 5).status, CheckStatus::Skipped);
}

TEST(Taylor, ChainRuleTransport) {
  LocusSpec spec = comp(X() * X(), S(xp(-1)));
  for (const auto& f : {X() * X(), X(), S(xp(-1))}) {
    IdentityReport r = chain_rule_transport_check(f, spec, 6);
    EXPECT_EQ(r.status, CheckStatus::Equal) << render(f, 2) << ": " << r.reason;
  }
}

TEST(Taylor, DaggerClosure) {
  GridCertificate c;
  c.bases = {ex(X() * X())};
  auto cl = dagger_closure(c);
  EXPECT_NE(std::find(cl.begin(), cl.end(), xp(1)), cl.end());
}

TEST(Taylor, StalledSideFallsBackToCutoff) {
  // log(exp(x + 1/x)) is exactly x + 1/x; the rhs cannot prove its tail vanishes.
  IdentityReport r = analytic_commutation_check(S(ex(X())), comp(X(), S(xp(-1))), 6);
  EXPECT_EQ(r.status, CheckStatus::Equal) << r.reason;
  EXPECT_NE(r.reason.find("at and above x^-1"), std::string::npos) << r.reason;
  // Both sides of the chain rule for (1 - 1/x)^-1 at x + 1 cancel forever.
  Limits l = limits();
  l.step_budget = 20000;
  LimitsScope scope(l);
  IdentityReport q = chain_rule_transport_check(geo(), comp(X(), C(1)), 6);
  EXPECT_EQ(q.status, CheckStatus::Skipped);
}

TEST(Taylor, ExactBackendRefusesLogOfTwo) {
  // log(x^2 log(x^2)) contains log(2).
  IdentityReport r = analytic_commutation_check(X() * S(lg(1)), comp(X() * X(), C(1)), 6);
  EXPECT_EQ(r.status, CheckStatus::Skipped);
  EXPECT_NE(r.reason.find("log(2)"), std::string::npos) << r.reason;
}
