#include "transkit/taylor.hpp"

#include <algorithm>
#include <mutex>

#include "transkit/calculus.hpp"
#include "transkit/limits.hpp"

namespace transkit {

namespace {

const Monomial kOne;

std::optional<Monomial> lead_mono(const Series& s) {
  auto t = s.term(0);
  if (!t) return std::nullopt;
  return t->mono;
}

// Dominant monomial of op(dagger(m)) * v, or nullopt when m' vanishes.
std::optional<Monomial> locus_monomial(const OperatorHandle& op, const Monomial& m,
                                       const Monomial& v) {
  if (m.is_one()) return std::nullopt;
  auto d = lead_mono(dagger(m));
  if (!d) return std::nullopt;
  return op.dominant(*d) * v;
}

std::string status_reason(const ConvReport& r) {
  std::string s = "locus " + to_string(r.verdict);
  if (!r.witnesses.empty()) s += ", witness " + r.witnesses.front().str();
  return s;
}

}  // namespace

bool is_flat(const Monomial& m) {
  if (m.is_one()) return true;
  auto d = lead_mono(dagger(m));
  return !d || preceq(*d, Monomial::x().inverse());
}

SpecConditionResult spec_condition_check(const Monomial& m, std::size_t prefix) {
  if (m.is_one()) throw PreconditionError("the spec condition needs a monomial other than 1");
  SpecConditionResult r;
  r.flat = is_flat(m);
  auto md = lead_mono(dagger(m));
  Series deriv = derive(Series::monomial(m));
  const Monomial xinv = Monomial::x().inverse();
  for (const auto& t : deriv.prefix(prefix)) {
    ++r.checked;
    auto nd = lead_mono(dagger(t.mono));
    bool ok = r.flat ? (!nd || preceq(*nd, xinv)) : (nd && *nd == *md);
    if (!ok) {
      r.offending = t.mono;
      r.detail = "dagger of " + t.mono.str() + " is " + (nd ? nd->str() : std::string("0"));
      return r;
    }
  }
  r.pass = true;
  r.detail = r.flat ? "flat" : "dagger " + md->str();
  return r;
}

ConvReport locus_contains(const LocusSpec& spec, const Series& f, std::size_t enumerate) {
  ConvReport rep;
  if (spec.delta.is_zero()) {
    rep.verdict = ConvVerdict::CertifiedConvergent;
    rep.reason = "delta = 0";
    return rep;
  }
  const Monomial v = *lead_mono(spec.delta);
  const Monomial opx = *lead_mono(spec.op.image_of_x());
  const bool below = prec(v, opx);
  std::vector<Monomial> failing;
  std::vector<Monomial> checked;
  GridCertificate c = cert_prune(f.certificate());
  std::vector<Monomial> gens = c.bases;
  for (const auto& z : c.ratios) append_unique(gens, z);
  for (const auto& g : gens) {
    auto e = locus_monomial(spec.op, g, v);
    if (!e) continue;
    append_unique(checked, g);
    if (!prec(*e, kOne)) append_unique(failing, g);
  }
  if (below && failing.empty()) {
    rep.verdict = ConvVerdict::CertifiedConvergent;
    rep.witnesses = checked;
    rep.reason = "delta below op(x) and op(dagger(m))*delta infinitesimal on every generator";
    return rep;
  }
  std::vector<Term> support;
  try {
    support = f.prefix(enumerate);
  } catch (const BudgetExceeded&) {
  }
  rep.checked_prefix = support.size();
  for (const auto& t : support) {
    auto e = locus_monomial(spec.op, t.mono, v);
    bool violates = e && !prec(*e, kOne);
    if (violates || (!below && !is_flat(t.mono))) {
      rep.verdict = ConvVerdict::CertifiedDivergent;
      rep.witnesses = {t.mono};
      rep.reason = violates ? "op(dagger(m))*delta is not infinitesimal for m = " + t.mono.str()
                            : "delta not below op(x) with non-flat support monomial " + t.mono.str();
      return rep;
    }
  }
  rep.witnesses = failing;
  rep.reason = below ? "a certificate generator fails the locus condition"
                     : "delta not below op(x)";
  return rep;
}

ConvReport locus_by_support(const LocusSpec& spec, const Series& f, std::size_t n) {
  ConvReport rep;
  if (spec.delta.is_zero()) {
    rep.verdict = ConvVerdict::CertifiedConvergent;
    return rep;
  }
  const Monomial v = *lead_mono(spec.delta);
  const bool below = prec(v, *lead_mono(spec.op.image_of_x()));
  auto support = f.prefix(n);
  rep.checked_prefix = support.size();
  for (const auto& t : support) {
    auto e = locus_monomial(spec.op, t.mono, v);
    if (e && !prec(*e, kOne)) {
      rep.verdict = ConvVerdict::CertifiedDivergent;
      rep.witnesses = {t.mono};
      return rep;
    }
  }
  rep.verdict = below ? ConvVerdict::CertifiedConvergent : ConvVerdict::Inconclusive;
  return rep;
}

std::vector<Monomial> dagger_closure(const GridCertificate& c) {
  std::vector<Monomial> out;
  std::vector<Monomial> todo = c.bases;
  for (const auto& z : c.ratios) todo.push_back(z);
  std::vector<Monomial> seen;
  while (!todo.empty()) {
    Monomial m = todo.back();
    todo.pop_back();
    if (std::find(seen.begin(), seen.end(), m) != seen.end()) continue;
    seen.push_back(m);
    for (const auto& t : dagger(m).prefix(std::numeric_limits<std::size_t>::max())) {
      if (std::find(out.begin(), out.end(), t.mono) != out.end()) continue;
      out.push_back(t.mono);
      if (out.size() > limits().closure_limit)
        throw ResourceError("dagger closure exceeds closure limit");
      todo.push_back(t.mono);
    }
  }
  return out;
}

namespace {

// Degree of f as a polynomial in x, if it is one.
std::optional<std::size_t> polynomial_degree(const Series& f) {
  if (!f.known_finite()) return std::nullopt;
  std::size_t deg = 0;
  for (const auto& t : f.prefix(std::numeric_limits<std::size_t>::max())) {
    if (t.mono.is_one()) continue;
    const auto& lp = t.mono.log_powers();
    if (!t.mono.exp_arg().empty() || lp.size() != 1 || lp[0].first != 0) return std::nullopt;
    const mpq_class& r = lp[0].second;
    if (r.get_den() != 1 || r < 0) return std::nullopt;
    deg = std::max<std::size_t>(deg, r.get_num().get_ui());
  }
  return deg;
}

}  // namespace

PowerSeries taylor_series(const Series& f) {
  if (auto deg = polynomial_degree(f)) {
    std::vector<Series> cs;
    Series d = f;
    for (std::size_t k = 0; k <= *deg; ++k) {
      cs.push_back(k == 0 ? d : scale(d, Constant(mpq_class(1) / factorial(k))));
      d = derive(d);
    }
    return PowerSeries::polynomial(std::move(cs));
  }
  GridCertificate c = cert_prune(f.certificate());
  BiCertificate cert;
  for (const auto& b : c.bases) cert.bases.push_back({b, 0});
  for (const auto& z : c.ratios) cert.ratios.push_back({z, 0});
  for (const auto& t : dagger_closure(c)) cert.ratios.push_back({t, 1});
  struct Derivs {
    std::mutex mu;
    std::vector<Series> d;
  };
  auto st = std::make_shared<Derivs>();
  st->d.push_back(f);
  auto law = [st](std::size_t k) {
    std::unique_lock<std::mutex> lk(st->mu);
    while (st->d.size() <= k) {
      Series prev = st->d.back();
      lk.unlock();
      Series next = derive(prev);
      lk.lock();
      if (st->d.size() <= k && st->d.back().id() == prev.id()) st->d.push_back(next);
    }
    Series dk = st->d[k];
    lk.unlock();
    return k == 0 ? dk : scale(dk, Constant(mpq_class(1) / factorial(k)));
  };
  return PowerSeries::from_law(law, std::move(cert));
}

PowerSeries taylor_series(const Series& f, const LocusSpec& spec) {
  auto rep = locus_contains(spec, f);
  if (!rep.convergent()) throw LocusRefused(rep);
  return taylor_series(f);
}

Series taylor_deform(const Series& f, const LocusSpec& spec) {
  auto rep = locus_contains(spec, f);
  if (!rep.convergent()) throw LocusRefused(rep);
  if (spec.delta.is_zero()) return spec.op.apply(f);
  PowerSeries p = taylor_series(f);
  const Monomial v = *lead_mono(spec.delta);
  CutSpec target = CutSpec::above(v);
  CutSpec source = CutSpec::preimage(spec.op, target);
  PowerSeries q = lift_coefficientwise(spec.op, p, source, target);
  return cut_eval(q, spec.delta, target);
}

DescentReport descent_check(const Series& f, const LocusSpec& spec, std::size_t order) {
  DescentReport r;
  std::optional<Monomial> prev;
  Series d = f;
  Monomial vk;
  const Monomial v = spec.delta.is_zero() ? kOne : *lead_mono(spec.delta);
  for (std::size_t k = 0; k <= order; ++k) {
    auto lm = lead_mono(d);
    if (!lm) break;
    Monomial cur = spec.op.dominant(*lm) * vk;
    if (prev && !prec(cur, *prev)) {
      r.holds = false;
      r.detail = "order " + std::to_string(k) + ": " + cur.str() + " not below " + prev->str();
      return r;
    }
    ++r.checked;
    prev = cur;
    d = derive(d);
    vk = vk * v;
  }
  return r;
}

std::string to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Equal:
      return "EQUAL";
    case CheckStatus::Unequal:
      return "UNEQUAL";
    case CheckStatus::Skipped:
      return "SKIPPED";
  }
  return "";
}

namespace {

template <class F>
IdentityReport guarded(IdentityReport r, F&& body) {
  try {
    body(r);
  } catch (const LocusRefused& e) {
    r.status = CheckStatus::Skipped;
    r.locus = e.report;
    r.reason = status_reason(e.report);
  } catch (const Error& e) {
    r.status = CheckStatus::Skipped;
    r.reason = e.what();
  }
  return r;
}

std::optional<std::vector<Term>> resolved_prefix(const Series& s, std::size_t n) {
  try {
    return s.prefix(n);
  } catch (const BudgetExceeded&) {
    return std::nullopt;
  }
}

void compare(IdentityReport& r, std::size_t depth) {
  Agreement a;
  try {
    a = agree_to_terms(r.lhs, r.rhs, depth);
  } catch (const BudgetExceeded& e) {
    a.detail = e.what();
  }
  r.compared = a.compared;
  r.first_mismatch = a.first_mismatch;
  if (a.equal) {
    r.status = CheckStatus::Equal;
    r.reason = "agree on " + std::to_string(a.compared) + " terms";
    return;
  }
  if (a.first_mismatch) {
    r.status = CheckStatus::Unequal;
    r.reason = a.detail;
    return;
  }
  // A side stalled on a cancelling run. Compare at and above the last
  // monomial the other side resolves.
  auto lp = resolved_prefix(r.lhs, depth);
  auto rp = resolved_prefix(r.rhs, depth);
  const auto& side = lp ? lp : rp;
  r.status = CheckStatus::Skipped;
  r.reason = a.detail;
  if ((lp && rp) || !side || side->empty()) return;
  const Monomial cut = side->back().mono;
  Agreement c;
  try {
    c = agree_above(r.lhs, r.rhs, cut);
  } catch (const BudgetExceeded& e) {
    r.reason = e.what();
    return;
  }
  r.compared = c.compared;
  r.first_mismatch = c.first_mismatch;
  if (c.equal) {
    r.status = CheckStatus::Equal;
    r.reason = "agree on " + std::to_string(c.compared) + " terms at and above " + cut.str() +
               "; the " + (lp ? "rhs" : "lhs") + " does not resolve further within the step budget";
  } else if (c.first_mismatch) {
    r.status = CheckStatus::Unequal;
    r.reason = c.detail;
  } else {
    r.reason = c.detail;
  }
}

bool require_locus(IdentityReport& r, const LocusSpec& spec, const Series& s) {
  ConvReport rep = locus_contains(spec, s);
  if (r.locus.verdict == ConvVerdict::CertifiedConvergent || r.locus.reason.empty()) r.locus = rep;
  if (rep.convergent()) return true;
  r.locus = rep;
  r.status = CheckStatus::Skipped;
  r.reason = status_reason(rep);
  return false;
}

}  // namespace

IdentityReport taylor_identity_check(const Series& f, const Series& g, const Series& delta,
                                     std::size_t depth) {
  return guarded(IdentityReport{}, [&](IdentityReport& r) {
    LocusSpec spec{OperatorHandle::right_compose(g), delta};
    if (!require_locus(r, spec, f)) return;
    r.lhs = compose(f, g + delta);
    r.rhs = taylor_deform(f, spec);
    compare(r, depth);
  });
}

IdentityReport analytic_commutation_check(const Series& f, const LocusSpec& spec,
                                          std::size_t depth) {
  return guarded(IdentityReport{}, [&](IdentityReport& r) {
    Series lf = log_series(f);
    if (!require_locus(r, spec, f) || !require_locus(r, spec, lf)) return;
    r.lhs = taylor_deform(lf, spec);
    r.rhs = log_series(taylor_deform(f, spec));
    compare(r, depth);
  });
}

IdentityReport chain_rule_transport_check(const Series& f, const LocusSpec& spec,
                                          std::size_t depth) {
  return guarded(IdentityReport{}, [&](IdentityReport& r) {
    Series fp = derive(f);
    Series x = Series::x();
    if (!require_locus(r, spec, f) || !require_locus(r, spec, fp) || !require_locus(r, spec, x))
      return;
    r.lhs = derive(taylor_deform(f, spec));
    r.rhs = derive(taylor_deform(x, spec)) * taylor_deform(fp, spec);
    compare(r, depth);
  });
}

}  // namespace transkit
