#include "transkit/powerseries.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <sstream>

#include "transkit/calculus.hpp"
#include "transkit/errors.hpp"
#include "transkit/limits.hpp"

namespace transkit {

namespace {

const Monomial kOne;

void append_unique_bi(std::vector<BiMonomial>& v, const BiMonomial& m) {
  if (std::find(v.begin(), v.end(), m) == v.end()) v.push_back(m);
}

Monomial mono_ipow(const Monomial& m, long k) { return m.pow(mpq_class(k)); }

// Multisets of size n over [0, count), in lexicographic order.
void for_each_multiset(std::size_t count, std::size_t n,
                       const std::function<void(const std::vector<std::size_t>&)>& fn) {
  std::vector<std::size_t> idx(n, 0);
  if (count == 0) {
    if (n == 0) fn(idx);
    return;
  }
  while (true) {
    fn(idx);
    std::size_t i = n;
    while (i > 0 && idx[i - 1] == count - 1) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < n; ++j) idx[j] = idx[i - 1];
  }
}

bool is_zero_safe(const Series& s) {
  try {
    return s.is_zero();
  } catch (const BudgetExceeded&) {
    return false;
  }
}

// Degree-lowering shift of a certificate of a series with vanishing constant
// coefficient: the certificate of P / X.
BiCertificate shift_down(const BiCertificate& c) {
  BiCertificate out;
  out.ratios = c.ratios;
  for (const auto& b : c.bases) {
    if (b.degree >= 1) {
      append_unique_bi(out.bases, {b.mono, b.degree - 1});
    } else {
      for (const auto& z : c.ratios)
        if (z.degree >= 1) append_unique_bi(out.bases, {b.mono * z.mono, b.degree + z.degree - 1});
    }
  }
  return out;
}

}  // namespace

struct PowerSeries::State {
  std::function<Series(std::size_t)> law;
  std::optional<std::size_t> degree;
  BiCertificate cert;
  std::optional<MonomialLaw> mlaw;
  std::mutex mu;
  std::map<std::size_t, Series> cache;
};

PowerSeries::PowerSeries() : st_(std::make_shared<State>()) {
  st_->law = [](std::size_t) { return Series(); };
  st_->degree = 0;
}

PowerSeries PowerSeries::polynomial(std::vector<Series> coeffs) {
  PowerSeries p;
  BiCertificate cert;
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    if (is_known_zero(coeffs[k])) continue;
    const auto& c = coeffs[k].certificate();
    for (const auto& b : c.bases) append_unique_bi(cert.bases, {b, static_cast<long>(k)});
    for (const auto& z : c.ratios) append_unique_bi(cert.ratios, {z, 0});
  }
  auto shared = std::make_shared<std::vector<Series>>(std::move(coeffs));
  p.st_->law = [shared](std::size_t k) { return k < shared->size() ? (*shared)[k] : Series(); };
  p.st_->degree = shared->empty() ? 0 : shared->size() - 1;
  p.st_->cert = std::move(cert);
  return p;
}

PowerSeries PowerSeries::from_law(std::function<Series(std::size_t)> law, BiCertificate cert) {
  PowerSeries p;
  p.st_->law = std::move(law);
  p.st_->degree.reset();
  p.st_->cert = std::move(cert);
  return p;
}

PowerSeries PowerSeries::from_monomial_law(MonomialLaw law, BiCertificate cert) {
  auto coeff = law.coeff;
  auto mono = law.mono;
  PowerSeries p = from_law(
      [coeff, mono](std::size_t k) {
        Constant c = coeff(k);
        return c.is_zero() ? Series() : Series::monomial(mono(k), c);
      },
      std::move(cert));
  p.st_->mlaw = std::move(law);
  return p;
}

Series PowerSeries::coeff(std::size_t k) const {
  if (st_->degree && k > *st_->degree) return Series();
  {
    std::lock_guard<std::mutex> lk(st_->mu);
    auto it = st_->cache.find(k);
    if (it != st_->cache.end()) return it->second;
  }
  Series s = st_->law(k);
  std::lock_guard<std::mutex> lk(st_->mu);
  return st_->cache.emplace(k, s).first->second;
}

std::optional<std::size_t> PowerSeries::degree_bound() const { return st_->degree; }
const BiCertificate& PowerSeries::certificate() const { return st_->cert; }
const std::optional<MonomialLaw>& PowerSeries::monomial_law() const { return st_->mlaw; }

std::string PowerSeries::str(std::size_t order, std::size_t terms) const {
  std::string out;
  for (std::size_t k = 0; k < order; ++k) {
    if (st_->degree && k > *st_->degree) break;
    Series c = coeff(k);
    if (is_zero_safe(c)) continue;
    std::string cs = render(c, terms);
    bool single = c.known_finite() && c.prefix(2).size() == 1;
    std::string xs = k == 0 ? "" : (k == 1 ? "X" : "X^" + std::to_string(k));
    std::string piece;
    if (k == 0) {
      piece = cs;
    } else if (single && cs == "1") {
      piece = xs;
    } else if (single && cs == "-1") {
      piece = "-" + xs;
    } else {
      piece = (single ? cs : "(" + cs + ")") + "*" + xs;
    }
    if (out.empty()) {
      out = piece;
    } else if (piece[0] == '-') {
      out += " - " + piece.substr(1);
    } else {
      out += " + " + piece;
    }
  }
  bool finite = st_->degree && *st_->degree < order;
  if (!finite) {
    std::string o = "O(X^" + std::to_string(order) + ")";
    out = out.empty() ? o : out + " + " + o;
  }
  return out.empty() ? "0" : out;
}

PowerSeries ps_add(const PowerSeries& p, const PowerSeries& q) {
  BiCertificate c = p.certificate();
  for (const auto& b : q.certificate().bases) append_unique_bi(c.bases, b);
  for (const auto& z : q.certificate().ratios) append_unique_bi(c.ratios, z);
  if (p.degree_bound() && q.degree_bound()) {
    std::size_t d = std::max(*p.degree_bound(), *q.degree_bound());
    std::vector<Series> cs;
    for (std::size_t k = 0; k <= d; ++k) cs.push_back(p.coeff(k) + q.coeff(k));
    return PowerSeries::polynomial(std::move(cs));
  }
  return PowerSeries::from_law([p, q](std::size_t k) { return p.coeff(k) + q.coeff(k); },
                               std::move(c));
}

PowerSeries ps_mul(const PowerSeries& p, const PowerSeries& q) {
  auto law = [p, q](std::size_t k) {
    std::vector<Series> items;
    for (std::size_t i = 0; i <= k; ++i) {
      Series a = p.coeff(i);
      if (is_known_zero(a)) continue;
      Series b = q.coeff(k - i);
      if (is_known_zero(b)) continue;
      items.push_back(a * b);
    }
    return sum_family(items);
  };
  if (p.degree_bound() && q.degree_bound()) {
    std::vector<Series> cs;
    for (std::size_t k = 0; k <= *p.degree_bound() + *q.degree_bound(); ++k) cs.push_back(law(k));
    return PowerSeries::polynomial(std::move(cs));
  }
  BiCertificate c;
  for (const auto& a : p.certificate().bases)
    for (const auto& b : q.certificate().bases)
      append_unique_bi(c.bases, {a.mono * b.mono, a.degree + b.degree});
  c.ratios = p.certificate().ratios;
  for (const auto& z : q.certificate().ratios) append_unique_bi(c.ratios, z);
  return PowerSeries::from_law(law, std::move(c));
}

PowerSeries ps_derive(const PowerSeries& p) {
  auto law = [p](std::size_t k) {
    Series c = p.coeff(k + 1);
    return is_known_zero(c) ? c : scale(c, Constant(static_cast<long>(k + 1)));
  };
  if (p.degree_bound()) {
    std::vector<Series> cs;
    for (std::size_t k = 0; k < *p.degree_bound(); ++k) cs.push_back(law(k));
    return PowerSeries::polynomial(std::move(cs));
  }
  BiCertificate c = shift_down(p.certificate());
  if (p.monomial_law()) {
    MonomialLaw ml = *p.monomial_law();
    MonomialLaw out;
    out.coeff = [ml](std::size_t k) { return ml.coeff(k + 1) * Constant(static_cast<long>(k + 1)); };
    out.mono = [ml](std::size_t k) { return ml.mono(k + 1); };
    out.monotone_from = ml.monotone_from > 0 ? ml.monotone_from - 1 : 0;
    return PowerSeries::from_monomial_law(std::move(out), std::move(c));
  }
  return PowerSeries::from_law(law, std::move(c));
}

namespace {

// Memoised coefficients of the powers of a series with vanishing constant term.
class PowerTable {
 public:
  explicit PowerTable(PowerSeries q) : q_(std::move(q)) {}
  // [X^m] Q^n
  Series get(std::size_t n, std::size_t m) {
    if (n == 0) return m == 0 ? Series(Constant(1)) : Series();
    if (m < n) return Series();
    {
      std::lock_guard<std::mutex> lk(mu_);
      auto it = memo_.find({n, m});
      if (it != memo_.end()) return it->second;
    }
    std::vector<Series> items;
    for (std::size_t i = 1; i + n - 1 <= m; ++i) {
      Series a = q_.coeff(i);
      if (is_known_zero(a)) continue;
      Series b = get(n - 1, m - i);
      if (is_known_zero(b)) continue;
      items.push_back(a * b);
    }
    Series s = sum_family(items);
    std::lock_guard<std::mutex> lk(mu_);
    return memo_.emplace(std::make_pair(n, m), s).first->second;
  }

 private:
  PowerSeries q_;
  std::mutex mu_;
  std::map<std::pair<std::size_t, std::size_t>, Series> memo_;
};

}  // namespace

PowerSeries ps_compose(const PowerSeries& p, const PowerSeries& q) {
  if (!is_zero_safe(q.coeff(0)))
    throw PreconditionError("composition needs an inner series with vanishing constant coefficient");
  auto table = std::make_shared<PowerTable>(q);
  auto law = [p, table](std::size_t k) {
    std::vector<Series> items;
    std::size_t top = p.degree_bound() ? std::min(k, *p.degree_bound()) : k;
    for (std::size_t n = 0; n <= top; ++n) {
      Series a = p.coeff(n);
      if (is_known_zero(a)) continue;
      Series b = table->get(n, k);
      if (is_known_zero(b)) continue;
      items.push_back(a * b);
    }
    return sum_family(items);
  };
  if (p.degree_bound() && q.degree_bound()) {
    std::vector<Series> cs;
    for (std::size_t k = 0; k <= *p.degree_bound() * *q.degree_bound(); ++k) cs.push_back(law(k));
    return PowerSeries::polynomial(std::move(cs));
  }
  BiCertificate qs = shift_down(q.certificate());
  BiCertificate c;
  const std::size_t cap = limits().closure_limit * 8;
  auto expand = [&](const BiMonomial& g, std::vector<BiMonomial>& out) {
    for_each_multiset(qs.bases.size(), static_cast<std::size_t>(g.degree),
                      [&](const std::vector<std::size_t>& idx) {
                        BiMonomial r{g.mono, g.degree};
                        for (auto i : idx) {
                          r.mono = r.mono * qs.bases[i].mono;
                          r.degree += qs.bases[i].degree;
                        }
                        append_unique_bi(out, r);
                        if (out.size() > cap)
                          throw ResourceError("composition certificate exceeds closure limit");
                      });
  };
  for (const auto& b : p.certificate().bases) expand(b, c.bases);
  for (const auto& z : p.certificate().ratios) expand(z, c.ratios);
  for (const auto& z : qs.ratios) append_unique_bi(c.ratios, z);
  return PowerSeries::from_law(law, std::move(c));
}

// ---------------------------------------------------------------------------
// Cuts

CutSpec CutSpec::all() { return CutSpec(); }

CutSpec CutSpec::empty() {
  CutSpec s;
  s.kind_ = Kind::Empty;
  return s;
}

CutSpec CutSpec::above(const Monomial& b) {
  CutSpec s;
  s.kind_ = Kind::Above;
  s.bound_ = b;
  return s;
}

CutSpec CutSpec::above_eq(const Monomial& b) {
  CutSpec s;
  s.kind_ = Kind::AboveEq;
  s.bound_ = b;
  return s;
}

CutSpec CutSpec::preimage(const OperatorHandle& op, const CutSpec& target) {
  if (op.is_identity()) return target;
  CutSpec s;
  s.kind_ = Kind::Preimage;
  s.op_ = std::make_shared<OperatorHandle>(op);
  s.target_ = std::make_shared<CutSpec>(target);
  return s;
}

bool CutSpec::contains(const Monomial& u) const {
  switch (kind_) {
    case Kind::All:
      return true;
    case Kind::Empty:
      return false;
    case Kind::Above:
      return prec(bound_, u);
    case Kind::AboveEq:
      return preceq(bound_, u);
    case Kind::Preimage:
      return target_->contains(op_->dominant(u));
  }
  return false;
}

bool CutSpec::below_one(const Monomial& m, long k) const {
  if (k < 0) return false;
  if (k == 0) return prec(m, kOne);
  return contains(m.pow(mpq_class(-1, k)));
}

std::string CutSpec::str() const {
  switch (kind_) {
    case Kind::All:
      return "all";
    case Kind::Empty:
      return "empty";
    case Kind::Above:
      return "above:" + bound_.str();
    case Kind::AboveEq:
      return "aboveeq:" + bound_.str();
    case Kind::Preimage:
      return "preimage(" + op_->str() + ", " + target_->str() + ")";
  }
  return "";
}

CutOrder cut_compare(const BiMonomial& a, const BiMonomial& b, const CutSpec& s) {
  Monomial q = a.mono / b.mono;
  long d = a.degree - b.degree;
  if (d == 0 && q.is_one()) return CutOrder::Equal;
  if (s.below_one(q, d)) return CutOrder::Less;
  if (s.below_one(q.inverse(), -d)) return CutOrder::Greater;
  return CutOrder::Incomparable;
}

namespace {

// Leading monomials of the nonzero coefficients among the first `prefix`.
std::vector<BiMonomial> leading_prefix(const PowerSeries& p, std::size_t prefix) {
  std::vector<BiMonomial> out;
  for (std::size_t k = 0; k < prefix; ++k) {
    if (p.degree_bound() && k > *p.degree_bound()) break;
    if (p.monomial_law()) {
      if (!p.monomial_law()->coeff(k).is_zero())
        out.push_back({p.monomial_law()->mono(k), static_cast<long>(k)});
      continue;
    }
    try {
      auto t = p.coeff(k).term(0);
      if (t) out.push_back({t->mono, static_cast<long>(k)});
    } catch (const BudgetExceeded&) {
      break;
    }
  }
  return out;
}

}  // namespace

CutMembership cut_member(const PowerSeries& p, const CutSpec& s, std::size_t prefix) {
  CutMembership r;
  for (const auto& z : p.certificate().ratios)
    if (!s.below_one(z.mono, z.degree)) r.failing_ratios.push_back(z);
  if (r.failing_ratios.empty()) {
    r.verdict = CutMembership::Verdict::Member;
    r.reason = "every certificate ratio lies in the positive cone of the cut";
    return r;
  }
  if (p.degree_bound()) {
    r.verdict = CutMembership::Verdict::Member;
    r.reason = "polynomial";
    return r;
  }
  const std::size_t window = limits().divergence_window;
  auto lead = leading_prefix(p, prefix);
  std::vector<std::pair<BiMonomial, BiMonomial>> run;
  for (std::size_t i = 0; i + 1 < lead.size(); ++i) {
    if (cut_compare(lead[i], lead[i + 1], s) != CutOrder::Greater) {
      run.emplace_back(lead[i], lead[i + 1]);
      if (run.size() >= window) {
        r.verdict = CutMembership::Verdict::NonMember;
        r.witness_pairs = run;
        r.reason = "consecutive coefficients fail to decrease for the cut ordering";
        return r;
      }
    } else {
      run.clear();
    }
  }
  r.reason = "certificate ratio outside the cone without a persistent witness";
  return r;
}

// ---------------------------------------------------------------------------
// Convergence and evaluation

std::string to_string(ConvVerdict v) {
  switch (v) {
    case ConvVerdict::CertifiedConvergent:
      return "certified_convergent";
    case ConvVerdict::CertifiedDivergent:
      return "certified_divergent";
    case ConvVerdict::Inconclusive:
      return "inconclusive";
  }
  return "";
}

std::optional<Monomial> cert_tail_bound(const BiCertificate& c, const Monomial& v, std::size_t K) {
  // Largest per-degree contraction among ratios of positive degree.
  std::optional<Monomial> rho;
  for (const auto& z : c.ratios) {
    if (z.degree <= 0) continue;
    Monomial r = (z.mono * mono_ipow(v, z.degree)).pow(mpq_class(1, z.degree));
    if (!rho || prec(*rho, r)) rho = r;
  }
  std::optional<Monomial> best;
  for (const auto& b : c.bases) {
    Monomial top = b.mono * mono_ipow(v, b.degree);
    long k = static_cast<long>(K);
    if (b.degree < k) {
      if (!rho) continue;
      top = top * mono_ipow(*rho, k - b.degree);
    }
    if (!best || prec(*best, top)) best = top;
  }
  return best;
}

namespace {

struct Route {
  enum class Kind { None, Zero, Polynomial, Cut, Law } kind = Kind::None;
  Monomial v;
  std::size_t law_index = 0;
  std::vector<Monomial> witnesses;
  std::vector<Monomial> failing;
};

Route find_route(const PowerSeries& p, const Series& delta) {
  Route r;
  if (is_zero_safe(delta)) {
    r.kind = Route::Kind::Zero;
    return r;
  }
  if (p.degree_bound()) {
    r.kind = Route::Kind::Polynomial;
    return r;
  }
  auto lt = delta.term(0);
  r.v = lt->mono;
  for (const auto& z : p.certificate().ratios) {
    Monomial e = z.mono * mono_ipow(r.v, z.degree);
    if (prec(e, kOne)) {
      append_unique(r.witnesses, e);
    } else {
      append_unique(r.failing, e);
    }
  }
  if (r.failing.empty()) {
    r.kind = Route::Kind::Cut;
    return r;
  }
  if (p.monomial_law()) {
    const auto& ml = *p.monomial_law();
    for (std::size_t k = ml.monotone_from; k < ml.monotone_from + 64; ++k) {
      Monomial ratio = ml.mono(k + 1) / ml.mono(k) * r.v;
      if (prec(ratio, kOne)) {
        r.kind = Route::Kind::Law;
        r.law_index = k;
        r.witnesses = {ratio};
        return r;
      }
    }
  }
  return r;
}

}  // namespace

ConvReport conv_contains(const PowerSeries& p, const Series& delta, std::size_t prefix) {
  ConvReport rep;
  Route r = find_route(p, delta);
  switch (r.kind) {
    case Route::Kind::Zero:
      rep.verdict = ConvVerdict::CertifiedConvergent;
      rep.reason = "evaluation at zero";
      return rep;
    case Route::Kind::Polynomial:
      rep.verdict = ConvVerdict::CertifiedConvergent;
      rep.reason = "polynomial";
      return rep;
    case Route::Kind::Cut:
      rep.verdict = ConvVerdict::CertifiedConvergent;
      rep.witnesses = r.witnesses;
      rep.reason = "every certificate ratio times delta^degree is infinitesimal";
      return rep;
    case Route::Kind::Law:
      rep.verdict = ConvVerdict::CertifiedConvergent;
      rep.witnesses = r.witnesses;
      rep.reason = "coefficient ratio times delta is infinitesimal from index " +
                   std::to_string(r.law_index);
      return rep;
    case Route::Kind::None:
      break;
  }
  // Scan for terms P_k delta^k that fail to decrease over a window.
  auto lead = leading_prefix(p, prefix);
  rep.checked_prefix = lead.empty() ? 0 : static_cast<std::size_t>(lead.back().degree + 1);
  const std::size_t window = limits().divergence_window;
  std::vector<Monomial> run;
  for (std::size_t i = 0; i + 1 < lead.size(); ++i) {
    Monomial a = lead[i].mono * mono_ipow(r.v, lead[i].degree);
    Monomial b = lead[i + 1].mono * mono_ipow(r.v, lead[i + 1].degree);
    if (preceq(a, b)) {
      if (run.empty()) run.push_back(a);
      run.push_back(b);
      if (run.size() > window) {
        rep.verdict = ConvVerdict::CertifiedDivergent;
        rep.witnesses = run;
        rep.reason = "terms P_k delta^k do not decrease over " + std::to_string(window) +
                     " consecutive indices; offending ratio " + r.failing.front().str();
        return rep;
      }
    } else {
      run.clear();
    }
  }
  rep.witnesses = r.failing;
  rep.reason = "certificate ratio not infinitesimal at delta and no persistent growth found";
  return rep;
}

namespace {

// Items binom(k0+i, k0) P_{k0+i} delta^i for i = 0, 1, ...
class EvalFamily : public SeriesFamily {
 public:
  EvalFamily(PowerSeries p, Series delta, std::size_t k0,
             std::function<std::optional<Monomial>(std::size_t)> bound, Monomial shift)
      : p_(std::move(p)), delta_(std::move(delta)), k0_(k0), bound_(std::move(bound)),
        shift_(std::move(shift)), power_(Constant(1)) {}

  std::optional<Monomial> tail_bound() override {
    std::size_t n = k0_ + i_;
    if (p_.degree_bound() && n > *p_.degree_bound()) return std::nullopt;
    auto b = bound_(n);
    if (!b) return std::nullopt;
    return *b * shift_;
  }

  std::optional<Series> open() override {
    std::size_t n = k0_ + i_;
    Series c = p_.coeff(n);
    Series item;
    if (!is_known_zero(c)) {
      item = c * power_;
      if (k0_ > 0) item = scale(item, Constant(binomial(mpq_class(static_cast<long>(n)), k0_)));
    }
    Series next = power_ * delta_;
    power_ = next;
    ++i_;
    return item;
  }

 private:
  PowerSeries p_;
  Series delta_;
  std::size_t k0_;
  std::function<std::optional<Monomial>(std::size_t)> bound_;
  Monomial shift_;
  Series power_;
  std::size_t i_ = 0;
};

GridCertificate eval_certificate(const BiCertificate& c, const Series& delta, const Monomial& v,
                                 bool keep_infinitesimal_only) {
  GridCertificate g;
  for (const auto& b : c.bases) append_unique(g.bases, b.mono * mono_ipow(v, b.degree));
  for (const auto& z : c.ratios) {
    Monomial e = z.mono * mono_ipow(v, z.degree);
    if (keep_infinitesimal_only && !prec(e, kOne)) continue;
    append_unique(g.ratios, e);
  }
  auto dd = dominant_decompose(delta);
  for (const auto& e : infinitesimal_generators(dd.eps.certificate())) append_unique(g.ratios, e);
  return cert_prune(std::move(g));
}

Series finite_eval(const PowerSeries& p, const Series& delta) {
  std::vector<Series> items;
  Series power(Constant(1));
  for (std::size_t k = 0; k <= *p.degree_bound(); ++k) {
    Series c = p.coeff(k);
    if (!is_known_zero(c)) items.push_back(c * power);
    if (k < *p.degree_bound()) power = power * delta;
  }
  return sum_family(items);
}

Series route_eval(const PowerSeries& p, const Series& delta, const Route& r) {
  switch (r.kind) {
    case Route::Kind::Zero:
      return p.coeff(0);
    case Route::Kind::Polynomial:
      return finite_eval(p, delta);
    case Route::Kind::Cut: {
      BiCertificate cert = p.certificate();
      Monomial v = r.v;
      auto bound = [cert, v](std::size_t n) { return cert_tail_bound(cert, v, n); };
      return Series::from_family({}, std::make_unique<EvalFamily>(p, delta, 0, bound, Monomial()),
                                 eval_certificate(cert, delta, v, false));
    }
    case Route::Kind::Law: {
      MonomialLaw ml = *p.monomial_law();
      Monomial v = r.v;
      std::size_t kstar = r.law_index;
      auto term_mono = [ml, v](std::size_t k) { return ml.mono(k) * mono_ipow(v, static_cast<long>(k)); };
      auto bound = [term_mono, kstar](std::size_t n) -> std::optional<Monomial> {
        Monomial best = term_mono(n);
        for (std::size_t j = n + 1; j <= kstar; ++j) best = mono_max(best, term_mono(j));
        return best;
      };
      GridCertificate g = eval_certificate(p.certificate(), delta, v, true);
      Monomial top = *bound(0);
      g.bases = {top};
      append_unique(g.ratios, r.witnesses.front());
      return Series::from_family({}, std::make_unique<EvalFamily>(p, delta, 0, bound, Monomial()),
                                 cert_prune(std::move(g)));
    }
    case Route::Kind::None:
      break;
  }
  throw PreconditionError("no evaluation route");
}

}  // namespace

Series ps_eval(const PowerSeries& p, const Series& delta) {
  Route r = find_route(p, delta);
  if (r.kind == Route::Kind::None) throw EvaluationRefused(conv_contains(p, delta));
  return route_eval(p, delta, r);
}

PowerSeries ps_translate(const PowerSeries& p, const Series& eps) {
  Route r = find_route(p, eps);
  if (r.kind == Route::Kind::Zero) return p;
  if (r.kind == Route::Kind::Polynomial) {
    std::size_t d = *p.degree_bound();
    std::vector<Series> cs;
    for (std::size_t k = 0; k <= d; ++k) {
      std::vector<Series> items;
      Series power(Constant(1));
      for (std::size_t i = 0; k + i <= d; ++i) {
        Series c = p.coeff(k + i);
        if (!is_known_zero(c))
          items.push_back(scale(c * power, Constant(binomial(mpq_class(static_cast<long>(k + i)), k))));
        if (k + i < d) power = power * eps;
      }
      cs.push_back(sum_family(items));
    }
    return PowerSeries::polynomial(std::move(cs));
  }
  if (r.kind != Route::Kind::Cut)
    throw EvaluationRefused(conv_contains(p, eps));
  BiCertificate cert = p.certificate();
  Monomial v = r.v;
  BiCertificate out;
  for (const auto& b : cert.bases)
    for (long a = 0; a <= b.degree; ++a)
      append_unique_bi(out.bases, {b.mono * mono_ipow(v, a), b.degree - a});
  for (const auto& z : cert.ratios)
    for (long a = 0; a <= z.degree; ++a)
      append_unique_bi(out.ratios, {z.mono * mono_ipow(v, a), z.degree - a});
  auto dd = dominant_decompose(eps);
  for (const auto& g : infinitesimal_generators(dd.eps.certificate()))
    append_unique_bi(out.ratios, {g, 0});
  auto law = [p, eps, cert, v](std::size_t k) {
    Monomial shift = mono_ipow(v, -static_cast<long>(k));
    auto bound = [cert, v](std::size_t n) { return cert_tail_bound(cert, v, n); };
    return Series::from_family({}, std::make_unique<EvalFamily>(p, eps, k, bound, shift),
                               cert_scale(eval_certificate(cert, eps, v, false), shift));
  };
  return PowerSeries::from_law(law, std::move(out));
}

Series cut_eval(const PowerSeries& p, const Series& delta, const CutSpec& s) {
  auto m = cut_member(p, s);
  if (m.verdict != CutMembership::Verdict::Member)
    throw PreconditionError("series is not a certified member of the cut " + s.str());
  if (is_zero_safe(delta)) return p.coeff(0);
  Monomial v = delta.term(0)->mono;
  bool below = true;
  switch (s.kind()) {
    case CutSpec::Kind::All:
      below = false;
      break;
    case CutSpec::Kind::Empty:
      break;
    default:
      below = !s.contains(v);
      break;
  }
  if (!below) throw PreconditionError("delta is not below the cut " + s.str());
  Route r = find_route(p, delta);
  if (r.kind == Route::Kind::None || r.kind == Route::Kind::Law)
    throw PreconditionError("certificate ratios are not infinitesimal at delta");
  return route_eval(p, delta, r);
}

PowerSeries lift_coefficientwise(const OperatorHandle& op, const PowerSeries& p,
                                 const CutSpec& source, const CutSpec& target) {
  auto src = cut_member(p, source);
  if (src.verdict != CutMembership::Verdict::Member)
    throw PreconditionError("series is not a certified member of the source cut " + source.str());
  if (op.is_identity()) {
    auto tgt = cut_member(p, target);
    if (tgt.verdict != CutMembership::Verdict::Member)
      throw SummabilityViolation("series is not a member of the target cut " + target.str());
    return p;
  }
  auto law = [op, p](std::size_t k) {
    Series c = p.coeff(k);
    return is_known_zero(c) ? c : op.apply(c);
  };
  PowerSeries out;
  if (p.degree_bound()) {
    std::vector<Series> cs;
    for (std::size_t k = 0; k <= *p.degree_bound(); ++k) cs.push_back(law(k));
    out = PowerSeries::polynomial(std::move(cs));
  } else {
    BiCertificate c;
    for (const auto& b : p.certificate().bases) {
      GridCertificate g = op.apply(b.mono).certificate();
      for (const auto& m : g.bases) append_unique_bi(c.bases, {m, b.degree});
      for (const auto& z : g.ratios) append_unique_bi(c.ratios, {z, 0});
    }
    for (const auto& z : p.certificate().ratios) {
      Monomial d = op.dominant(z.mono);
      append_unique_bi(c.ratios, {d, z.degree});
      GridCertificate g = op.apply(z.mono).certificate();
      for (const auto& e : infinitesimal_generators(cert_scale(g, d.inverse())))
        append_unique_bi(c.ratios, {e, 0});
    }
    out = PowerSeries::from_law(law, std::move(c));
  }
  auto res = cut_member(out, target);
  if (res.verdict != CutMembership::Verdict::Member) {
    std::string w = res.failing_ratios.empty()
                        ? std::string("?")
                        : res.failing_ratios.front().mono.str() + "*X^" +
                              std::to_string(res.failing_ratios.front().degree);
    throw SummabilityViolation("lifted series leaves the target cut " + target.str() +
                               "; witness ratio " + w);
  }
  return out;
}

PowerSeries lift_derivation(const PowerSeries& p, const CutSpec& s) {
  auto src = cut_member(p, s);
  if (src.verdict != CutMembership::Verdict::Member)
    throw PreconditionError("series is not a certified member of the cut " + s.str());
  auto law = [p](std::size_t k) {
    Series c = p.coeff(k);
    return is_known_zero(c) ? c : derive(c);
  };
  PowerSeries out;
  if (p.degree_bound()) {
    std::vector<Series> cs;
    for (std::size_t k = 0; k <= *p.degree_bound(); ++k) cs.push_back(law(k));
    out = PowerSeries::polynomial(std::move(cs));
  } else {
    std::vector<Monomial> daggers;
    auto collect = [&daggers](const Monomial& m) {
      for (const auto& t : dagger(m).prefix(std::numeric_limits<std::size_t>::max()))
        append_unique(daggers, t.mono);
    };
    for (const auto& b : p.certificate().bases) collect(b.mono);
    for (const auto& z : p.certificate().ratios) collect(z.mono);
    BiCertificate c;
    c.ratios = p.certificate().ratios;
    for (const auto& b : p.certificate().bases)
      for (const auto& t : daggers) append_unique_bi(c.bases, {b.mono * t, b.degree});
    out = PowerSeries::from_law(law, std::move(c));
  }
  auto res = cut_member(out, s);
  if (res.verdict != CutMembership::Verdict::Member)
    throw SummabilityViolation("derived series leaves the cut " + s.str());
  return out;
}

}  // namespace transkit
