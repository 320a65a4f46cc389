#include "transkit/calculus.hpp"

#include <mutex>
#include <unordered_map>

#include "transkit/errors.hpp"
#include "transkit/limits.hpp"

namespace transkit {

namespace {

const Monomial kOne;

std::mutex g_dagger_mu;
std::unordered_map<Monomial, Series, MonomialHash>& dagger_cache() {
  static std::unordered_map<Monomial, Series, MonomialHash> cache;
  return cache;
}

std::vector<Term> all_terms(const Series& s) {
  return s.prefix(std::numeric_limits<std::size_t>::max());
}

}  // namespace

mpq_class factorial(std::size_t n) {
  mpz_class f;
  mpz_fac_ui(f.get_mpz_t(), n);
  return mpq_class(f);
}

mpq_class binomial(const mpq_class& r, std::size_t k) {
  mpq_class out = 1;
  for (std::size_t i = 0; i < k; ++i) out *= (r - static_cast<long>(i)) / mpq_class(static_cast<long>(i + 1));
  return out;
}

Series pre_log(const Monomial& m) { return Series::from_terms(pre_log_terms(m)); }

Series dagger(const Monomial& m) {
  if (m.is_one()) return Series();
  {
    std::lock_guard<std::mutex> lk(g_dagger_mu);
    auto it = dagger_cache().find(m);
    if (it != dagger_cache().end()) return it->second;
  }
  std::vector<Term> ts;
  for (const auto& [k, r] : m.log_powers()) {
    // (log_k)'/log_k = 1/(log_0 ... log_k)
    Monomial d;
    for (int i = 0; i <= k; ++i) d = d * Monomial::atom(i, -1);
    ts.push_back({Constant(r), d});
  }
  for (const auto& t : m.exp_arg())
    for (const auto& u : all_terms(dagger(t.mono))) ts.push_back({t.coeff * u.coeff, t.mono * u.mono});
  Series out = Series::from_terms(std::move(ts));
  std::lock_guard<std::mutex> lk(g_dagger_mu);
  dagger_cache().emplace(m, out);
  return out;
}

Series derive(const Series& s) {
  if (s.known_finite()) {
    std::vector<Term> ts;
    for (const auto& t : all_terms(s))
      for (const auto& u : all_terms(dagger(t.mono)))
        ts.push_back({t.coeff * u.coeff, t.mono * u.mono});
    return Series::from_terms(std::move(ts));
  }
  const auto& c = s.certificate();
  std::vector<Monomial> gens = c.bases;
  gens.insert(gens.end(), c.ratios.begin(), c.ratios.end());
  std::optional<Monomial> dmax;
  std::vector<Monomial> t0;
  for (const auto& g : gens) {
    for (const auto& u : all_terms(dagger(g))) {
      append_unique(t0, u.mono);
      if (!dmax || prec(*dmax, u.mono)) dmax = u.mono;
    }
  }
  if (!dmax) return Series();
  // A grid monomial below B picks up dagger(z) only if z divides it, and then
  // it is also at most top * z for the largest base top.
  struct Piece {
    Monomial cap;
    Monomial d;
  };
  std::vector<Piece> pieces;
  Monomial top = c.bases.front();
  for (const auto& b : c.bases)
    if (prec(top, b)) top = b;
  auto lead_of = [](const Monomial& g) -> std::optional<Monomial> {
    auto t = dagger(g).term(0);
    return t ? std::optional<Monomial>(t->mono) : std::nullopt;
  };
  for (const auto& b : c.bases)
    if (auto d = lead_of(b)) pieces.push_back({b, *d});
  for (const auto& z : c.ratios)
    if (auto d = lead_of(z)) pieces.push_back({top * z, *d});
  MonomialMap map;
  map.image = [](const Monomial& m) { return scale(dagger(m), Constant(1), m); };
  map.bound = [pieces](const Monomial& m) -> std::optional<Monomial> {
    std::optional<Monomial> out;
    for (const auto& p : pieces) {
      Monomial v = (prec(m, p.cap) ? m : p.cap) * p.d;
      if (!out || prec(*out, v)) out = v;
    }
    return out;
  };
  map.certificate = [t0](const GridCertificate& g) {
    GridCertificate out;
    for (const auto& b : g.bases)
      for (const auto& t : t0) append_unique(out.bases, b * t);
    out.ratios = g.ratios;
    return cert_prune(std::move(out));
  };
  return extend_strongly_linear(map, s);
}

Series nth_derivative(const Series& s, std::size_t n) {
  Series out = s;
  for (std::size_t i = 0; i < n; ++i) out = derive(out);
  return out;
}

Series log_series(const Series& s) {
  auto lt = s.term(0);
  if (!lt) throw DomainError("logarithm of zero");
  if (lt->coeff.sign() <= 0)
    throw DomainError("logarithm of a series with leading coefficient " + lt->coeff.str());
  auto lc = Constant::log(lt->coeff);
  if (!lc)
    throw PartialConstant("log(" + lt->coeff.str() + ") has no exact value; use the float backend");
  auto dd = dominant_decompose(s);
  Series out = pre_log(dd.d) + Series(*lc);
  if (is_known_zero(dd.eps)) return out;
  auto coeffs = [](std::size_t k) {
    if (k == 0) return Constant(0);
    return Constant(mpq_class(k % 2 ? 1 : -1, static_cast<long>(k)));
  };
  return out + geometric_substitute(coeffs, dd.eps);
}

Series exp_series(const Series& s) {
  auto large = s.terms_above(kOne, false, limits().exp_arg_terms);
  std::size_t idx = large.size();
  Constant c(0);
  auto t = s.term(idx);
  if (t && t->mono.is_one()) {
    c = t->coeff;
    ++idx;
  }
  auto ec = Constant::exp(c);
  if (!ec) throw PartialConstant("exp(" + c.str() + ") has no exact value; use the float backend");
  Monomial m = Monomial::exp_of(large);
  Series eps = s.tail(idx);
  if (is_known_zero(eps)) return Series::monomial(m, *ec);
  Series g = geometric_substitute([](std::size_t k) { return Constant(1 / factorial(k)); }, eps);
  return scale(g, *ec, m);
}

Series pow_series(const Series& s, const mpq_class& r) {
  if (r == 0) return Series(Constant(1));
  if (r == 1) return s;
  // Small integer powers of finite series by repeated squaring.
  if (r.get_den() == 1 && s.known_finite() && abs(r.get_num()) <= 64) {
    mpz_class n = r.get_num();
    if (n < 0) return invert(pow_series(s, mpq_class(-n)));
    unsigned long e = n.get_ui();
    Series base = s, acc(Constant(1));
    while (e) {
      if (e & 1) acc = acc * base;
      e >>= 1;
      if (e) base = base * base;
    }
    return acc;
  }
  auto dd = dominant_decompose(s);
  auto cr = Constant::pow(dd.c, r);
  if (!cr)
    throw PartialConstant("(" + dd.c.str() + ")^(" + rational_str(r) +
                          ") has no exact value; use the float backend");
  Monomial dr = dd.d.pow(r);
  if (is_known_zero(dd.eps)) return Series::monomial(dr, *cr);
  Series g = geometric_substitute([r](std::size_t k) { return Constant(binomial(r, k)); }, dd.eps);
  return scale(g, *cr, dr);
}

// ---- composition ----

struct CompositionHandle::State {
  Series g;
  bool identity = false;
  std::mutex mu;
  std::vector<Series> atoms;
  std::unordered_map<Monomial, Series, MonomialHash> monos;
  std::unordered_map<Monomial, Monomial, MonomialHash> doms;
  // Dominant monomials of log_k(g), k = 0, 1, ...
  std::vector<Monomial> atom_doms;
};

CompositionHandle::CompositionHandle(Series g) : st_(std::make_shared<State>()) {
  auto lt = g.term(0);
  if (!lt || mono_cmp(lt->mono, kOne) <= 0 || lt->coeff.sign() <= 0)
    throw PreconditionError("right composition needs a positive infinitely large argument");
  if (g.known_finite()) {
    auto ts = all_terms(g);
    st_->identity = ts.size() == 1 && ts[0].mono == Monomial::x() && ts[0].coeff.exact() &&
                    ts[0].coeff.is_one();
  }
  st_->g = g;
  st_->atoms.push_back(g);
}

const Series& CompositionHandle::g() const { return st_->g; }
bool CompositionHandle::identity() const { return st_->identity; }

Series CompositionHandle::atom(int k) const {
  while (true) {
    Series last;
    std::size_t have;
    {
      std::lock_guard<std::mutex> lk(st_->mu);
      if (static_cast<std::size_t>(k) < st_->atoms.size()) return st_->atoms[static_cast<std::size_t>(k)];
      last = st_->atoms.back();
      have = st_->atoms.size();
    }
    Series next = log_series(last);
    std::lock_guard<std::mutex> lk(st_->mu);
    if (st_->atoms.size() == have) st_->atoms.push_back(next);
  }
}

Series CompositionHandle::monomial(const Monomial& m) const {
  if (m.is_one()) return Series(Constant(1));
  if (st_->identity) return Series::monomial(m);
  {
    std::lock_guard<std::mutex> lk(st_->mu);
    auto it = st_->monos.find(m);
    if (it != st_->monos.end()) return it->second;
  }
  Series out(Constant(1));
  for (const auto& [k, r] : m.log_powers()) out = out * pow_series(atom(k), r);
  if (!m.exp_arg().empty()) {
    std::vector<Series> items;
    for (const auto& t : m.exp_arg()) items.push_back(scale(monomial(t.mono), t.coeff));
    out = out * exp_series(sum_family(items));
  }
  std::lock_guard<std::mutex> lk(st_->mu);
  return st_->monos.emplace(m, out).first->second;
}

Monomial CompositionHandle::dominant(const Monomial& m) const {
  if (st_->identity) return m;
  {
    std::lock_guard<std::mutex> lk(st_->mu);
    auto it = st_->doms.find(m);
    if (it != st_->doms.end()) return it->second;
  }
  Monomial d;
  if (m.pure_log()) {
    // log(c*d*(1+e)) is dominated by log(d) since d is infinitely large, so
    // no constant such as log(c) needs to be evaluated.
    std::lock_guard<std::mutex> lk(st_->mu);
    for (const auto& [k, r] : m.log_powers()) {
      while (static_cast<int>(st_->atom_doms.size()) <= k) {
        if (st_->atom_doms.empty()) {
          st_->atom_doms.push_back(st_->g.term(0)->mono);
          continue;
        }
        Monomial top;
        bool first = true;
        for (const auto& t : pre_log_terms(st_->atom_doms.back()))
          if (first || prec(top, t.mono)) top = t.mono, first = false;
        st_->atom_doms.push_back(top);
      }
      d = d * st_->atom_doms[k].pow(r);
    }
  } else {
    auto lt = monomial(m).term(0);
    if (!lt) throw SummabilityViolation("composed monomial " + m.str() + " vanished");
    d = lt->mono;
  }
  std::lock_guard<std::mutex> lk(st_->mu);
  return st_->doms.emplace(m, d).first->second;
}

GridCertificate CompositionHandle::certificate(const GridCertificate& c) const {
  if (st_->identity) return c;
  GridCertificate out;
  for (const auto& b : c.bases) out = cert_union(out, monomial(b).certificate());
  for (const auto& z : c.ratios) {
    auto dd = dominant_decompose(monomial(z));
    append_unique(out.ratios, dd.d);
    for (const auto& g : infinitesimal_generators(dd.eps.certificate())) append_unique(out.ratios, g);
  }
  return cert_prune(std::move(out));
}

Series compose(const Series& f, const CompositionHandle& h) {
  if (h.identity()) return f;
  if (f.known_finite()) {
    std::vector<Series> items;
    for (const auto& t : all_terms(f)) items.push_back(scale(h.monomial(t.mono), t.coeff));
    return sum_family(items);
  }
  MonomialMap map;
  map.image = [h](const Monomial& m) { return h.monomial(m); };
  map.bound = [h](const Monomial& m) -> std::optional<Monomial> { return h.dominant(m); };
  map.certificate = [h](const GridCertificate& c) { return h.certificate(c); };
  return extend_strongly_linear(map, f);
}

Series compose(const Series& f, const Series& g) { return compose(f, CompositionHandle(g)); }

namespace {

void compositions(std::size_t k, std::size_t n, std::vector<std::size_t>& cur,
                  std::vector<std::vector<std::size_t>>& out) {
  if (n == 0) {
    if (k == 0) out.push_back(cur);
    return;
  }
  for (std::size_t v = 1; v + (n - 1) <= k; ++v) {
    cur.push_back(v);
    compositions(k - v, n - 1, cur, out);
    cur.pop_back();
  }
}

}  // namespace

Series faa_di_bruno_coeff(const std::vector<Series>& f_at_g, const std::vector<Series>& g_derivs,
                          std::size_t k) {
  if (k > limits().faa_di_bruno_order)
    throw ResourceError("Faa di Bruno order " + std::to_string(k) + " exceeds bound " +
                        std::to_string(limits().faa_di_bruno_order));
  if (f_at_g.size() <= k || (k > 0 && g_derivs.size() <= k))
    throw PreconditionError("not enough derivatives supplied for order " + std::to_string(k));
  if (k == 0) return f_at_g[0];
  std::vector<Series> items;
  for (std::size_t n = 1; n <= k; ++n) {
    std::vector<std::vector<std::size_t>> comps;
    std::vector<std::size_t> cur;
    compositions(k, n, cur, comps);
    for (const auto& v : comps) {
      Series prod = scale(f_at_g[n], Constant(1 / factorial(n)));
      for (std::size_t vi : v) prod = prod * scale(g_derivs[vi], Constant(1 / factorial(vi)));
      items.push_back(prod);
    }
  }
  return sum_family(items);
}

}  // namespace transkit
