#include "transkit/series.hpp"

#include <algorithm>
#include <exception>
#include <mutex>

#include "transkit/errors.hpp"
#include "transkit/limits.hpp"

namespace transkit {

namespace detail {

class Generator {
 public:
  struct Step {
    enum class Kind { Emit, Progress, Done } kind = Kind::Progress;
    Term term;
  };
  virtual ~Generator() = default;
  // Must leave the generator consistent when a budget exception escapes.
  virtual Step step() = 0;
  virtual std::optional<Monomial> bound() = 0;
};

class Node {
 public:
  Node(std::vector<Term> ts, GridCertificate cert) : cache_(std::move(ts)), cert_(std::move(cert)) {}
  Node(std::unique_ptr<Generator> g, GridCertificate cert)
      : gen_(std::move(g)), cert_(std::move(cert)) {}

  Head peek(std::size_t i) {
    std::lock_guard<std::mutex> lk(mu_);
    if (poison_) std::rethrow_exception(poison_);
    Head h;
    if (i < cache_.size()) {
      h.kind = Head::Kind::Term;
      h.term = cache_[i];
      return h;
    }
    if (!gen_) return h;
    // Bounds only tighten, so a bound from before later child progress stays valid.
    if (!bound_valid_) {
      bound_ = gen_->bound();
      bound_valid_ = true;
    }
    const auto& b = bound_;
    if (!b) return h;
    h.kind = Head::Kind::Bound;
    h.term = {Constant(0), *b};
    return h;
  }

  bool advance() {
    std::lock_guard<std::mutex> lk(mu_);
    if (poison_) std::rethrow_exception(poison_);
    if (!gen_) return false;
    consume_step();
    bound_valid_ = false;
    Generator::Step st;
    try {
      st = gen_->step();
    } catch (const BudgetExceeded&) {
      throw;
    } catch (...) {
      poison_ = std::current_exception();
      gen_.reset();
      throw;
    }
    if (st.kind == Generator::Step::Kind::Emit) {
      if (!cache_.empty() && !prec(st.term.mono, cache_.back().mono)) {
        poison_ = std::make_exception_ptr(SummabilityViolation(
            "stream emitted " + st.term.mono.str() + " after " + cache_.back().mono.str()));
        gen_.reset();
        std::rethrow_exception(poison_);
      }
      cache_.push_back(std::move(st.term));
    } else if (st.kind == Generator::Step::Kind::Done) {
      gen_.reset();
    }
    return true;
  }

  std::optional<Term> force(std::size_t i) {
    BudgetScope scope;
    while (true) {
      {
        std::lock_guard<std::mutex> lk(mu_);
        if (poison_) std::rethrow_exception(poison_);
        if (i < cache_.size()) return cache_[i];
        if (!gen_) return std::nullopt;
      }
      advance();
    }
  }

  bool finished() {
    std::lock_guard<std::mutex> lk(mu_);
    return !gen_ && !poison_;
  }

  std::vector<Term> cached() {
    std::lock_guard<std::mutex> lk(mu_);
    return cache_;
  }

  const GridCertificate& certificate() const { return cert_; }

 private:
  std::mutex mu_;
  std::vector<Term> cache_;
  std::unique_ptr<Generator> gen_;
  std::exception_ptr poison_;
  GridCertificate cert_;
  std::optional<Monomial> bound_;
  bool bound_valid_ = false;
};

}  // namespace detail

using detail::Generator;
using detail::Node;

Series make_series(std::shared_ptr<Node> n) { return Series(std::move(n)); }

namespace {

const Monomial kOne;

Series from_gen(std::unique_ptr<Generator> g, GridCertificate cert) {
  return make_series(std::make_shared<Node>(std::move(g), std::move(cert)));
}

bool known_zero(const Series& s) { return s.known_finite() && s.peek(0).is_end(); }

std::vector<Term> sorted_terms(std::vector<Term> ts) {
  std::sort(ts.begin(), ts.end(),
            [](const Term& a, const Term& b) { return mono_cmp(a.mono, b.mono) > 0; });
  std::vector<Term> out;
  for (auto& t : ts) {
    if (!out.empty() && out.back().mono == t.mono)
      out.back().coeff += t.coeff;
    else
      out.push_back(std::move(t));
  }
  std::erase_if(out, [](const Term& t) { return t.coeff.is_zero(); });
  return out;
}

class ScaleGen : public Generator {
 public:
  ScaleGen(Series s, Constant c, Monomial m) : s_(std::move(s)), c_(std::move(c)), m_(std::move(m)) {}
  Step step() override {
    Head h = s_.peek(pos_);
    if (h.is_end()) return {Step::Kind::Done, {}};
    if (!h.is_term()) {
      s_.advance();
      return {};
    }
    ++pos_;
    return {Step::Kind::Emit, {c_ * h.term.coeff, m_ * h.term.mono}};
  }
  std::optional<Monomial> bound() override {
    Head h = s_.peek(pos_);
    if (h.is_end()) return std::nullopt;
    return m_ * h.term.mono;
  }

 private:
  Series s_;
  std::size_t pos_ = 0;
  Constant c_;
  Monomial m_;
};

class TailGen : public Generator {
 public:
  TailGen(Series s, std::size_t from) : s_(std::move(s)), pos_(from) {}
  Step step() override {
    Head h = s_.peek(pos_);
    if (h.is_end()) return {Step::Kind::Done, {}};
    if (!h.is_term()) {
      s_.advance();
      return {};
    }
    ++pos_;
    return {Step::Kind::Emit, h.term};
  }
  std::optional<Monomial> bound() override {
    Head h = s_.peek(pos_);
    if (h.is_end()) return std::nullopt;
    return h.term.mono;
  }

 private:
  Series s_;
  std::size_t pos_;
};

// Sum of a summable family: advances whichever lazy candidate could still
// contribute to the largest materialised monomial, then emits it.
class MergeSum : public Generator {
 public:
  MergeSum(std::vector<Series> initial, std::unique_ptr<SeriesFamily> fam) : fam_(std::move(fam)) {
    for (auto& s : initial) act_.push_back({std::move(s), 0, std::nullopt});
    if (!fam_) fam_done_ = true;
  }

  Step step() override {
    std::erase_if(act_, [](const Active& a) { return a.s.peek(a.pos).is_end(); });
    Scan sc = scan();
    if (!sc.lazy && !sc.mat) return {Step::Kind::Done, {}};
    if (sc.lazy && (!sc.mat || !prec(*sc.lazy, *sc.mat))) {
      if (sc.lazy_idx < 0) {
        auto item = fam_->open();
        if (item) act_.push_back({std::move(*item), 0, sc.tail});
      } else {
        act_[static_cast<std::size_t>(sc.lazy_idx)].s.advance();
      }
      return {};
    }
    Constant sum(0);
    for (auto& a : act_) {
      Head h = a.s.peek(a.pos);
      if (h.is_term() && h.term.mono == *sc.mat) {
        sum += h.term.coeff;
        ++a.pos;
      }
    }
    if (sum.is_zero()) return {};
    return {Step::Kind::Emit, {sum, *sc.mat}};
  }

  std::optional<Monomial> bound() override {
    Scan sc = scan();
    if (!sc.lazy) return sc.mat;
    if (!sc.mat) return sc.lazy;
    return mono_max(*sc.lazy, *sc.mat);
  }

 private:
  struct Active {
    Series s;
    std::size_t pos;
    std::optional<Monomial> declared;
  };
  struct Scan {
    std::optional<Monomial> lazy, mat, tail;
    long lazy_idx = -1;
  };

  Scan scan() {
    Scan sc;
    if (!fam_done_) {
      sc.tail = fam_->tail_bound();
      if (!sc.tail)
        fam_done_ = true;
      else
        sc.lazy = sc.tail;
    }
    for (std::size_t i = 0; i < act_.size(); ++i) {
      Head h = act_[i].s.peek(act_[i].pos);
      if (h.is_end()) continue;
      if (h.is_term()) {
        if (act_[i].declared && prec(*act_[i].declared, h.term.mono))
          throw SummabilityViolation("family item produced " + h.term.mono.str() +
                                     " above its declared bound " + act_[i].declared->str());
        if (!sc.mat || prec(*sc.mat, h.term.mono)) sc.mat = h.term.mono;
      } else if (!sc.lazy || prec(*sc.lazy, h.term.mono)) {
        sc.lazy = h.term.mono;
        sc.lazy_idx = static_cast<long>(i);
      }
    }
    return sc;
  }

  std::vector<Active> act_;
  std::unique_ptr<SeriesFamily> fam_;
  bool fam_done_ = false;
};

class RowFamily : public SeriesFamily {
 public:
  RowFamily(Series rows, Series other, Monomial other_top)
      : rows_(std::move(rows)), other_(std::move(other)), top_(std::move(other_top)) {}
  std::optional<Monomial> tail_bound() override {
    Head h = rows_.peek(pos_);
    if (h.is_end()) return std::nullopt;
    return h.term.mono * top_;
  }
  std::optional<Series> open() override {
    Head h = rows_.peek(pos_);
    if (h.is_end()) return std::nullopt;
    if (!h.is_term()) {
      rows_.advance();
      return std::nullopt;
    }
    Series item = scale(other_, h.term.coeff, h.term.mono);
    ++pos_;
    return item;
  }

 private:
  Series rows_, other_;
  Monomial top_;
  std::size_t pos_ = 0;
};

class TermwiseFamily : public SeriesFamily {
 public:
  TermwiseFamily(Series s, std::function<Series(const Monomial&)> image,
                 std::function<std::optional<Monomial>(const Monomial&)> bound, bool strict)
      : s_(std::move(s)), image_(std::move(image)), bound_(std::move(bound)), strict_(strict) {}
  std::optional<Monomial> tail_bound() override {
    Head h = s_.peek(pos_);
    if (h.is_end()) return std::nullopt;
    return bound_(h.term.mono);
  }
  std::optional<Series> open() override {
    Head h = s_.peek(pos_);
    if (h.is_end()) return std::nullopt;
    if (!h.is_term()) {
      s_.advance();
      return std::nullopt;
    }
    Series img = image_(h.term.mono);
    if (strict_) {
      auto lt = img.term(0);
      if (lt && !prec(lt->mono, h.term.mono))
        throw ContractionViolation("image of " + h.term.mono.str() + " contains " + lt->mono.str());
    }
    Series item = scale(img, h.term.coeff);
    ++pos_;
    return item;
  }

 private:
  Series s_;
  std::function<Series(const Monomial&)> image_;
  std::function<std::optional<Monomial>(const Monomial&)> bound_;
  bool strict_;
  std::size_t pos_ = 0;
};

class PowerFamily : public SeriesFamily {
 public:
  PowerFamily(std::function<Constant(std::size_t)> coeffs, Series eps, Monomial top)
      : coeffs_(std::move(coeffs)), eps_(std::move(eps)), top_(std::move(top)), power_(Constant(1)) {}
  std::optional<Monomial> tail_bound() override { return top_.pow(mpq_class(static_cast<long>(k_))); }
  std::optional<Series> open() override {
    Constant c = coeffs_(k_);
    Series item = c.is_zero() ? Series() : scale(power_, c);
    Series next = power_ * eps_;
    power_ = next;
    ++k_;
    return item;
  }

 private:
  std::function<Constant(std::size_t)> coeffs_;
  Series eps_;
  Monomial top_;
  Series power_;
  std::size_t k_ = 0;
};

class VerifyGen : public Generator {
 public:
  VerifyGen(Series s, GridCertificate cert, LevelConstraint lvl, std::size_t index)
      : s_(std::move(s)), cert_(std::move(cert)), lvl_(std::move(lvl)), index_(index) {}
  Step step() override {
    Head h = s_.peek(pos_);
    if (h.is_end()) return {Step::Kind::Done, {}};
    if (!h.is_term()) {
      s_.advance();
      return {};
    }
    if (grid_contains(cert_, h.term.mono, lvl_) == Membership::No)
      throw SummabilityViolation("item " + std::to_string(index_) + " contains " +
                                 h.term.mono.str() + " outside its declared grid at level " +
                                 std::to_string(lvl_.level));
    ++pos_;
    return {Step::Kind::Emit, h.term};
  }
  std::optional<Monomial> bound() override {
    Head h = s_.peek(pos_);
    if (h.is_end()) return std::nullopt;
    return h.term.mono;
  }

 private:
  Series s_;
  GridCertificate cert_;
  LevelConstraint lvl_;
  std::size_t index_;
  std::size_t pos_ = 0;
};

class LevelFamily : public SeriesFamily {
 public:
  LevelFamily(LazyFamily fam, Monomial top_base, std::optional<Monomial> gmax, bool verify)
      : fam_(std::move(fam)), top_(std::move(top_base)), gmax_(std::move(gmax)), verify_(verify) {}
  std::optional<Monomial> tail_bound() override {
    if (fam_.count && i_ >= *fam_.count) return std::nullopt;
    std::size_t lvl = fam_.level(i_);
    if (!gmax_) return top_;
    return top_ * gmax_->pow(mpq_class(static_cast<long>(lvl)));
  }
  std::optional<Series> open() override {
    if (fam_.count && i_ >= *fam_.count) return std::nullopt;
    std::size_t lvl = fam_.level(i_);
    if (i_ > 0 && lvl < last_level_)
      throw PreconditionError("family levels must be non-decreasing");
    Series it = fam_.item(i_);
    if (verify_)
      it = from_gen(std::make_unique<VerifyGen>(it, fam_.base, LevelConstraint{fam_.level_gens, lvl}, i_),
                    it.certificate());
    last_level_ = lvl;
    ++i_;
    return it;
  }

 private:
  LazyFamily fam_;
  Monomial top_;
  std::optional<Monomial> gmax_;
  bool verify_;
  std::size_t i_ = 0;
  std::size_t last_level_ = 0;
};

class IterFamily : public SeriesFamily {
 public:
  IterFamily(MonomialMap phi, std::function<Constant(std::size_t)> coeffs, Series s)
      : phi_(std::move(phi)), coeffs_(std::move(coeffs)) {
    its_.push_back(std::move(s));
  }
  std::optional<Monomial> tail_bound() override { return iterate(k_).upper_bound(); }
  std::optional<Series> open() override {
    Constant c = coeffs_(k_);
    Series item = c.is_zero() ? Series() : scale(iterate(k_), c);
    ++k_;
    return item;
  }

 private:
  const Series& iterate(std::size_t k) {
    while (its_.size() <= k) its_.push_back(extend_strongly_linear(phi_, its_.back()));
    return its_[k];
  }
  MonomialMap phi_;
  std::function<Constant(std::size_t)> coeffs_;
  std::vector<Series> its_;
  std::size_t k_ = 0;
};

}  // namespace

// ---- Series ----

Series::Series() : node_(std::make_shared<Node>(std::vector<Term>{}, GridCertificate{})) {}

Series::Series(const Constant& c) : Series(monomial(Monomial(), c)) {}

Series Series::x() { return monomial(Monomial::x()); }

Series Series::monomial(const Monomial& m, const Constant& c) {
  if (c.is_zero()) return Series();
  return make_series(std::make_shared<Node>(std::vector<Term>{{c, m}}, GridCertificate{{m}, {}}));
}

Series Series::from_terms(std::vector<Term> ts) {
  auto out = sorted_terms(std::move(ts));
  GridCertificate cert;
  for (const auto& t : out) cert.bases.push_back(t.mono);
  return make_series(std::make_shared<Node>(std::move(out), std::move(cert)));
}

Series Series::from_family(std::vector<Series> initial, std::unique_ptr<SeriesFamily> family,
                           GridCertificate cert) {
  std::erase_if(initial, [](const Series& s) { return known_zero(s); });
  if (!family) {
    if (initial.empty()) return Series();
    if (initial.size() == 1) return initial[0];
    bool finite = std::all_of(initial.begin(), initial.end(),
                              [](const Series& s) { return s.known_finite(); });
    if (finite) {
      std::vector<Term> all;
      for (const auto& s : initial) {
        auto ts = s.node_->cached();
        all.insert(all.end(), ts.begin(), ts.end());
      }
      return from_terms(std::move(all));
    }
  }
  return from_gen(std::make_unique<MergeSum>(std::move(initial), std::move(family)), std::move(cert));
}

Head Series::peek(std::size_t i) const { return node_->peek(i); }
bool Series::advance() const { return node_->advance(); }
std::optional<Term> Series::term(std::size_t i) const { return node_->force(i); }

std::vector<Term> Series::prefix(std::size_t n) const {
  BudgetScope scope;
  std::vector<Term> out;
  for (std::size_t i = 0; i < n; ++i) {
    auto t = term(i);
    if (!t) break;
    out.push_back(std::move(*t));
  }
  return out;
}

std::vector<Term> Series::terms_above(const Monomial& cutoff, bool inclusive,
                                      std::size_t max_terms) const {
  BudgetScope scope;
  std::vector<Term> out;
  std::size_t i = 0;
  while (true) {
    Head h = peek(i);
    if (h.is_end()) break;
    int c = mono_cmp(h.term.mono, cutoff);
    if (h.is_term()) {
      if (c > 0 || (inclusive && c == 0)) {
        if (out.size() >= max_terms)
          throw ResourceError("more than " + std::to_string(max_terms) + " terms above " +
                              cutoff.str());
        out.push_back(h.term);
        ++i;
        continue;
      }
      break;
    }
    if (c < 0 || (!inclusive && c == 0)) break;
    advance();
  }
  return out;
}

std::optional<Monomial> Series::upper_bound() const {
  Head h = peek(0);
  if (h.is_end()) return std::nullopt;
  return h.term.mono;
}

bool Series::known_finite() const { return node_->finished(); }
bool Series::is_zero() const { return !term(0).has_value(); }
const GridCertificate& Series::certificate() const { return node_->certificate(); }

Series Series::tail(std::size_t from) const {
  if (from == 0) return *this;
  if (known_finite()) {
    auto ts = node_->cached();
    if (from >= ts.size()) return Series();
    return from_terms(std::vector<Term>(ts.begin() + static_cast<long>(from), ts.end()));
  }
  return from_gen(std::make_unique<TailGen>(*this, from), certificate());
}

std::string Series::str(std::size_t n) const { return render(*this, n); }

// ---- arithmetic ----

bool is_known_zero(const Series& s) { return known_zero(s); }

Series operator+(const Series& a, const Series& b) {
  return Series::from_family({a, b}, nullptr, cert_union(a.certificate(), b.certificate()));
}

Series operator-(const Series& a) { return scale(a, Constant(-1)); }
Series operator-(const Series& a, const Series& b) { return a + (-b); }

Series scale(const Series& s, const Constant& c, const Monomial& m) {
  if (c.is_zero() || known_zero(s)) return Series();
  if (c.exact() && c.is_one() && m.is_one()) return s;
  if (s.known_finite()) {
    std::vector<Term> ts;
    for (const auto& t : s.prefix(std::numeric_limits<std::size_t>::max()))
      ts.push_back({c * t.coeff, m * t.mono});
    return Series::from_terms(std::move(ts));
  }
  return from_gen(std::make_unique<ScaleGen>(s, c, m), cert_scale(s.certificate(), m));
}

Series operator*(const Series& a, const Series& b) {
  if (known_zero(a) || known_zero(b)) return Series();
  if (a.known_finite() && b.known_finite()) {
    auto ta = a.prefix(std::numeric_limits<std::size_t>::max());
    auto tb = b.prefix(std::numeric_limits<std::size_t>::max());
    // Eager products count against the step budget too.
    for (std::size_t w = ta.size() * tb.size() / 16; w > 0; --w) consume_step();
    std::vector<Term> ts;
    ts.reserve(ta.size() * tb.size());
    for (const auto& x : ta)
      for (const auto& y : tb) ts.push_back({x.coeff * y.coeff, x.mono * y.mono});
    return Series::from_terms(std::move(ts));
  }
  const Series& rows = (!a.known_finite() && b.known_finite()) ? b : a;
  const Series& other = (&rows == &a) ? b : a;
  auto top = other.term(0);
  if (!top) return Series();
  return Series::from_family({}, std::make_unique<RowFamily>(rows, other, top->mono),
                             cert_product(a.certificate(), b.certificate()));
}

Series sum_family(const std::vector<Series>& items) {
  GridCertificate cert;
  for (const auto& s : items) cert = cert_union(cert, s.certificate());
  return Series::from_family(items, nullptr, cert);
}

Series sum_lazy(LazyFamily fam, bool verify) {
  for (const auto& g : fam.level_gens)
    if (!prec(g, kOne)) throw PreconditionError("level generator " + g.str() + " is not below 1");
  if (!fam.count && fam.level_gens.empty())
    throw PreconditionError("an infinite family needs level generators below 1");
  if (!fam.item || !fam.level) throw PreconditionError("family without item or level function");
  auto top = cert_top(fam.base);
  if (!top) return Series();
  std::optional<Monomial> gmax;
  for (const auto& g : fam.level_gens)
    if (!gmax || prec(*gmax, g)) gmax = g;
  GridCertificate cert = fam.base;
  for (const auto& g : fam.level_gens) append_unique(cert.ratios, g);
  return Series::from_family({}, std::make_unique<LevelFamily>(std::move(fam), *top, gmax, verify),
                             cert);
}

DominantDecomposition dominant_decompose(const Series& s) {
  auto lt = s.term(0);
  if (!lt) throw DomainError("dominant decomposition of zero");
  Constant ci = Constant(1) / lt->coeff;
  Monomial di = lt->mono.inverse();
  return {lt->coeff, lt->mono, scale(s.tail(1), ci, di)};
}

bool DominanceVerdict::holds(Relation r) const {
  switch (kind) {
    case Kind::Prec: return r == Relation::Prec || r == Relation::Preceq;
    case Kind::Succ: return r == Relation::Succ || r == Relation::Succeq;
    case Kind::Asymp:
      return r == Relation::Asymp || r == Relation::Preceq || r == Relation::Succeq;
    case Kind::Equiv: return r != Relation::Prec && r != Relation::Succ;
    case Kind::BothZero: return false;
  }
  return false;
}

std::string DominanceVerdict::str() const {
  switch (kind) {
    case Kind::Prec: return "prec";
    case Kind::Succ: return "succ";
    case Kind::Asymp: return "asymp";
    case Kind::Equiv: return "equiv";
    case Kind::BothZero: return "both-zero";
  }
  return "";
}

DominanceVerdict dominance(const Series& s, const Series& t) {
  using K = DominanceVerdict::Kind;
  auto ls = s.term(0);
  auto lt = t.term(0);
  if (!ls && !lt) return {K::BothZero};
  if (!ls) return {K::Prec};
  if (!lt) return {K::Succ};
  int c = mono_cmp(ls->mono, lt->mono);
  if (c < 0) return {K::Prec};
  if (c > 0) return {K::Succ};
  return {ls->coeff == lt->coeff ? K::Equiv : K::Asymp};
}

Series truncate_initial(const Series& s, const Monomial& cutoff) {
  return Series::from_terms(s.terms_above(cutoff));
}

Series geometric_substitute(const std::function<Constant(std::size_t)>& coeffs, const Series& eps) {
  if (known_zero(eps)) return Series(coeffs(0));
  // The exact dominant is needed: a loose bound may sit in a larger
  // Archimedean class and stall the power sum.
  auto lt = eps.term(0);
  if (!lt) return Series(coeffs(0));
  if (!prec(lt->mono, kOne))
    throw PreconditionError("substituted series has dominant monomial " + lt->mono.str() +
                            " which is not infinitesimal");
  Monomial top = lt->mono;
  GridCertificate cert{{kOne}, infinitesimal_generators(eps.certificate())};
  return Series::from_family({}, std::make_unique<PowerFamily>(coeffs, eps, top), cert);
}

Series invert(const Series& s) {
  if (s.is_zero()) throw DivisionByZero("inverse of zero series");
  auto dd = dominant_decompose(s);
  Constant ci = Constant(1) / dd.c;
  Monomial di = dd.d.inverse();
  if (known_zero(dd.eps)) return Series::monomial(di, ci);
  Series g = geometric_substitute([](std::size_t k) { return Constant(k % 2 ? -1 : 1); }, dd.eps);
  return scale(g, ci, di);
}

Series operator/(const Series& a, const Series& b) { return a * invert(b); }

namespace {

void verify_multiplicative(const MonomialMap& map, const Series& s) {
  std::vector<Monomial> sample;
  try {
    for (const auto& t : s.prefix(3)) append_unique(sample, t.mono);
  } catch (const BudgetExceeded&) {
  }
  const auto& c = s.certificate();
  for (std::size_t i = 0; i < c.bases.size() && i < 3; ++i) append_unique(sample, c.bases[i]);
  for (std::size_t i = 0; i < c.ratios.size() && i < 3; ++i) append_unique(sample, c.ratios[i]);
  for (std::size_t i = 0; i < sample.size(); ++i)
    for (std::size_t j = i; j < sample.size(); ++j) {
      auto ag = agree_to_terms(map.image(sample[i] * sample[j]),
                               map.image(sample[i]) * map.image(sample[j]), 6);
      if (!ag.equal)
        throw PreconditionError("map is not multiplicative on " + sample[i].str() + " and " +
                                sample[j].str());
    }
}

}  // namespace

Series extend_strongly_linear(const MonomialMap& map, const Series& s) {
  if (!map.certificate) throw PreconditionError("strongly linear map without a grid certificate");
  if (!map.image || !map.bound) throw PreconditionError("strongly linear map is incomplete");
  if (map.multiplicative) verify_multiplicative(map, s);
  GridCertificate cert = map.certificate(s.certificate());
  if (s.known_finite()) {
    std::vector<Series> items;
    for (const auto& t : s.prefix(std::numeric_limits<std::size_t>::max()))
      items.push_back(scale(map.image(t.mono), t.coeff));
    return Series::from_family(std::move(items), nullptr, cert);
  }
  return Series::from_family(
      {}, std::make_unique<TermwiseFamily>(s, map.image, map.bound, false), cert);
}

Series iterate_contracting(const MonomialMap& phi, const std::function<Constant(std::size_t)>& coeffs,
                           const Series& s) {
  if (!phi.contraction_ratios) throw PreconditionError("iteration needs contraction ratios");
  for (const auto& r : *phi.contraction_ratios)
    if (!prec(r, kOne)) throw ContractionViolation("contraction ratio " + r.str() + " is not below 1");
  const auto& c = s.certificate();
  std::vector<Monomial> gens = c.bases;
  gens.insert(gens.end(), c.ratios.begin(), c.ratios.end());
  for (const auto& g : gens) {
    auto lt = phi.image(g).term(0);
    if (lt && !prec(lt->mono, g))
      throw ContractionViolation("image of " + g.str() + " contains " + lt->mono.str() +
                                 " which is not below it");
  }
  auto ratios = *phi.contraction_ratios;
  MonomialMap checked = phi;
  checked.certificate = [ratios](const GridCertificate& g) {
    GridCertificate out = g;
    for (const auto& r : ratios) append_unique(out.ratios, r);
    return out;
  };
  auto image = phi.image;
  checked.image = [image](const Monomial& m) {
    Series img = image(m);
    auto lt = img.term(0);
    if (lt && !prec(lt->mono, m))
      throw ContractionViolation("image of " + m.str() + " contains " + lt->mono.str());
    return img;
  };
  checked.multiplicative = false;
  GridCertificate cert = c;
  for (const auto& r : ratios) append_unique(cert.ratios, r);
  return Series::from_family({}, std::make_unique<IterFamily>(checked, coeffs, s), cert);
}

namespace {

Agreement compare_lists(const std::vector<Term>& ta, const std::vector<Term>& tb) {
  Agreement ag;
  std::size_t n = std::max(ta.size(), tb.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (i >= ta.size() || i >= tb.size() || !(ta[i] == tb[i])) {
      ag.first_mismatch = i;
      ag.compared = i;
      std::string l = i < ta.size() ? format_term(ta[i]) : "<none>";
      std::string r = i < tb.size() ? format_term(tb[i]) : "<none>";
      ag.detail = "term " + std::to_string(i) + ": " + l + " vs " + r;
      return ag;
    }
  }
  ag.equal = true;
  ag.compared = n;
  return ag;
}

}  // namespace

Agreement agree_to_terms(const Series& a, const Series& b, std::size_t n) {
  try {
    auto ta = a.prefix(n);
    std::vector<Term> tb;
    if (ta.size() == n && n > 0)
      tb = b.terms_above(ta.back().mono, true);
    else
      tb = b.prefix(ta.size() + 1);
    return compare_lists(ta, tb);
  } catch (const BudgetExceeded& e) {
    Agreement ag;
    ag.detail = e.what();
    return ag;
  }
}

Agreement agree_above(const Series& a, const Series& b, const Monomial& cutoff) {
  try {
    return compare_lists(a.terms_above(cutoff, true), b.terms_above(cutoff, true));
  } catch (const BudgetExceeded& e) {
    Agreement ag;
    ag.detail = e.what();
    return ag;
  }
}

std::string render(const Series& s, std::size_t n) {
  std::vector<Term> ts;
  std::optional<Monomial> next;
  for (std::size_t i = 0; i <= n; ++i) {
    try {
      auto t = s.term(i);
      if (!t) break;
      if (i == n) {
        next = t->mono;
        break;
      }
      ts.push_back(std::move(*t));
    } catch (const BudgetExceeded&) {
      // Undecided cancellation: report the current bound instead.
      Head h = s.peek(i);
      if (!h.is_end()) next = h.term.mono;
      break;
    }
  }
  if (!next) return format_terms(ts);
  if (ts.empty()) return "O(" + next->str() + ")";
  return format_terms(ts) + " + O(" + next->str() + ")";
}

}  // namespace transkit
