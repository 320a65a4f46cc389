#include "transkit/noetherian_lab.hpp"

#include <algorithm>

#include "transkit/certificate.hpp"
#include "transkit/errors.hpp"

namespace transkit {

FinitePoset::FinitePoset(std::vector<std::string> labels,
                         std::set<std::pair<std::size_t, std::size_t>> less)
    : labels_(std::move(labels)), less_(std::move(less)) {
  std::set<std::string> seen(labels_.begin(), labels_.end());
  if (seen.size() != labels_.size()) throw InvalidInput("duplicate poset labels");
  for (const auto& [a, b] : less_) {
    if (a >= labels_.size() || b >= labels_.size()) throw InvalidInput("relation index out of range");
    if (a == b) throw InvalidInput("relation is not irreflexive at " + labels_[a]);
    for (const auto& [c, d] : less_)
      if (c == b && !less_.count({a, d}))
        throw InvalidInput("relation is not transitive at " + labels_[a] + " < " + labels_[b] +
                           " < " + labels_[d]);
  }
}

std::size_t FinitePoset::index(const std::string& label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) throw InvalidInput("element not in poset: " + label);
  return static_cast<std::size_t>(it - labels_.begin());
}

SequenceWitness find_bad_sequence(std::size_t n,
                                  const std::function<bool(std::size_t, std::size_t)>& leq,
                                  std::size_t max_len) {
  if (max_len < 1) throw InvalidInput("max_len must be at least 1");
  SequenceWitness w;
  std::vector<std::size_t> cur;
  std::vector<std::size_t> best;
  // Depth-first in lexicographic order; the first sequence reaching a new
  // maximal length is the lexicographically first of that length.
  std::function<bool(std::size_t)> dfs = [&](std::size_t from) {
    for (std::size_t j = from; j < n; ++j) {
      bool ok = std::none_of(cur.begin(), cur.end(), [&](std::size_t i) { return leq(i, j); });
      if (!ok) continue;
      cur.push_back(j);
      if (cur.size() > best.size()) best = cur;
      if (cur.size() >= max_len) return true;
      if (dfs(j + 1)) return true;
      cur.pop_back();
    }
    return false;
  };
  dfs(0);
  if (best.size() >= 2) {
    w.verdict = SequenceWitness::Verdict::BadSequenceFound;
    w.indices = best;
  }
  return w;
}

SequenceWitness find_bad_sequence(const FinitePoset& p, const std::vector<std::string>& seq,
                                  std::size_t max_len) {
  std::vector<std::size_t> idx;
  for (const auto& s : seq) idx.push_back(p.index(s));
  return find_bad_sequence(
      idx.size(), [&](std::size_t i, std::size_t j) { return p.leq(idx[i], idx[j]); }, max_len);
}

MonomialOrder asymptotic_order() {
  return [](const Monomial& a, const Monomial& b) { return prec(a, b); };
}

namespace {

// Largest first; ties keep input order.
std::vector<Monomial> sorted_desc(std::vector<Monomial> v, const MonomialOrder& less) {
  std::stable_sort(v.begin(), v.end(),
                   [&](const Monomial& a, const Monomial& b) { return less(b, a); });
  return v;
}

// Noetherian orientation: u is below-or-equal v when u is not below v.
std::function<bool(std::size_t, std::size_t)> noetherian_leq(const std::vector<Monomial>& v,
                                                             const MonomialOrder& less) {
  return [&v, &less](std::size_t i, std::size_t j) { return !less(v[i], v[j]); };
}

bool strict_order_valid(const std::vector<Monomial>& v, const MonomialOrder& less,
                        std::string& detail) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (less(v[i], v[i])) {
      detail = "comparator not irreflexive at " + v[i].str();
      return false;
    }
    for (std::size_t j = 0; j < v.size(); ++j) {
      if (!less(v[i], v[j])) continue;
      if (less(v[j], v[i])) {
        detail = "comparator not asymmetric";
        return false;
      }
      for (std::size_t k = 0; k < v.size(); ++k)
        if (less(v[j], v[k]) && !less(v[i], v[k])) {
          detail = "comparator not transitive";
          return false;
        }
    }
  }
  return true;
}

}  // namespace

ProductReport check_product_noetherian(const std::vector<Monomial>& s,
                                       const std::vector<Monomial>& t, const MonomialOrder& less,
                                       std::size_t max_len) {
  ProductReport r;
  auto ss = sorted_desc(s, less);
  auto ts = sorted_desc(t, less);
  std::vector<Monomial> seq;
  std::vector<std::pair<Monomial, Monomial>> pairs;
  for (const auto& u : ss)
    for (const auto& v : ts) {
      seq.push_back(u * v);
      pairs.emplace_back(u, v);
    }
  std::vector<Monomial> distinct;
  for (const auto& m : seq) append_unique(distinct, m);
  r.products = sorted_desc(distinct, less);
  for (const auto& m : r.products) {
    std::vector<std::pair<Monomial, Monomial>> fib;
    for (std::size_t i = 0; i < seq.size(); ++i)
      if (seq[i] == m) fib.push_back(pairs[i]);
    r.fibers.push_back(std::move(fib));
  }
  std::string detail;
  if (!strict_order_valid(seq, less, detail)) {
    r.detail = detail;
    return r;
  }
  // Row-major enumeration: an increasing subsequence takes at most one
  // element per row.
  r.bad = find_bad_sequence(seq.size(), noetherian_leq(seq, less), max_len);
  std::size_t bound = std::max<std::size_t>(1, ss.size());
  if (r.bad.indices.size() > bound) {
    r.detail = "bad sequence longer than the number of rows";
    return r;
  }
  std::size_t total = 0;
  for (const auto& f : r.fibers) total += f.size();
  r.ok = total == seq.size();
  r.detail = r.ok ? "ok" : "fibers do not partition the pairs";
  return r;
}

StarReport check_star_closure(const std::vector<Monomial>& s, const MonomialOrder& less,
                              std::size_t depth, std::size_t max_len) {
  for (const auto& m : s)
    if (!less(m, Monomial())) throw PreconditionError("star closure needs elements below 1: " + m.str());
  StarReport r;
  std::vector<std::vector<std::size_t>> levels;
  std::vector<std::size_t> counts;
  std::vector<Monomial> elems;
  std::vector<Monomial> layer = {Monomial()};
  auto record = [&](const Monomial& m, std::size_t n) {
    auto it = std::find(elems.begin(), elems.end(), m);
    std::size_t i = static_cast<std::size_t>(it - elems.begin());
    if (it == elems.end()) {
      elems.push_back(m);
      levels.emplace_back();
      counts.push_back(0);
    }
    if (std::find(levels[i].begin(), levels[i].end(), n) == levels[i].end()) levels[i].push_back(n);
    ++counts[i];
  };
  record(Monomial(), 0);
  for (std::size_t n = 1; n <= depth; ++n) {
    std::vector<Monomial> next;
    for (const auto& w : layer)
      for (const auto& g : s) {
        Monomial m = w * g;
        next.push_back(m);
        record(m, n);
      }
    layer = std::move(next);
  }
  auto order = sorted_desc(elems, less);
  for (const auto& m : order) {
    std::size_t i = static_cast<std::size_t>(std::find(elems.begin(), elems.end(), m) - elems.begin());
    r.elements.push_back(m);
    r.levels.push_back(levels[i]);
    r.fiber_sizes.push_back(counts[i]);
  }
  std::string detail;
  if (!strict_order_valid(r.elements, less, detail)) {
    r.detail = detail;
    return r;
  }
  r.bad = find_bad_sequence(r.elements.size(), noetherian_leq(r.elements, less), max_len);
  if (r.bad.verdict == SequenceWitness::Verdict::BadSequenceFound) {
    r.detail = "increasing pair among the decreasing enumeration";
    return r;
  }
  r.ok = true;
  r.detail = "ok";
  return r;
}

namespace {

bool quasi_order_valid(std::size_t n, const std::function<bool(std::size_t, std::size_t)>& leq) {
  for (std::size_t i = 0; i < n; ++i) {
    if (!leq(i, i)) return false;
    for (std::size_t j = 0; j < n; ++j) {
      if (!leq(i, j)) continue;
      if (i != j && leq(j, i)) return false;
      for (std::size_t k = 0; k < n; ++k)
        if (leq(j, k) && !leq(i, k)) return false;
    }
  }
  return true;
}

std::size_t longest_bad(const FinitePoset& p, std::size_t max_len) {
  std::size_t n = p.size();
  auto w = find_bad_sequence(n, [&](std::size_t i, std::size_t j) { return p.leq(i, j); }, max_len);
  return w.indices.empty() ? (n > 0 ? 1 : 0) : w.indices.size();
}

HigmanReport finish(std::size_t n, const std::function<bool(std::size_t, std::size_t)>& leq,
                    const std::vector<std::string>& labels, std::size_t factor_bad,
                    std::size_t max_len) {
  HigmanReport r;
  r.longest_bad_factors = factor_bad;
  r.order_valid = quasi_order_valid(n, leq);
  if (!r.order_valid) {
    r.detail = "induced relation is not a partial order";
    return r;
  }
  std::set<std::pair<std::size_t, std::size_t>> rel;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && leq(i, j)) rel.insert({i, j});
  FinitePoset explicit_order(labels, rel);
  auto direct = find_bad_sequence(n, leq, max_len);
  auto via = find_bad_sequence(explicit_order, labels, max_len);
  r.witnesses_agree = direct.verdict == via.verdict && direct.indices == via.indices;
  r.longest_bad = direct.indices.empty() ? (n > 0 ? 1 : 0) : direct.indices.size();
  bool lifts = r.longest_bad >= std::min(factor_bad, max_len);
  r.ok = r.witnesses_agree && lifts;
  r.detail = !r.witnesses_agree ? "explicit and direct searches disagree"
             : !lifts           ? "bad sequence of a factor does not lift"
                                : "ok";
  return r;
}

}  // namespace

HigmanReport check_product_poset(const FinitePoset& p, const FinitePoset& q, std::size_t max_len) {
  std::vector<std::pair<std::size_t, std::size_t>> elems;
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < q.size(); ++j) {
      elems.emplace_back(i, j);
      labels.push_back("(" + p.labels()[i] + "," + q.labels()[j] + ")");
    }
  auto leq = [&](std::size_t a, std::size_t b) {
    return p.leq(elems[a].first, elems[b].first) && q.leq(elems[a].second, elems[b].second);
  };
  std::size_t factor = std::max(longest_bad(p, max_len), longest_bad(q, max_len));
  return finish(elems.size(), leq, labels, factor, max_len);
}

namespace {

// Word a embeds into word b as a subsequence with letterwise leq.
bool embeds(const FinitePoset& p, const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  std::size_t i = 0;
  for (std::size_t j = 0; j < b.size() && i < a.size(); ++j)
    if (p.leq(a[i], b[j])) ++i;
  return i == a.size();
}

}  // namespace

HigmanReport check_star_poset(const FinitePoset& p, std::size_t depth, std::size_t max_len) {
  // Words in shortlex order, capped to keep the search desk-sized.
  const std::size_t cap = 40;
  std::vector<std::vector<std::size_t>> words = {{}};
  std::vector<std::vector<std::size_t>> layer = {{}};
  for (std::size_t n = 1; n <= depth && words.size() < cap; ++n) {
    std::vector<std::vector<std::size_t>> next;
    for (const auto& w : layer)
      for (std::size_t a = 0; a < p.size(); ++a) {
        auto v = w;
        v.push_back(a);
        next.push_back(v);
      }
    for (const auto& w : next)
      if (words.size() < cap) words.push_back(w);
    layer = std::move(next);
  }
  std::vector<std::string> labels;
  for (const auto& w : words) {
    std::string s = "[";
    for (std::size_t i = 0; i < w.size(); ++i) s += (i ? " " : "") + p.labels()[w[i]];
    labels.push_back(s + "]");
  }
  auto leq = [&](std::size_t a, std::size_t b) { return embeds(p, words[a], words[b]); };
  return finish(words.size(), leq, labels, longest_bad(p, max_len), max_len);
}

}  // namespace transkit
