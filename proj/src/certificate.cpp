#include "transkit/certificate.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <variant>

#include "transkit/errors.hpp"
#include "transkit/limits.hpp"

namespace transkit {

namespace {

using Key = std::variant<int, Monomial>;
using SparseVec = std::vector<std::pair<Key, mpq_class>>;

SparseVec coordinates(const Monomial& m) {
  SparseVec v;
  for (const auto& [k, r] : m.log_powers()) v.emplace_back(k, r);
  for (const auto& t : m.exp_arg()) v.emplace_back(t.mono, t.coeff.rational());
  return v;
}

std::size_t key_index(std::vector<Key>& keys, const Key& k) {
  for (std::size_t i = 0; i < keys.size(); ++i)
    if (keys[i] == k) return i;
  keys.push_back(k);
  return keys.size() - 1;
}

// Searches v in N^n with A v = rhs. Free variables are enumerated in a box,
// so a negative answer is only certain when the system has no free variable.
Membership solve_nat(std::vector<std::vector<mpq_class>> a, std::vector<mpq_class> rhs,
                     std::size_t n) {
  std::size_t rows = a.size();
  std::vector<int> pivot_col;
  std::size_t r = 0;
  for (std::size_t c = 0; c < n && r < rows; ++c) {
    std::size_t p = r;
    while (p < rows && a[p][c] == 0) ++p;
    if (p == rows) continue;
    std::swap(a[p], a[r]);
    std::swap(rhs[p], rhs[r]);
    mpq_class inv = 1 / a[r][c];
    for (auto& x : a[r]) x *= inv;
    rhs[r] *= inv;
    for (std::size_t q = 0; q < rows; ++q) {
      if (q == r || a[q][c] == 0) continue;
      mpq_class f = a[q][c];
      for (std::size_t j = 0; j < n; ++j) a[q][j] -= f * a[r][j];
      rhs[q] -= f * rhs[r];
    }
    pivot_col.push_back(static_cast<int>(c));
    ++r;
  }
  for (std::size_t q = r; q < rows; ++q)
    if (rhs[q] != 0) return Membership::No;
  std::vector<std::size_t> free;
  for (std::size_t c = 0; c < n; ++c)
    if (std::find(pivot_col.begin(), pivot_col.end(), static_cast<int>(c)) == pivot_col.end())
      free.push_back(c);
  if (free.size() > 3) return Membership::Unknown;
  const long cap = free.size() <= 1 ? 64 : (free.size() == 2 ? 24 : 10);
  std::vector<long> fv(free.size(), 0);
  while (true) {
    bool ok = true;
    for (std::size_t q = 0; q < r && ok; ++q) {
      mpq_class val = rhs[q];
      for (std::size_t f = 0; f < free.size(); ++f) val -= a[q][free[f]] * fv[f];
      if (val < 0 || val.get_den() != 1) ok = false;
    }
    if (ok) return Membership::Yes;
    std::size_t i = 0;
    while (i < fv.size() && ++fv[i] > cap) fv[i++] = 0;
    if (i == fv.size()) break;
  }
  return free.empty() ? Membership::No : Membership::Unknown;
}

}  // namespace

void append_unique(std::vector<Monomial>& v, const Monomial& m) {
  if (std::find(v.begin(), v.end(), m) == v.end()) v.push_back(m);
}

Membership grid_contains(const GridCertificate& c, const Monomial& m,
                         const std::optional<LevelConstraint>& level) {
  std::vector<Monomial> gens = c.ratios;
  std::size_t nlevel = level ? level->level_gens.size() : 0;
  if (level) gens.insert(gens.end(), level->level_gens.begin(), level->level_gens.end());
  std::size_t n = gens.size();
  bool unknown = false;
  for (const auto& b : c.bases) {
    Monomial target = m / b;
    if (n == 0) {
      if (target.is_one() && (!level || level->level == 0)) return Membership::Yes;
      continue;
    }
    std::vector<Key> keys;
    std::vector<SparseVec> cols;
    for (const auto& g : gens) {
      cols.push_back(coordinates(g));
      for (auto& e : cols.back()) key_index(keys, e.first);
    }
    SparseVec tv = coordinates(target);
    for (auto& e : tv) key_index(keys, e.first);
    std::size_t rows = keys.size() + (level ? 1 : 0);
    std::vector<std::vector<mpq_class>> a(rows, std::vector<mpq_class>(n, 0));
    std::vector<mpq_class> rhs(rows, 0);
    for (std::size_t j = 0; j < n; ++j)
      for (auto& e : cols[j]) a[key_index(keys, e.first)][j] = e.second;
    for (auto& e : tv) rhs[key_index(keys, e.first)] = e.second;
    if (level) {
      for (std::size_t j = n - nlevel; j < n; ++j) a[rows - 1][j] = 1;
      rhs[rows - 1] = static_cast<long>(level->level);
    }
    Membership res = solve_nat(std::move(a), std::move(rhs), n);
    if (res == Membership::Yes) return res;
    if (res == Membership::Unknown) unknown = true;
  }
  return unknown ? Membership::Unknown : Membership::No;
}

GridCertificate cert_union(const GridCertificate& a, const GridCertificate& b) {
  GridCertificate c = a;
  for (const auto& m : b.bases) append_unique(c.bases, m);
  for (const auto& m : b.ratios) append_unique(c.ratios, m);
  return cert_prune(std::move(c));
}

GridCertificate cert_product(const GridCertificate& a, const GridCertificate& b) {
  GridCertificate c;
  for (const auto& x : a.bases)
    for (const auto& y : b.bases) append_unique(c.bases, x * y);
  c.ratios = a.ratios;
  for (const auto& m : b.ratios) append_unique(c.ratios, m);
  return cert_prune(std::move(c));
}

GridCertificate cert_scale(const GridCertificate& a, const Monomial& m) {
  GridCertificate c = a;
  for (auto& b : c.bases) b = b * m;
  return c;
}

GridCertificate cert_prune(GridCertificate c) {
  std::vector<Monomial> ratios;
  for (const auto& r : c.ratios)
    if (!r.is_one()) append_unique(ratios, r);
  c.ratios = std::move(ratios);
  std::vector<Monomial> bases;
  for (const auto& b : c.bases) append_unique(bases, b);
  if (bases.size() > 1 && bases.size() <= 32 && !c.ratios.empty()) {
    std::vector<bool> drop(bases.size(), false);
    for (std::size_t i = 0; i < bases.size(); ++i) {
      for (std::size_t j = 0; j < bases.size(); ++j) {
        if (i == j || drop[j]) continue;
        if (grid_contains({{bases[j]}, c.ratios}, bases[i]) == Membership::Yes) {
          drop[i] = true;
          break;
        }
      }
    }
    std::vector<Monomial> kept;
    for (std::size_t i = 0; i < bases.size(); ++i)
      if (!drop[i]) kept.push_back(bases[i]);
    bases = std::move(kept);
  }
  c.bases = std::move(bases);
  return c;
}

std::vector<Monomial> infinitesimal_generators(const GridCertificate& c) {
  std::vector<Monomial> out;
  const Monomial one;
  for (const auto& b : c.bases) {
    if (prec(b, one)) {
      append_unique(out, b);
      continue;
    }
    // Breadth-first walk over exponent vectors until the product drops below 1.
    std::map<std::vector<unsigned>, bool> seen;
    std::deque<std::vector<unsigned>> queue;
    queue.push_back(std::vector<unsigned>(c.ratios.size(), 0));
    seen[queue.front()] = true;
    std::size_t visited = 0;
    while (!queue.empty()) {
      auto v = queue.front();
      queue.pop_front();
      if (++visited > limits().closure_limit)
        throw ResourceError("certificate normalisation exceeded the closure limit");
      Monomial m = b;
      for (std::size_t i = 0; i < v.size(); ++i)
        if (v[i]) m = m * c.ratios[i].pow(mpq_class(v[i]));
      if (prec(m, one)) {
        append_unique(out, m);
        continue;
      }
      for (std::size_t i = 0; i < v.size(); ++i) {
        auto w = v;
        ++w[i];
        if (!seen[w]) {
          seen[w] = true;
          queue.push_back(w);
        }
      }
    }
  }
  for (const auto& r : c.ratios) append_unique(out, r);
  return out;
}

std::optional<Monomial> cert_top(const GridCertificate& c) {
  std::optional<Monomial> top;
  for (const auto& b : c.bases)
    if (!top || prec(*top, b)) top = b;
  return top;
}

}  // namespace transkit
