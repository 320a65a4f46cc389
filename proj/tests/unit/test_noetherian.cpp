#include <gtest/gtest.h>

#include <algorithm>

#include "support.hpp"
#include "transkit/noetherian_lab.hpp"

using namespace tk_test;
using V = SequenceWitness::Verdict;

namespace {

// Bitmask enumeration of all index subsets, an oracle independent of the DFS.
std::vector<std::size_t> brute_bad(std::size_t n, const std::function<bool(std::size_t, std::size_t)>& leq,
                                   std::size_t max_len) {
  std::vector<std::size_t> best;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (1u << i)) idx.push_back(i);
    if (idx.size() < 2 || idx.size() > max_len) continue;
    bool bad = true;
    for (std::size_t a = 0; a < idx.size() && bad; ++a)
      for (std::size_t b = a + 1; b < idx.size() && bad; ++b)
        if (leq(idx[a], idx[b])) bad = false;
    if (!bad) continue;
    if (idx.size() > best.size() || (idx.size() == best.size() && idx < best)) best = idx;
  }
  return best;
}

FinitePoset random_poset(std::mt19937_64& rng, std::size_t n) {
  // Random DAG on a hidden permutation, then transitive closure.
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<std::vector<bool>> r(n, std::vector<bool>(n, false));
  std::bernoulli_distribution coin(0.35);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (coin(rng)) r[perm[i]][perm[j]] = true;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (r[i][k] && r[k][j]) r[i][j] = true;
  std::vector<std::string> labels;
  std::set<std::pair<std::size_t, std::size_t>> less;
  for (std::size_t i = 0; i < n; ++i) {
    labels.push_back("e" + std::to_string(i));
    for (std::size_t j = 0; j < n; ++j)
      if (r[i][j]) less.insert({i, j});
  }
  return FinitePoset(labels, less);
}

}  // namespace

TEST(Noetherian, PosetValidation) {
  EXPECT_THROW(FinitePoset({"a", "a"}, {}), InvalidInput);
  EXPECT_THROW(FinitePoset({"a"}, {{0, 0}}), InvalidInput);
  EXPECT_THROW(FinitePoset({"a", "b", "c"}, {{0, 1}, {1, 2}}), InvalidInput);
  EXPECT_THROW(FinitePoset({"a", "b"}, {{0, 1}, {1, 0}}), InvalidInput);
  FinitePoset p({"a", "b", "c"}, {{0, 1}, {1, 2}, {0, 2}});
  EXPECT_EQ(p.index("c"), 2u);
  EXPECT_THROW(p.index("d"), InvalidInput);
}

TEST(Noetherian, BadSequenceExamples) {
  FinitePoset anti({"a", "b"}, {});
  auto w = find_bad_sequence(anti, {"a", "b", "a"}, 2);
  EXPECT_EQ(w.verdict, V::BadSequenceFound);
  EXPECT_EQ(w.indices, (std::vector<std::size_t>{0, 1}));
  FinitePoset chain({"a", "b", "c"}, {{0, 1}, {1, 2}, {0, 2}});
  EXPECT_EQ(find_bad_sequence(chain, {"a", "b", "c"}, 3).verdict, V::NoneUpToBound);
  auto c = find_bad_sequence(chain, {"c", "a"}, 3);
  EXPECT_EQ(c.verdict, V::BadSequenceFound);
  EXPECT_EQ(c.indices, (std::vector<std::size_t>{0, 1}));
  FinitePoset one({"a"}, {});
  EXPECT_EQ(find_bad_sequence(one, {"a", "a"}, 2).verdict, V::NoneUpToBound);
  EXPECT_THROW(find_bad_sequence(one, {"z"}, 2), InvalidInput);
}

TEST(Noetherian, WeaklyIncreasingHasNoBadPair) {
  FinitePoset chain({"a", "b", "c", "d"}, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}});
  std::mt19937_64 rng(5);
  for (int t = 0; t < 20; ++t) {
    std::vector<std::string> seq;
    for (int i = 0; i < 7; ++i) seq.push_back(chain.labels()[rng() % 4]);
    std::sort(seq.begin(), seq.end());
    EXPECT_EQ(find_bad_sequence(chain, seq, 6).verdict, V::NoneUpToBound);
  }
}

TEST(Noetherian, BadSequenceMatchesBruteForce) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 40; ++t) {
    FinitePoset p = random_poset(rng, 2 + rng() % 5);
    std::vector<std::string> seq;
    std::vector<std::size_t> pos;
    std::size_t n = 3 + rng() % 6;
    for (std::size_t i = 0; i < n; ++i) {
      pos.push_back(rng() % p.size());
      seq.push_back(p.labels()[pos.back()]);
    }
    auto leq = [&](std::size_t i, std::size_t j) { return p.leq(pos[i], pos[j]); };
    auto expect = brute_bad(n, leq, 6);
    auto got = find_bad_sequence(p, seq, 6);
    if (expect.empty()) {
      EXPECT_EQ(got.verdict, V::NoneUpToBound);
    } else {
      EXPECT_EQ(got.verdict, V::BadSequenceFound);
      EXPECT_EQ(got.indices, expect);
    }
  }
}

TEST(Noetherian, ProductExamples) {
  auto less = asymptotic_order();
  auto a = check_product_noetherian({xp(-1)}, {xp(-1), xp(-2)}, less);
  EXPECT_TRUE(a.ok) << a.detail;
  EXPECT_EQ(a.products, (std::vector<Monomial>{xp(-2), xp(-3)}));
  for (const auto& f : a.fibers) EXPECT_EQ(f.size(), 1u);
  auto b = check_product_noetherian({xp(-1), xp(-2)}, {xp(-1), xp(-2)}, less);
  ASSERT_EQ(b.products.size(), 3u);
  EXPECT_EQ(b.products[1], xp(-3));
  EXPECT_EQ(b.fibers[1].size(), 2u);
  auto c = check_product_noetherian({Monomial()}, {Monomial()}, less);
  EXPECT_EQ(c.products, (std::vector<Monomial>{Monomial()}));
  EXPECT_EQ(c.fibers[0].size(), 1u);
}

TEST(Noetherian, ProductFibersMatchPairCounts) {
  SeriesGen gen(21);
  auto less = asymptotic_order();
  for (int t = 0; t < 15; ++t) {
    std::vector<Monomial> s, u;
    for (std::size_t i = 0; i < 1 + gen.pick(4); ++i) append_unique(s, gen.small_monomial());
    for (std::size_t i = 0; i < 1 + gen.pick(4); ++i) append_unique(u, gen.any_monomial());
    auto r = check_product_noetherian(s, u, less);
    EXPECT_TRUE(r.ok) << r.detail;
    std::size_t total = 0;
    for (std::size_t i = 0; i < r.products.size(); ++i) {
      std::size_t count = 0;
      for (const auto& a : s)
        for (const auto& b : u)
          if (a * b == r.products[i]) ++count;
      EXPECT_EQ(r.fibers[i].size(), count);
      total += count;
    }
    EXPECT_EQ(total, s.size() * u.size());
  }
}

TEST(Noetherian, StarClosureExamples) {
  auto less = asymptotic_order();
  auto a = check_star_closure({xp(-1)}, less, 4);
  EXPECT_TRUE(a.ok) << a.detail;
  ASSERT_EQ(a.elements.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(a.elements[i], xp(-static_cast<long>(i)));
    EXPECT_EQ(a.levels[i], (std::vector<std::size_t>{i}));
  }
  auto b = check_star_closure({xp(-1), xp(-1) * lg(1)}, less, 3);
  EXPECT_TRUE(b.ok) << b.detail;
  for (std::size_t i = 0; i + 1 < b.elements.size(); ++i) EXPECT_TRUE(prec(b.elements[i + 1], b.elements[i]));
  auto c = check_star_closure({xp(-1), ex(-X())}, less, 3);
  EXPECT_TRUE(c.ok) << c.detail;
  auto it = std::find(c.elements.begin(), c.elements.end(), xp(-1) * ex(-X()));
  ASSERT_NE(it, c.elements.end());
  EXPECT_EQ(c.fiber_sizes[it - c.elements.begin()], 2u);
  EXPECT_THROW(check_star_closure({xp(1)}, less, 3), PreconditionError);
  EXPECT_THROW(check_star_closure({Monomial()}, less, 3), PreconditionError);
}

TEST(Noetherian, StarClosureSize) {
  auto less = asymptotic_order();
  for (std::size_t d = 0; d <= 6; ++d) EXPECT_EQ(check_star_closure({xp(-1)}, less, d).elements.size(), d + 1);
}

TEST(Noetherian, HigmanOnRandomPosets) {
  std::mt19937_64 rng(29);
  for (int t = 0; t < 15; ++t) {
    FinitePoset p = random_poset(rng, 2 + rng() % 3);
    FinitePoset q = random_poset(rng, 2 + rng() % 3);
    auto r = check_product_poset(p, q);
    EXPECT_TRUE(r.ok) << r.detail;
    EXPECT_TRUE(r.order_valid);
    EXPECT_TRUE(r.witnesses_agree);
    auto s = check_star_poset(p, 3);
    EXPECT_TRUE(s.ok) << s.detail;
  }
}
