#pragma once

#include <functional>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "transkit/monomial.hpp"

namespace transkit {

// A finite strict partial order on labelled elements.
class FinitePoset {
 public:
  // Throws InvalidInput on duplicate labels or a relation that is not
  // irreflexive and transitive.
  FinitePoset(std::vector<std::string> labels, std::set<std::pair<std::size_t, std::size_t>> less);
  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  std::size_t index(const std::string& label) const;
  bool less(std::size_t a, std::size_t b) const { return less_.count({a, b}) > 0; }
  bool leq(std::size_t a, std::size_t b) const { return a == b || less(a, b); }

 private:
  std::vector<std::string> labels_;
  std::set<std::pair<std::size_t, std::size_t>> less_;
};

struct SequenceWitness {
  enum class Verdict { BadSequenceFound, NoneUpToBound } verdict = Verdict::NoneUpToBound;
  // Positions in the input sequence.
  std::vector<std::size_t> indices;
};

// Searches subsequences of length 2..max_len (positions increasing) in which
// no earlier element is below or equal to a later one. Returns the
// lexicographically first such subsequence of maximal length.
SequenceWitness find_bad_sequence(const FinitePoset& p, const std::vector<std::string>& seq,
                                  std::size_t max_len);
// Same search for an arbitrary quasi-order given as a predicate on positions.
SequenceWitness find_bad_sequence(std::size_t n,
                                  const std::function<bool(std::size_t, std::size_t)>& leq,
                                  std::size_t max_len);

// Strict order on monomials; true when a is below b.
using MonomialOrder = std::function<bool(const Monomial&, const Monomial&)>;
// The asymptotic order.
MonomialOrder asymptotic_order();

struct ProductReport {
  bool ok = false;
  // Distinct products in decreasing order.
  std::vector<Monomial> products;
  std::vector<std::vector<std::pair<Monomial, Monomial>>> fibers;
  SequenceWitness bad;
  std::string detail;
};
ProductReport check_product_noetherian(const std::vector<Monomial>& s,
                                       const std::vector<Monomial>& t, const MonomialOrder& less,
                                       std::size_t max_len = 6);

struct StarReport {
  bool ok = false;
  std::vector<Monomial> elements;
  // For each element, the word lengths n with the element in S^n.
  std::vector<std::vector<std::size_t>> levels;
  // For each element, the ordered factorisations (words) producing it.
  std::vector<std::size_t> fiber_sizes;
  SequenceWitness bad;
  std::string detail;
};
// Throws PreconditionError if some element is not below 1.
StarReport check_star_closure(const std::vector<Monomial>& s, const MonomialOrder& less,
                              std::size_t depth = 5, std::size_t max_len = 6);

// Finite-scale Higman checks on abstract posets.
struct HigmanReport {
  bool ok = false;
  bool order_valid = false;
  bool witnesses_agree = false;
  std::size_t longest_bad = 0;
  std::size_t longest_bad_factors = 0;
  std::string detail;
};
// Componentwise order on P x Q.
HigmanReport check_product_poset(const FinitePoset& p, const FinitePoset& q, std::size_t max_len = 6);
// Subword embedding order on words over P of length at most depth.
HigmanReport check_star_poset(const FinitePoset& p, std::size_t depth = 5, std::size_t max_len = 6);

}  // namespace transkit
