#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "transkit/certificate.hpp"
#include "transkit/monomial.hpp"

namespace transkit {

namespace detail {
class Node;
}

// Non-forcing view of position i of a stream: a materialised term, an upper
// bound on the monomials of all terms from i on, or the end of the stream.
struct Head {
  enum class Kind { Term, Bound, End } kind = Kind::End;
  Term term;
  bool is_term() const { return kind == Kind::Term; }
  bool is_end() const { return kind == Kind::End; }
};

class Series;

// A summable family, opened one item at a time in an order that lets the sum
// be produced term by term.
class SeriesFamily {
 public:
  virtual ~SeriesFamily() = default;
  // Upper bound on the support of every item not opened yet; nullopt once the
  // family is exhausted.
  virtual std::optional<Monomial> tail_bound() = 0;
  // Opens the next item, or makes internal progress and returns nullopt.
  virtual std::optional<Series> open() = 0;
};

// A lazily generated grid-based series with strictly decreasing support.
// Copies share state; terms are computed once and memoised.
class Series {
 public:
  Series();
  explicit Series(const Constant& c);
  static Series x();
  static Series monomial(const Monomial& m, const Constant& c = Constant(1));
  static Series from_terms(std::vector<Term> ts);
  static Series from_family(std::vector<Series> initial, std::unique_ptr<SeriesFamily> family,
                            GridCertificate cert);

  Head peek(std::size_t i) const;
  // One generator step; false once the stream is exhausted.
  bool advance() const;
  std::optional<Term> term(std::size_t i) const;
  std::vector<Term> prefix(std::size_t n) const;
  // Terms with monomial above the cutoff (or equal, when inclusive).
  std::vector<Term> terms_above(const Monomial& cutoff, bool inclusive = false,
                                std::size_t max_terms =
                                    std::numeric_limits<std::size_t>::max()) const;
  // Upper bound on the whole support without forcing; nullopt for a known zero.
  std::optional<Monomial> upper_bound() const;
  std::optional<Term> leading() const { return term(0); }
  bool known_finite() const;
  bool is_zero() const;
  const GridCertificate& certificate() const;
  Series tail(std::size_t from) const;
  std::string str(std::size_t n) const;
  const void* id() const { return node_.get(); }

 private:
  explicit Series(std::shared_ptr<detail::Node> n) : node_(std::move(n)) {}
  friend Series make_series(std::shared_ptr<detail::Node>);
  std::shared_ptr<detail::Node> node_;
};

// True only when the series is materialised and empty; never forces.
bool is_known_zero(const Series& s);

Series operator+(const Series& a, const Series& b);
Series operator-(const Series& a);
Series operator-(const Series& a, const Series& b);
Series operator*(const Series& a, const Series& b);
Series scale(const Series& s, const Constant& c, const Monomial& m = Monomial());
Series sum_family(const std::vector<Series>& items);

// Items s_i with supp s_i inside  level_gens^{level(i)} * base  where level is
// non-decreasing and unbounded (unless count is finite).
struct LazyFamily {
  std::function<Series(std::size_t)> item;
  std::function<std::size_t(std::size_t)> level;
  std::vector<Monomial> level_gens;
  GridCertificate base;
  std::optional<std::size_t> count;
};
Series sum_lazy(LazyFamily family, bool verify_membership = true);

struct DominantDecomposition {
  Constant c;
  Monomial d;
  Series eps;
};
DominantDecomposition dominant_decompose(const Series& s);

enum class Relation { Prec, Preceq, Asymp, Equiv, Succ, Succeq };
struct DominanceVerdict {
  enum class Kind { Prec, Asymp, Equiv, Succ, BothZero } kind;
  bool holds(Relation r) const;
  std::string str() const;
};
DominanceVerdict dominance(const Series& s, const Series& t);

Series truncate_initial(const Series& s, const Monomial& cutoff);
Series geometric_substitute(const std::function<Constant(std::size_t)>& coeffs,
                            const Series& eps);
Series invert(const Series& s);
Series operator/(const Series& a, const Series& b);

// A strongly linear map described on monomials.
struct MonomialMap {
  std::function<Series(const Monomial&)> image;
  // Upper bound for the support of image(n) for every n below or equal to m;
  // nullopt when all those images vanish. Must be monotone in m.
  std::function<std::optional<Monomial>(const Monomial&)> bound;
  // Grid certificate for the images of a grid.
  std::function<GridCertificate(const GridCertificate&)> certificate;
  bool multiplicative = false;
  // Ratios t below 1 with supp image(m) inside m * t^N (used when iterating).
  std::optional<std::vector<Monomial>> contraction_ratios;
};
Series extend_strongly_linear(const MonomialMap& map, const Series& s);
Series iterate_contracting(const MonomialMap& phi,
                           const std::function<Constant(std::size_t)>& coeffs, const Series& s);

struct Agreement {
  bool equal = false;
  std::size_t compared = 0;
  std::optional<std::size_t> first_mismatch;
  std::string detail;
};
// Compares the first n terms of a and the matching part of b.
Agreement agree_to_terms(const Series& a, const Series& b, std::size_t n);
// Compares all terms with monomial at or above the cutoff.
Agreement agree_above(const Series& a, const Series& b, const Monomial& cutoff);

// "c1*m1 + ... + O(m)" with at most n terms.
std::string render(const Series& s, std::size_t n);

}  // namespace transkit
