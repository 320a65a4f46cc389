#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "transkit/errors.hpp"
#include "transkit/operator.hpp"
#include "transkit/series.hpp"

namespace transkit {

// m * X^degree
struct BiMonomial {
  Monomial mono;
  long degree = 0;
  friend bool operator==(const BiMonomial& a, const BiMonomial& b) {
    return a.degree == b.degree && a.mono == b.mono;
  }
};

// Support inside  union_b  b * ratios^N  in the monomial group times X^N.
struct BiCertificate {
  std::vector<BiMonomial> bases;
  std::vector<BiMonomial> ratios;
};

// Coefficients c_k * m_k with m_{k+1}/m_k non-increasing from monotone_from.
struct MonomialLaw {
  std::function<Constant(std::size_t)> coeff;
  std::function<Monomial(std::size_t)> mono;
  std::size_t monotone_from = 0;
};

class PowerSeries {
 public:
  PowerSeries();
  static PowerSeries polynomial(std::vector<Series> coeffs);
  static PowerSeries from_law(std::function<Series(std::size_t)> law, BiCertificate cert);
  static PowerSeries from_monomial_law(MonomialLaw law, BiCertificate cert);

  Series coeff(std::size_t k) const;
  // Degree bound for polynomials.
  std::optional<std::size_t> degree_bound() const;
  const BiCertificate& certificate() const;
  const std::optional<MonomialLaw>& monomial_law() const;
  std::string str(std::size_t order, std::size_t terms) const;

 private:
  struct State;
  std::shared_ptr<State> st_;
};

PowerSeries ps_add(const PowerSeries& p, const PowerSeries& q);
PowerSeries ps_mul(const PowerSeries& p, const PowerSeries& q);
PowerSeries ps_derive(const PowerSeries& p);
// p(q) for q with vanishing constant coefficient.
PowerSeries ps_compose(const PowerSeries& p, const PowerSeries& q);

// A final segment of the monomial group.
class CutSpec {
 public:
  enum class Kind { All, Empty, Above, AboveEq, Preimage };
  static CutSpec all();
  static CutSpec empty();
  static CutSpec above(const Monomial& b);
  static CutSpec above_eq(const Monomial& b);
  // Monomials u whose image under op has dominant monomial in target.
  static CutSpec preimage(const OperatorHandle& op, const CutSpec& target);

  Kind kind() const { return kind_; }
  bool contains(const Monomial& u) const;
  // Whether m * X^k lies in the positive cone, i.e. is infinitesimal for the cut.
  bool below_one(const Monomial& m, long k) const;
  std::string str() const;

 private:
  Kind kind_ = Kind::All;
  Monomial bound_;
  std::shared_ptr<OperatorHandle> op_;
  std::shared_ptr<CutSpec> target_;
};

enum class CutOrder { Less, Equal, Greater, Incomparable };
CutOrder cut_compare(const BiMonomial& a, const BiMonomial& b, const CutSpec& s);

struct CutMembership {
  enum class Verdict { Member, NonMember, Inconclusive } verdict = Verdict::Inconclusive;
  std::vector<BiMonomial> failing_ratios;
  std::vector<std::pair<BiMonomial, BiMonomial>> witness_pairs;
  std::string reason;
};
CutMembership cut_member(const PowerSeries& p, const CutSpec& s, std::size_t prefix = 20);

enum class ConvVerdict { CertifiedConvergent, CertifiedDivergent, Inconclusive };
std::string to_string(ConvVerdict v);

struct ConvReport {
  ConvVerdict verdict = ConvVerdict::Inconclusive;
  std::vector<Monomial> witnesses;
  std::size_t checked_prefix = 0;
  std::string reason;
  bool convergent() const { return verdict == ConvVerdict::CertifiedConvergent; }
};
ConvReport conv_contains(const PowerSeries& p, const Series& delta, std::size_t prefix = 12);

class EvaluationRefused : public PreconditionError {
 public:
  explicit EvaluationRefused(ConvReport r)
      : PreconditionError("evaluation refused: " + to_string(r.verdict) + " (" + r.reason + ")"),
        report(std::move(r)) {}
  ConvReport report;
};

Series ps_eval(const PowerSeries& p, const Series& delta);
PowerSeries ps_translate(const PowerSeries& p, const Series& eps);
Series cut_eval(const PowerSeries& p, const Series& delta, const CutSpec& s);

// Coefficientwise image under a morphism; the source cut must be the preimage
// of the target cut.
PowerSeries lift_coefficientwise(const OperatorHandle& op, const PowerSeries& p,
                                 const CutSpec& source, const CutSpec& target);
// Coefficientwise derivation inside a fixed cut.
PowerSeries lift_derivation(const PowerSeries& p, const CutSpec& s);

// Upper bound for supp(P_k delta^k) over all k >= K, from the certificate.
std::optional<Monomial> cert_tail_bound(const BiCertificate& c, const Monomial& v, std::size_t K);

}  // namespace transkit
