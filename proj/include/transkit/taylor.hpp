#pragma once

#include <optional>
#include <string>
#include <vector>

#include "transkit/errors.hpp"
#include "transkit/operator.hpp"
#include "transkit/powerseries.hpp"

namespace transkit {

struct LocusSpec {
  OperatorHandle op;
  Series delta;
};

// m' / m is at most x^-1.
bool is_flat(const Monomial& m);

struct SpecConditionResult {
  bool pass = false;
  bool flat = false;
  std::optional<Monomial> offending;
  std::size_t checked = 0;
  std::string detail;
};
SpecConditionResult spec_condition_check(const Monomial& m, std::size_t prefix = 20);

// Certificate-level decision of whether f lies in the convergence locus;
// divergence is certified from the first `enumerate` support monomials.
ConvReport locus_contains(const LocusSpec& spec, const Series& f, std::size_t enumerate = 50);
// Per-monomial locus condition on the first n support monomials.
ConvReport locus_by_support(const LocusSpec& spec, const Series& f, std::size_t n = 50);

class LocusRefused : public PreconditionError {
 public:
  explicit LocusRefused(ConvReport r)
      : PreconditionError("outside the convergence locus: " + to_string(r.verdict) + " (" +
                          r.reason + ")"),
        report(std::move(r)) {}
  ConvReport report;
};

// Monomials reachable from the certificate generators by taking supports of
// logarithmic derivatives.
std::vector<Monomial> dagger_closure(const GridCertificate& c);

// f + f' X + f''/2 X^2 + ...
PowerSeries taylor_series(const Series& f);
PowerSeries taylor_series(const Series& f, const LocusSpec& spec);
// sum_k op(f^(k)) / k! * delta^k
Series taylor_deform(const Series& f, const LocusSpec& spec);

struct DescentReport {
  bool holds = true;
  std::size_t checked = 0;
  std::string detail;
};
// op(f) > op(f') delta > op(f'') delta^2 > ... on dominant monomials.
DescentReport descent_check(const Series& f, const LocusSpec& spec, std::size_t order);

enum class CheckStatus { Equal, Unequal, Skipped };
std::string to_string(CheckStatus s);

struct IdentityReport {
  CheckStatus status = CheckStatus::Skipped;
  ConvReport locus;
  Series lhs;
  Series rhs;
  std::size_t compared = 0;
  std::optional<std::size_t> first_mismatch;
  std::string reason;
};

// f(g + delta) against the deformation of f along composition with g.
IdentityReport taylor_identity_check(const Series& f, const Series& g, const Series& delta,
                                     std::size_t depth);
// Deformation of log f against log of the deformation of f.
IdentityReport analytic_commutation_check(const Series& f, const LocusSpec& spec, std::size_t depth);
// d T(f) = d T(x) * T(f').
IdentityReport chain_rule_transport_check(const Series& f, const LocusSpec& spec, std::size_t depth);

}  // namespace transkit
