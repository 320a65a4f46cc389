#pragma once

#include <optional>
#include <vector>

#include "transkit/monomial.hpp"

namespace transkit {

// Support is contained in  union_b  b * ratios^N  with every ratio below 1.
struct GridCertificate {
  std::vector<Monomial> bases;
  std::vector<Monomial> ratios;
};

enum class Membership { Yes, No, Unknown };

// Exactly `level` factors drawn from `level_gens` (if given) times the grid.
struct LevelConstraint {
  std::vector<Monomial> level_gens;
  std::size_t level = 0;
};

Membership grid_contains(const GridCertificate& c, const Monomial& m,
                         const std::optional<LevelConstraint>& level = std::nullopt);

GridCertificate cert_union(const GridCertificate& a, const GridCertificate& b);
GridCertificate cert_product(const GridCertificate& a, const GridCertificate& b);
GridCertificate cert_scale(const GridCertificate& a, const Monomial& m);
// Drops duplicate generators and bases reachable from another base.
GridCertificate cert_prune(GridCertificate c);
// Generators below 1 spanning every grid element below 1.
std::vector<Monomial> infinitesimal_generators(const GridCertificate& c);
// Largest element of the grid.
std::optional<Monomial> cert_top(const GridCertificate& c);

void append_unique(std::vector<Monomial>& v, const Monomial& m);

}  // namespace transkit
