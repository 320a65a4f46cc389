#pragma once

#include <memory>
#include <string>

#include "transkit/calculus.hpp"

namespace transkit {

// A strongly linear ring morphism usable as a deformation base: the identity
// or right composition with a positive infinite series.
class OperatorHandle {
 public:
  static OperatorHandle identity();
  static OperatorHandle right_compose(const Series& g);

  bool is_identity() const { return !comp_; }
  Series apply(const Series& s) const;
  Series apply(const Monomial& m) const;
  // Dominant monomial of the image of m.
  Monomial dominant(const Monomial& m) const;
  Series image_of_x() const;
  std::string str() const;

 private:
  std::shared_ptr<CompositionHandle> comp_;
};

}  // namespace transkit
