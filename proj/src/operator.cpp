#include "transkit/operator.hpp"

namespace transkit {

OperatorHandle OperatorHandle::identity() { return OperatorHandle(); }

OperatorHandle OperatorHandle::right_compose(const Series& g) {
  OperatorHandle h;
  h.comp_ = std::make_shared<CompositionHandle>(g);
  return h;
}

Series OperatorHandle::apply(const Series& s) const { return comp_ ? compose(s, *comp_) : s; }

Series OperatorHandle::apply(const Monomial& m) const {
  return comp_ ? comp_->monomial(m) : Series::monomial(m);
}

Monomial OperatorHandle::dominant(const Monomial& m) const {
  return comp_ ? comp_->dominant(m) : m;
}

Series OperatorHandle::image_of_x() const { return comp_ ? comp_->g() : Series::x(); }

std::string OperatorHandle::str() const {
  return comp_ ? "compose:" + render(comp_->g(), 8) : "identity";
}

}  // namespace transkit
