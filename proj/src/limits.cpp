#include "transkit/limits.hpp"

#include "transkit/errors.hpp"

namespace transkit {

namespace {
thread_local std::size_t t_remaining = 0;
thread_local int t_depth = 0;
}  // namespace

Limits& limits() {
  static Limits l;
  return l;
}

LimitsScope::LimitsScope(const Limits& l) : saved_(limits()) { limits() = l; }
LimitsScope::~LimitsScope() { limits() = saved_; }

BudgetScope::BudgetScope() {
  if (t_depth++ == 0) t_remaining = limits().step_budget;
}

BudgetScope::~BudgetScope() { --t_depth; }

void consume_step() {
  if (t_depth == 0) return;
  if (t_remaining == 0)
    throw BudgetExceeded("step budget of " + std::to_string(limits().step_budget) +
                         " exhausted");
  --t_remaining;
}

std::size_t steps_remaining() { return t_depth == 0 ? limits().step_budget : t_remaining; }

}  // namespace transkit
