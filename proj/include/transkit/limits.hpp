#pragma once

#include <cstddef>

namespace transkit {

struct Limits {
  int height_bound = 4;
  int log_depth_bound = 4;
  // Generator steps allowed per top-level forcing query.
  std::size_t step_budget = 100000;
  // Maximal number of purely large terms accepted as an exponent.
  std::size_t exp_arg_terms = 64;
  // Size cap for generator closures and certificate normalisation.
  std::size_t closure_limit = 128;
  std::size_t faa_di_bruno_order = 6;
  std::size_t divergence_window = 5;
  std::size_t power_series_order = 12;
};

Limits& limits();

// Temporarily replaces the process-wide limits.
class LimitsScope {
 public:
  explicit LimitsScope(const Limits& l);
  ~LimitsScope();
  LimitsScope(const LimitsScope&) = delete;
  LimitsScope& operator=(const LimitsScope&) = delete;

 private:
  Limits saved_;
};

// Shares one step budget among all nested forcing calls of a thread.
class BudgetScope {
 public:
  BudgetScope();
  ~BudgetScope();
  BudgetScope(const BudgetScope&) = delete;
  BudgetScope& operator=(const BudgetScope&) = delete;
};

void consume_step();
std::size_t steps_remaining();

}  // namespace transkit
