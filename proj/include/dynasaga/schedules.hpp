#pragma once

#include <string>
#include <utility>
#include <vector>

#include "dynasaga/types.hpp"

namespace dynasaga {

// What the sampler should do at one iteration.
struct SampleAction {
  enum Kind { UniformPrefix, ForcedIndex };
  Kind kind = UniformPrefix;
  Index index = 0;  // 0-based forced index when kind == ForcedIndex
};

// Linear schedule: warm start at kappa0 for 2*kappa0 steps, then grow by one
// every other iteration, capped at n. The formula_variant warm-starts at
// 2*kappa0 instead (the alternative reading of the growth rule).
Index linear_size(long t, Index kappa0, Index n, bool formula_variant = false);

Index fixed_size(long t, Index m);

// Alternating rule. Warm start (t <= 2*kappa0): stay at kappa0, sample
// uniformly. Afterwards odd post-warm-start steps grow by one (if possible)
// and force an update on the fresh index; even steps sample uniformly.
std::pair<Index, SampleAction> alternating_action(long t, Index current_m, Index kappa0, Index n);

struct Schedule {
  enum Kind { Fixed, Linear, Alternating, Explicit };
  Kind kind = Fixed;
  Index fixed_m = 0;
  Index kappa0 = 1;
  Index cap = 0;  // n
  bool linear_formula_variant = false;
  std::vector<std::pair<long, Index>> table;  // explicit: (t, m) breakpoints, t ascending

  // Target size at iteration t for the size-driven kinds (all but
  // Alternating, whose growth depends on step parity; its size function is
  // still well defined and returned here for monotonicity checks).
  Index size_at(long t) const;

  static Schedule fixed(Index m);
  static Schedule linear(Index kappa0, Index n, bool formula_variant = false);
  static Schedule alternating(Index kappa0, Index n);
  static Schedule explicit_table(std::vector<std::pair<long, Index>> table, Index n);
};

// Parses `fixed:<m> | linear | alternating | explicit:<file>`; kappa0 and cap
// are filled in by the caller afterwards for the parameterless kinds.
Schedule parse_schedule_spec(const std::string& spec, Index kappa0, Index n);

// Two-column text `t m`, increasing t, non-decreasing m.
std::vector<std::pair<long, Index>> load_schedule_table(const std::string& path);

}  // namespace dynasaga
