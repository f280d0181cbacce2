#pragma once

#include "qmst/graph.hpp"

namespace qmst {

/// min c^T x  s.t.  A x = b,  lower <= x <= upper.
/// Lower bounds must be finite; upper bounds may be +infinity.
struct LpProblem {
  Matrix a;
  Vector b;
  Vector c;
  Vector lower;
  Vector upper;
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

struct LpSolution {
  LpStatus status = LpStatus::IterationLimit;
  Vector x;
  /// Row multipliers y with c - A^T y >= 0 on variables at their lower bound.
  Vector duals;
  double objective = 0.0;
  int iterations = 0;
};

/// Dense bounded-variable primal simplex (two phases, Dantzig pricing with a
/// Bland fallback after a run of degenerate pivots).
LpSolution solve_lp(const LpProblem& problem, int max_iterations = 200000);

}  // namespace qmst
