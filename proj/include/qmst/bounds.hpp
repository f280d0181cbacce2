#pragma once

#include "qmst/graph.hpp"
#include "qmst/instances.hpp"
#include "qmst/projections.hpp"

#include <cstdint>
#include <span>

namespace qmst {

/// value = lp_value - n * lambda_max_term is a lower bound on the relaxation
/// optimum (and on the QMSTP optimum) for any symmetric dual matrix.
struct SafeBound {
  double value = 0.0;
  double lambda_max_term = 0.0;
  double lp_value = 0.0;
  /// False when the LP solve did not reach optimality; value is still valid
  /// but may be weaker than the exact bound.
  bool lp_optimal = true;
};

/// min <C, Y~> over the lifted polytope without cuts, in closed form:
/// off-diagonal pairs contribute min(0, c_ef + c_fe), the coefficients
/// c_ff + c_f,m+1 + c_m+1,f are minimized over {0 <= y <= 1, sum y = n-1} by
/// sorting, plus the corner term.
double lp_min_lifted_polytope(const Matrix& c, int n);

struct LpBound {
  /// Lagrangian value at the (clamped) LP cut multipliers: always <= the
  /// LP optimum, equal to it when the LP is solved exactly.
  double value = 0.0;
  /// Primal objective reported by the simplex.
  double primal = 0.0;
  bool optimal = true;
  Vector multipliers;  // one per cut, >= 0
};

/// min <C, Y~> over the lifted polytope intersected with the cuts. Symmetry
/// is imposed by summing mirrored coefficients.
LpBound lp_min_with_cuts(const Matrix& c, std::span<const Cut> cuts, const Graph& g, int n);

/// Lagrangian dual function of the cut LP at multipliers mu (one per cut).
/// Valid lower bound on the cut LP for every mu >= 0.
double lp_lagrangian(const Matrix& c, std::span<const Cut> cuts, const Vector& mu, const Graph& g, int n);

/// lb(S) = min_{Y~ in cut polytope} <Q~ + S, Y~> - n lambda_max(W^T S W), with
/// a padding of 1e-9 ||S||_F on the eigenvalue.
SafeBound valid_lower_bound(const Matrix& s, const Matrix& q_padded, const Matrix& w, const CutClusters& cuts,
                            const Graph& g, int n);

struct TreeSolution {
  double value = 0.0;
  Vector x;  // edge incidence vector
  std::int64_t trees_visited = 0;
};

struct EnumerationOptions {
  int max_vertices = 12;
  /// Branch-and-bound pruning on partial costs; only used when all
  /// off-diagonal costs are nonnegative.
  bool prune_by_cost = true;
};

/// Exact QMSTP optimum by enumerating spanning trees (edge inclusion /
/// exclusion with cycle and connectivity pruning).
TreeSolution brute_force_qmstp(const Instance& inst, const EnumerationOptions& options = {});

/// Greedy construction by marginal quadratic cost from `effort` different
/// start edges, each followed by best-improvement edge exchange.
TreeSolution heuristic_upper_bound(const Instance& inst, int effort = 8);

}  // namespace qmst
