#pragma once

#include "qmst/bounds.hpp"
#include "qmst/graph.hpp"
#include "qmst/instances.hpp"
#include "qmst/projections.hpp"

#include <limits>
#include <optional>
#include <string_view>
#include <vector>

namespace qmst {

struct PrsmParams {
  std::optional<double> tau;  // default computed from Q
  double gamma1 = 0.9;
  double gamma2 = 1.0;
  double eps_prsm = 1e-4;
  double eps_proj = 1e-5;
  double cut_violation_eps = 1e-3;
  std::optional<int> ncutsmax;  // default m
  int ncutsmin = 10;
  double epslbimprov = 1e-3;
  int noutermax = 10;
  int max_total_iters = 10000;
  double time_limit_secs = 10800.0;
  int max_dykstra_cycles = 10000;
  /// false: a single round without cutting planes.
  bool use_cuts = true;

  /// Throws InvalidArgument on out-of-range values (including the step
  /// length region for gamma1, gamma2).
  void validate() const;
};

struct PrsmState {
  Matrix r;     // m x m
  Matrix ytil;  // (m+1) x (m+1)
  Matrix s;     // (m+1) x (m+1)
  CutClusters cuts;
  int k = 0;
  int outer = 0;
  double best_valid_lb = -std::numeric_limits<double>::infinity();
};

enum class Termination { Residual, GapClosed, FewCuts, SmallImprovement, OuterCap, IterCap, TimeLimit };

std::string_view termination_name(Termination t);

struct OuterRound {
  int round = 0;
  int inner_iterations = 0;
  double valid_lb = 0.0;  // bound from this round's dual
  double best_lb = 0.0;   // running maximum
  double lp_value = 0.0;
  double lambda_max_term = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  int cuts_active = 0;
  int cuts_found = 0;  // violated cuts separated after this round
  int cuts_added = 0;
  long dykstra_cycles = 0;
  double seconds = 0.0;  // elapsed since the start of the solve
};

struct BoundResult {
  double lb_dnn = 0.0;
  double time_dnn = 0.0;
  double lb_cuts = 0.0;
  double time_total = 0.0;
  int iterations = 0;
  int cuts_added = 0;
  double tau = 0.0;
  std::vector<OuterRound> outer_log;
  Termination termination = Termination::Residual;
};

struct Residuals {
  double primal = 0.0;
  double dual = 0.0;
};

struct ViolatedCut {
  Cut cut;
  double violation = 0.0;
};

/// Orthonormal basis of {v : T^T v = 0}, T = (1_m; -(n-1)), from the thin QR
/// factor of ((n-1) I_m; 1_m^T). Size (m+1) x m.
Matrix facial_basis(int m, int n);

/// Penalty from the ratio of tr Q and ||Q||_F; 1 for Q = 0.
double default_tau(const Matrix& q);

/// Barycentric starting point in the lifted space.
Matrix initial_ytil(int n, int m);

/// R = W^T Y~ W, Y~ = initial_ytil, S = 0, no cuts.
PrsmState initial_state(const Graph& g);

struct StepInfo {
  int dykstra_cycles = 0;
  bool dykstra_converged = true;
};

/// One PRSM iteration: R update, first dual update, Y~ update by Dykstra,
/// second dual update. Increments state.k.
StepInfo prsm_inner_step(PrsmState& state, const PrsmParams& params, double tau, const Matrix& q_padded,
                         const Matrix& w, const Graph& g);

/// Relative primal and dual residuals after a step from ytil_prev.
Residuals residuals(const Matrix& ytil_prev, const PrsmState& state, double tau, const Matrix& w);

/// All cuts with violation > eps not already in `existing`, sorted by
/// violation descending (ties by cut order).
std::vector<ViolatedCut> separate_cuts(const Matrix& ytil, const Graph& g, double eps,
                                       const CutClusters* existing = nullptr);

/// Cutting-plane PRSM bound. Uses inst.ub for the gap-closed test when set.
BoundResult solve_bound(const Instance& inst, const PrsmParams& params = {});

}  // namespace qmst
