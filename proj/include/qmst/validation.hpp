#pragma once

#include "qmst/graph.hpp"

#include <string>
#include <vector>

namespace qmst {

struct CheckItem {
  std::string name;
  bool passed = false;
  double value = 0.0;      // measured quantity (error, eigenvalue, count)
  double tolerance = 0.0;  // 0 for exact checks
  std::string detail;
};

struct CheckReport {
  std::string group;
  std::vector<CheckItem> items;
  bool passed() const;
  int failures() const;
};

struct ValidationReport {
  std::vector<CheckReport> groups;
  bool passed() const;
  std::string text() const;
};

/// K4 with edges e1={1,2}, e2={1,3}, e3={1,4}, e4={3,4}, e5={2,4}, e6={2,3}
/// (0-based internally): e1..e3 meet at v1, e4..e6 form the opposite
/// triangle, and e_k, e_{k+3} are disjoint.
Graph counterexample_graph();

/// Fractional point feasible for the linear relaxation whose lifted matrix is not PSD.
struct CutsetCounterexample {
  Vector x;
  Matrix y;
};
CutsetCounterexample cutset_counterexample();

/// Fractional point feasible for the semidefinite relaxation that violates a cut-set constraint.
struct MisdpCounterexample {
  Matrix x;  // 4 x 4 weighted adjacency
  Matrix y;
};
MisdpCounterexample misdp_counterexample();

CheckReport check_counterexample_cutset_feasible(const CutsetCounterexample& data = cutset_counterexample());
CheckReport check_counterexample_misdp_feasible(const MisdpCounterexample& data = misdp_counterexample());

/// floor(|S|(|S| alpha - beta)) = -1 for every nonempty proper S, and for
/// every spanning tree of g the cut-set and RLT constraints at its integer
/// lift. Needs 3 <= n <= 10.
CheckReport check_cg_identities(const Graph& g);

struct ValidationOptions {
  int min_n = 3;
  int max_n = 8;
  /// Test hook: corrupts one embedded constant in each counterexample.
  bool perturb = false;
};

/// Both counterexamples plus the CG sweep over complete graphs K_min_n..K_max_n.
ValidationReport run_validation(const ValidationOptions& options = {});

}  // namespace qmst
