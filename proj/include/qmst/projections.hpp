#pragma once

#include "qmst/graph.hpp"

#include <compare>
#include <span>
#include <vector>

namespace qmst {

/// Symmetric (m+1) x (m+1) matrix [[Y, y], [y^T, w]] lifting an edge vector.
using LiftedMatrix = Matrix;

/// RLT-type cut  sum_{e in delta(vertex)} Y(edge, e) >= y(edge).
struct Cut {
  int vertex = 0;
  int edge = 0;

  friend bool operator==(const Cut&, const Cut&) = default;
  friend auto operator<=>(const Cut&, const Cut&) = default;
};

/// Cuts grouped for Dykstra's algorithm. For every edge f the vertices cut
/// together with f are split into independent sets K^f_1..K^f_{N_f}; cluster
/// k collects (i, f) with i in K^f_k. Cuts are deduplicated and sorted.
class CutClusters {
 public:
  CutClusters() = default;
  CutClusters(std::span<const Cut> cuts, const Graph& g);

  const std::vector<Cut>& cuts() const { return cuts_; }
  bool empty() const { return cuts_.empty(); }
  int size() const { return static_cast<int>(cuts_.size()); }
  int max_clusters() const { return static_cast<int>(clusters_.size()); }
  bool contains(const Cut& c) const;

  /// Vertices K^f_k of cluster k (0-based) for edge f; empty when f has
  /// fewer than k+1 classes.
  std::span<const int> vertices(int cluster, int edge) const;

  /// Adds new cuts and re-clusters.
  void add(std::span<const Cut> more, const Graph& g);

 private:
  void rebuild(const Graph& g);

  std::vector<Cut> cuts_;
  int m_ = 0;
  // clusters_[k][f] = K^f_k
  std::vector<std::vector<std::vector<int>>> clusters_;
};

CutClusters cluster_cuts(std::span<const Cut> cuts, const Graph& g);

/// Euclidean projection onto {x >= 0, sum x = s}. Sort-based.
Vector project_simplex(const Vector& v, double s);

/// Euclidean projection onto {0 <= x <= 1, sum x = s}, 0 < s <= dim(v).
Vector project_capped_simplex(const Vector& v, double s);

/// Projection onto {R PSD, tr R = n}: eigenvalues are projected onto the
/// n-simplex.
Matrix project_psd_trace(const Matrix& m, int n);

/// Projection onto the lifted polytope
///   {[[Y, y], [y^T, 1]] symmetric : diag(Y) = y, 0 <= entries <= 1, trace = n}.
/// The input may be non-symmetric; the projection is taken in the full
/// Frobenius norm on (m+1) x (m+1) matrices.
LiftedMatrix project_lifted_polytope(const Matrix& m, int n);

/// Projection of a in R^{m+2} onto
///   {z : z_f = z_{m+1} = z_{m+2},  sum_{e in delta(i)} z_e >= z_f  for i in K}
/// where positions 0..m-1 hold row f of the lifted matrix, position m holds
/// its entry in the last column and position m+1 the mirrored entry in the
/// last row. K must be an independent set of g. Closed form via sorting.
Vector project_rlt_row(const Vector& a, int f, std::span<const int> independent, const Graph& g);

/// Applies project_rlt_row to row f of x in place (row f, x(f, m), x(m, f)).
void project_rlt_row_inplace(Matrix& x, int f, std::span<const int> independent, const Graph& g);

struct DykstraOptions {
  double tolerance = 1e-5;
  /// Cap on full cycles (one lifted-polytope step plus one step per cluster).
  int max_cycles = 10000;
};

struct DykstraResult {
  LiftedMatrix x;
  int cycles = 0;
  bool converged = true;
  double last_change = 0.0;
};

/// Cyclic Dykstra projection onto the lifted polytope intersected with the
/// cut clusters. Correction terms start at zero on every call. The returned
/// matrix is the lifted-polytope iterate of the final cycle, so it lies in
/// the lifted polytope exactly and satisfies the cuts up to the tolerance.
DykstraResult dykstra_project(const Matrix& m, const CutClusters& clusters, const Graph& g, int n,
                              const DykstraOptions& options = {});

/// Largest violation max(0, y_f - sum_{e in delta(i)} Y_fe) over the given cuts.
double max_cut_violation(const LiftedMatrix& x, std::span<const Cut> cuts, const Graph& g);

/// y_f - sum_{e in delta(i)} Y_fe, read from row f of x.
double cut_violation(const LiftedMatrix& x, const Cut& cut, const Graph& g);

}  // namespace qmst
