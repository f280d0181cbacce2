#pragma once

#include <Eigen/Dense>

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qmst {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Undirected edge between two 0-based vertices, stored with u < v.
struct Edge {
  int u = 0;
  int v = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Simple undirected graph with a fixed, stable edge ordering.
///
/// Edge k of the ordering is the k-th entry of `edges()`. This ordering fixes
/// the correspondence between adjacency matrices and edge vectors used
/// everywhere else (b_map / b_adjoint, cost matrices, lifted matrices).
/// Vertices are 0-based in memory; file formats use 1-based ids.
/// A Graph is immutable after construction.
class Graph {
 public:
  Graph() = default;

  /// Keeps the given edge order. Throws InvalidArgument on self-loops,
  /// duplicates or out-of-range endpoints.
  Graph(int n, std::vector<Edge> edges);

  /// Same edges, sorted lexicographically by (min endpoint, max endpoint).
  static Graph lexicographic(int n, std::vector<Edge> edges);
  static Graph complete(int n);

  int n() const { return n_; }
  int m() const { return static_cast<int>(edges_.size()); }
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(int k) const { return edges_.at(k); }

  /// Edge indices incident to vertex i, in increasing order.
  std::span<const int> incident(int i) const;
  int degree(int i) const;

  /// Index of edge {u, v} or -1.
  int edge_index(int u, int v) const;
  bool adjacent(int u, int v) const { return edge_index(u, v) >= 0; }
  bool edge_touches(int k, int vertex) const {
    const Edge& e = edges_[k];
    return e.u == vertex || e.v == vertex;
  }

  bool is_connected() const;
  /// 0/1 symmetric adjacency matrix.
  Matrix adjacency() const;

 private:
  void check_vertex(int i) const;

  int n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> incident_;
  std::vector<int> index_;  // n*n lookup, -1 when absent
};

/// beta = 2(1 - cos(pi/n)) is the algebraic connectivity of the path P_n,
/// the smallest among trees on n vertices; alpha = beta / n.
struct SpectralConstants {
  double beta = 0.0;
  double alpha = 0.0;
};

SpectralConstants spectral_constants(int n);

/// Diag(X 1) - X.
Matrix laplacian(const Matrix& x);

/// Smallest eigenvalue of the symmetric part of m.
double min_eigenvalue(const Matrix& m);

/// True when lambda_min((M + M^T)/2) >= -rel_tol * max(1, ||M||_F).
bool is_psd(const Matrix& m, double rel_tol = 1e-8);

/// Tree test via the Laplacian LMI: for an (n-1)-edge 0/1 adjacency matrix,
/// Diag(X1) - X + alpha J - beta I is PSD iff the graph is a tree.
bool is_tree_lmi(const Matrix& x, double rel_tol = 1e-8);

/// Entries of x on the edge positions, in edge order. Throws if x has a
/// nonzero entry off the edge set.
Vector b_map(const Matrix& x, const Graph& g);

/// Symmetric n x n matrix holding x_k at both (i, j) and (j, i) of edge k.
Matrix b_adjoint(const Vector& x, const Graph& g);

/// Greedy coloring of the induced subgraph on `vertices`, visiting vertices
/// by descending degree in g (ties by vertex id). Each returned class is an
/// independent set of g; classes are disjoint and cover the input.
std::vector<std::vector<int>> greedy_independent_partition(std::span<const int> vertices,
                                                           const Graph& g);

}  // namespace qmst
