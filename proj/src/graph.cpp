#include "qmst/graph.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

namespace qmst {

Graph::Graph(int n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
  if (n < 1) throw InvalidArgument("graph needs at least one vertex");
  incident_.assign(n, {});
  index_.assign(static_cast<size_t>(n) * n, -1);
  for (int k = 0; k < m(); ++k) {
    Edge& e = edges_[k];
    if (e.u > e.v) std::swap(e.u, e.v);
    if (e.u < 0 || e.v >= n) {
      throw InvalidArgument("edge " + std::to_string(k) + " has an endpoint out of range");
    }
    if (e.u == e.v) throw InvalidArgument("self-loop at vertex " + std::to_string(e.u + 1));
    int& slot = index_[static_cast<size_t>(e.u) * n + e.v];
    if (slot >= 0) {
      throw InvalidArgument("duplicate edge {" + std::to_string(e.u + 1) + "," +
                            std::to_string(e.v + 1) + "}");
    }
    slot = k;
    index_[static_cast<size_t>(e.v) * n + e.u] = k;
    incident_[e.u].push_back(k);
    incident_[e.v].push_back(k);
  }
}

Graph Graph::lexicographic(int n, std::vector<Edge> edges) {
  for (Edge& e : edges) {
    if (e.u > e.v) std::swap(e.u, e.v);
  }
  std::sort(edges.begin(), edges.end());
  return Graph(n, std::move(edges));
}

Graph Graph::complete(int n) {
  std::vector<Edge> edges;
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) edges.push_back({u, v});
  }
  return Graph(n, std::move(edges));
}

void Graph::check_vertex(int i) const {
  if (i < 0 || i >= n_) throw InvalidArgument("invalid vertex " + std::to_string(i));
}

std::span<const int> Graph::incident(int i) const {
  check_vertex(i);
  return incident_[i];
}

int Graph::degree(int i) const {
  check_vertex(i);
  return static_cast<int>(incident_[i].size());
}

int Graph::edge_index(int u, int v) const {
  if (u < 0 || v < 0 || u >= n_ || v >= n_) return -1;
  return index_[static_cast<size_t>(u) * n_ + v];
}

bool Graph::is_connected() const {
  std::vector<char> seen(n_, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int reached = 1;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (int k : incident_[u]) {
      const int w = edges_[k].u == u ? edges_[k].v : edges_[k].u;
      if (!seen[w]) {
        seen[w] = 1;
        ++reached;
        stack.push_back(w);
      }
    }
  }
  return reached == n_;
}

Matrix Graph::adjacency() const {
  Matrix a = Matrix::Zero(n_, n_);
  for (const Edge& e : edges_) {
    a(e.u, e.v) = 1.0;
    a(e.v, e.u) = 1.0;
  }
  return a;
}

SpectralConstants spectral_constants(int n) {
  if (n < 3) throw InvalidArgument("spectral constants need n >= 3");
  SpectralConstants c;
  c.beta = 2.0 * (1.0 - std::cos(std::numbers::pi / n));
  c.alpha = c.beta / n;
  return c;
}

Matrix laplacian(const Matrix& x) {
  if (x.rows() != x.cols()) throw InvalidArgument("laplacian needs a square matrix");
  Matrix l = -x;
  l.diagonal() += x.rowwise().sum();
  return l;
}

double min_eigenvalue(const Matrix& m) {
  if (m.rows() != m.cols()) throw InvalidArgument("eigenvalue of a non-square matrix");
  if (m.size() == 0) return 0.0;
  const Matrix sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw Error("eigensolver failed");
  return eig.eigenvalues()(0);
}

bool is_psd(const Matrix& m, double rel_tol) {
  return min_eigenvalue(m) >= -rel_tol * std::max(1.0, m.norm());
}

bool is_tree_lmi(const Matrix& x, double rel_tol) {
  const int n = static_cast<int>(x.rows());
  if (x.cols() != n) throw InvalidArgument("tree LMI needs a square matrix");
  const double total = x.sum();
  if (std::abs(total - 2.0 * (n - 1)) > 1e-9 * n) {
    throw InvalidArgument("tree LMI needs exactly n-1 edges (total weight 2(n-1))");
  }
  const SpectralConstants c = spectral_constants(n);
  Matrix lmi = laplacian(x);
  lmi.array() += c.alpha;
  lmi.diagonal().array() -= c.beta;
  return is_psd(lmi, rel_tol);
}

Vector b_map(const Matrix& x, const Graph& g) {
  const int n = g.n();
  if (x.rows() != n || x.cols() != n) throw InvalidArgument("b_map: dimension mismatch");
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (x(i, j) != 0.0 && (i == j || !g.adjacent(i, j))) {
        throw InvalidArgument("b_map: entry (" + std::to_string(i + 1) + "," +
                              std::to_string(j + 1) + ") lies outside the edge set");
      }
    }
  }
  Vector out(g.m());
  for (int k = 0; k < g.m(); ++k) out(k) = x(g.edge(k).u, g.edge(k).v);
  return out;
}

Matrix b_adjoint(const Vector& x, const Graph& g) {
  if (x.size() != g.m()) throw InvalidArgument("b_adjoint: vector length must equal m");
  Matrix out = Matrix::Zero(g.n(), g.n());
  for (int k = 0; k < g.m(); ++k) {
    out(g.edge(k).u, g.edge(k).v) = x(k);
    out(g.edge(k).v, g.edge(k).u) = x(k);
  }
  return out;
}

std::vector<std::vector<int>> greedy_independent_partition(std::span<const int> vertices,
                                                           const Graph& g) {
  std::vector<int> order(vertices.begin(), vertices.end());
  std::sort(order.begin(), order.end());
  order.erase(std::unique(order.begin(), order.end()), order.end());
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return g.degree(a) > g.degree(b); });

  std::vector<std::vector<int>> classes;
  for (int v : order) {
    bool placed = false;
    for (auto& cls : classes) {
      const bool clash = std::any_of(cls.begin(), cls.end(), [&](int w) { return g.adjacent(v, w); });
      if (!clash) {
        cls.push_back(v);
        placed = true;
        break;
      }
    }
    if (!placed) classes.push_back({v});
  }
  return classes;
}

}  // namespace qmst
