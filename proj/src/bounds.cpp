#include "qmst/bounds.hpp"

#include "qmst/simplex.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

namespace qmst {

namespace {

void check_cost_shape(const Matrix& c, const Graph& g, int n) {
  if (c.rows() != g.m() + 1 || c.cols() != g.m() + 1) {
    throw InvalidArgument("lifted cost matrix must be (m+1)x(m+1)");
  }
  if (n != g.n()) throw InvalidArgument("vertex count does not match the graph");
  if (n - 1 > g.m()) throw InvalidArgument("graph has fewer than n-1 edges");
}

/// Sum of the k smallest entries.
double smallest_sum(Vector v, int k) {
  std::sort(v.data(), v.data() + v.size());
  return v.head(k).sum();
}

}  // namespace

double lp_min_lifted_polytope(const Matrix& c, int n) {
  const Eigen::Index m = c.rows() - 1;
  if (c.cols() != c.rows() || m < 1) throw InvalidArgument("lifted cost matrix must be square");
  if (n - 1 > m || n < 2) throw InvalidArgument("need 1 <= n-1 <= m");
  double off = 0.0;
  for (Eigen::Index e = 0; e < m; ++e) {
    for (Eigen::Index f = e + 1; f < m; ++f) off += std::min(0.0, c(e, f) + c(f, e));
  }
  Vector diag(m);
  for (Eigen::Index f = 0; f < m; ++f) diag(f) = c(f, f) + c(f, m) + c(m, f);
  return c(m, m) + off + smallest_sum(diag, n - 1);
}

double lp_lagrangian(const Matrix& c, std::span<const Cut> cuts, const Vector& mu, const Graph& g, int n) {
  check_cost_shape(c, g, n);
  if (mu.size() != static_cast<Eigen::Index>(cuts.size())) throw InvalidArgument("one multiplier per cut");
  const int m = g.m();
  Matrix pair = c.topLeftCorner(m, m) + c.topLeftCorner(m, m).transpose();
  Vector diag(m);
  for (int f = 0; f < m; ++f) diag(f) = c(f, f) + c(f, m) + c(m, f);

  // Relaxing sum_{e in delta(i)} Y_fe - y_f >= 0 with weight mu >= 0.
  for (size_t k = 0; k < cuts.size(); ++k) {
    const double w = std::max(0.0, mu(static_cast<Eigen::Index>(k)));
    if (w == 0.0) continue;
    const Cut& cut = cuts[k];
    bool touches = false;
    for (int e : g.incident(cut.vertex)) {
      if (e == cut.edge) {
        touches = true;
        continue;
      }
      pair(e, cut.edge) -= w;
      pair(cut.edge, e) -= w;
    }
    if (!touches) diag(cut.edge) += w;
  }

  double value = c(m, m);
  double magnitude = std::abs(c(m, m));
  for (int e = 0; e < m; ++e) {
    for (int f = e + 1; f < m; ++f) {
      // pair(e, f) was decremented twice per multiplier (once per mirror).
      const double coef = 0.5 * pair(e, f) + 0.5 * pair(f, e);
      value += std::min(0.0, coef);
      magnitude += std::abs(coef);
    }
  }
  value += smallest_sum(diag, n - 1);
  magnitude += diag.cwiseAbs().sum();
  // Round-off allowance on the summation.
  return value - 4.0 * std::numeric_limits<double>::epsilon() * magnitude * std::sqrt(static_cast<double>(m + 1));
}

LpBound lp_min_with_cuts(const Matrix& c, std::span<const Cut> cuts, const Graph& g, int n) {
  check_cost_shape(c, g, n);
  const int m = g.m();
  LpBound out;
  out.multipliers = Vector::Zero(static_cast<Eigen::Index>(cuts.size()));

  // Cuts (i, f) with f in delta(i) read sum_{delta(i)\f} Y_fe >= 0 and are
  // implied by Y >= 0; they keep multiplier zero.
  std::vector<int> active;
  for (size_t k = 0; k < cuts.size(); ++k) {
    if (!g.edge_touches(cuts[k].edge, cuts[k].vertex)) active.push_back(static_cast<int>(k));
  }
  if (active.empty()) {
    out.value = lp_min_lifted_polytope(c, n);
    out.primal = out.value;
    return out;
  }

  // Variables: y (m), off-diagonal pairs touched by a cut, one slack per cut.
  Eigen::MatrixXi pair_id = Eigen::MatrixXi::Constant(m, m, -1);
  std::vector<std::pair<int, int>> pairs;
  for (int k : active) {
    const Cut& cut = cuts[k];
    for (int e : g.incident(cut.vertex)) {
      const int a = std::min(e, cut.edge);
      const int b = std::max(e, cut.edge);
      if (pair_id(a, b) < 0) {
        pair_id(a, b) = static_cast<int>(pairs.size());
        pairs.emplace_back(a, b);
      }
    }
  }
  const int np = static_cast<int>(pairs.size());
  const int nc = static_cast<int>(active.size());
  const int vars = m + np + nc;

  LpProblem lp;
  lp.a = Matrix::Zero(1 + nc, vars);
  lp.b = Vector::Zero(1 + nc);
  lp.c = Vector::Zero(vars);
  lp.lower = Vector::Zero(vars);
  lp.upper = Vector::Ones(vars);

  double constant = c(m, m);
  for (int e = 0; e < m; ++e) {
    for (int f = e + 1; f < m; ++f) {
      if (pair_id(e, f) < 0) constant += std::min(0.0, c(e, f) + c(f, e));
    }
  }
  for (int f = 0; f < m; ++f) lp.c(f) = c(f, f) + c(f, m) + c(m, f);
  for (int p = 0; p < np; ++p) lp.c(m + p) = c(pairs[p].first, pairs[p].second) + c(pairs[p].second, pairs[p].first);

  lp.a.row(0).head(m).setOnes();
  lp.b(0) = n - 1;
  for (int r = 0; r < nc; ++r) {
    const Cut& cut = cuts[active[r]];
    for (int e : g.incident(cut.vertex)) {
      lp.a(1 + r, m + pair_id(std::min(e, cut.edge), std::max(e, cut.edge))) = 1.0;
    }
    lp.a(1 + r, cut.edge) = -1.0;
    lp.a(1 + r, m + np + r) = -1.0;
    lp.upper(m + np + r) = g.degree(cut.vertex);
  }

  const LpSolution sol = solve_lp(lp);
  out.optimal = sol.status == LpStatus::Optimal;
  out.primal = sol.objective + constant;
  if (sol.duals.size() == 1 + nc) {
    for (int r = 0; r < nc; ++r) out.multipliers(active[r]) = std::max(0.0, sol.duals(1 + r));
  }
  out.value = lp_lagrangian(c, cuts, out.multipliers, g, n);
  if (!out.optimal) {
    out.value = std::max(out.value, lp_lagrangian(c, cuts, Vector::Zero(out.multipliers.size()), g, n));
  }
  return out;
}

SafeBound valid_lower_bound(const Matrix& s, const Matrix& q_padded, const Matrix& w, const CutClusters& cuts,
                            const Graph& g, int n) {
  const Eigen::Index size = g.m() + 1;
  if (s.rows() != size || s.cols() != size || q_padded.rows() != size || q_padded.cols() != size) {
    throw InvalidArgument("dual and cost matrices must be (m+1)x(m+1)");
  }
  if (w.rows() != size || w.cols() != g.m()) throw InvalidArgument("facial basis must be (m+1)xm");
  const Matrix sym = 0.5 * (s + s.transpose());
  const Matrix reduced = w.transpose() * sym * w;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (reduced + reduced.transpose()), Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw Error("eigensolver failed in the safe bound");

  SafeBound out;
  out.lambda_max_term = eig.eigenvalues().maxCoeff() + 1e-9 * sym.norm();
  const LpBound lp = lp_min_with_cuts(q_padded + sym, cuts.cuts(), g, n);
  out.lp_value = lp.value;
  out.lp_optimal = lp.optimal;
  out.value = out.lp_value - n * out.lambda_max_term;
  return out;
}

namespace {

bool offdiagonal_nonnegative(const Matrix& q) {
  for (Eigen::Index e = 0; e < q.rows(); ++e) {
    for (Eigen::Index f = 0; f < q.cols(); ++f) {
      if (e != f && q(e, f) < 0) return false;
    }
  }
  return true;
}

int find_root(std::vector<int>& parent, int x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

class TreeEnumerator {
 public:
  TreeEnumerator(const Instance& inst, bool prune, double incumbent, Vector incumbent_x)
      : g_(inst.graph),
        q_(inst.q),
        n_(g_.n()),
        m_(g_.m()),
        prune_(prune),
        best_(incumbent),
        best_x_(std::move(incumbent_x)) {
    order_.resize(m_);
    std::iota(order_.begin(), order_.end(), 0);
    std::stable_sort(order_.begin(), order_.end(), [&](int a, int b) { return q_(a, a) < q_(b, b); });
    interaction_ = Vector::Zero(m_);
    taken_.reserve(n_);
    scale_ = std::max(1.0, q_.cwiseAbs().maxCoeff()) * n_ * n_;
  }

  TreeSolution run() {
    std::vector<int> comp(n_);
    std::iota(comp.begin(), comp.end(), 0);
    recurse(0, comp, 0.0);
    TreeSolution out;
    out.value = best_;
    out.x = best_x_;
    out.trees_visited = visited_;
    return out;
  }

 private:
  void recurse(int k, const std::vector<int>& comp, double cost) {
    const int need = n_ - 1 - static_cast<int>(taken_.size());
    if (need == 0) {
      ++visited_;
      if (cost < best_ || best_x_.size() == 0) {
        best_ = cost;
        best_x_ = Vector::Zero(m_);
        for (int e : taken_) best_x_(e) = 1.0;
      }
      return;
    }
    if (m_ - k < need) return;
    if (prune_ && best_x_.size() > 0 && lower_bound(k, comp, cost, need) >= best_ - 1e-12 * scale_) return;

    const int e = order_[k];
    const int cu = comp[g_.edge(e).u];
    const int cv = comp[g_.edge(e).v];
    if (cu != cv) {
      std::vector<int> merged = comp;
      for (int& c : merged) {
        if (c == cv) c = cu;
      }
      taken_.push_back(e);
      const double added = q_(e, e) + 2.0 * interaction_(e);
      interaction_ += q_.col(e);
      recurse(k + 1, merged, cost + added);
      interaction_ -= q_.col(e);
      taken_.pop_back();
    }
    if (still_connectable(k + 1, comp)) recurse(k + 1, comp, cost);
  }

  /// Whether the current components can still be joined by edges order_[k..].
  bool still_connectable(int k, const std::vector<int>& comp) const {
    std::vector<int> parent(n_);
    std::iota(parent.begin(), parent.end(), 0);
    int pieces = 0;
    for (int v = 0; v < n_; ++v) pieces += comp[v] == v;
    for (int j = k; j < m_ && pieces > 1; ++j) {
      const Edge& e = g_.edge(order_[j]);
      const int a = find_root(parent, comp[e.u]);
      const int b = find_root(parent, comp[e.v]);
      if (a != b) {
        parent[a] = b;
        --pieces;
      }
    }
    return pieces == 1;
  }

  /// cost + the `need` smallest marginal costs among undecided, non-cycle
  /// edges; valid when off-diagonal costs are nonnegative.
  double lower_bound(int k, const std::vector<int>& comp, double cost, int need) {
    scratch_.clear();
    for (int j = k; j < m_; ++j) {
      const int e = order_[j];
      if (comp[g_.edge(e).u] != comp[g_.edge(e).v]) scratch_.push_back(q_(e, e) + 2.0 * interaction_(e));
    }
    if (static_cast<int>(scratch_.size()) < need) return std::numeric_limits<double>::infinity();
    std::nth_element(scratch_.begin(), scratch_.begin() + (need - 1), scratch_.end());
    double sum = cost;
    for (int j = 0; j < need; ++j) sum += scratch_[j];
    return sum;
  }

  const Graph& g_;
  const Matrix& q_;
  int n_;
  int m_;
  bool prune_;
  double best_;
  double scale_;
  Vector best_x_;
  Vector interaction_;
  std::vector<int> order_;
  std::vector<int> taken_;
  std::vector<double> scratch_;
  std::int64_t visited_ = 0;
};

}  // namespace

TreeSolution brute_force_qmstp(const Instance& inst, const EnumerationOptions& options) {
  const Graph& g = inst.graph;
  if (g.n() > options.max_vertices) {
    throw InvalidArgument("brute force limited to n <= " + std::to_string(options.max_vertices));
  }
  if (!g.is_connected()) throw InvalidArgument("graph is disconnected; no spanning tree exists");
  validate_costs(g, inst.q);
  if (g.n() == 1) return TreeSolution{0.0, Vector::Zero(g.m()), 1};

  const bool prune = options.prune_by_cost && offdiagonal_nonnegative(inst.q);
  double incumbent = std::numeric_limits<double>::infinity();
  Vector incumbent_x;
  if (prune) {
    const TreeSolution h = heuristic_upper_bound(inst, 4);
    incumbent = h.value;
    incumbent_x = h.x;
  }
  TreeEnumerator walker(inst, prune, incumbent, std::move(incumbent_x));
  TreeSolution out = walker.run();
  out.value = tree_cost(inst.q, out.x);
  return out;
}

namespace {

/// Edge indices on the tree path between a and b.
std::vector<int> tree_path(const Graph& g, const std::vector<char>& in_tree, int a, int b) {
  std::vector<int> via(g.n(), -1);
  std::vector<char> seen(g.n(), 0);
  std::vector<int> queue{a};
  seen[a] = 1;
  for (size_t head = 0; head < queue.size(); ++head) {
    const int u = queue[head];
    if (u == b) break;
    for (int e : g.incident(u)) {
      if (!in_tree[e]) continue;
      const int w = g.edge(e).u == u ? g.edge(e).v : g.edge(e).u;
      if (!seen[w]) {
        seen[w] = 1;
        via[w] = e;
        queue.push_back(w);
      }
    }
  }
  std::vector<int> path;
  for (int v = b; v != a;) {
    const int e = via[v];
    path.push_back(e);
    v = g.edge(e).u == v ? g.edge(e).v : g.edge(e).u;
  }
  return path;
}

Vector greedy_tree(const Instance& inst, int start) {
  const Graph& g = inst.graph;
  const Matrix& q = inst.q;
  std::vector<int> parent(g.n());
  std::iota(parent.begin(), parent.end(), 0);
  Vector x = Vector::Zero(g.m());
  Vector interaction = Vector::Zero(g.m());
  auto take = [&](int e) {
    x(e) = 1.0;
    interaction += q.col(e);
    parent[find_root(parent, g.edge(e).u)] = find_root(parent, g.edge(e).v);
  };
  take(start);
  for (int added = 1; added < g.n() - 1; ++added) {
    int best = -1;
    double best_cost = std::numeric_limits<double>::infinity();
    for (int e = 0; e < g.m(); ++e) {
      if (x(e) != 0.0 || find_root(parent, g.edge(e).u) == find_root(parent, g.edge(e).v)) continue;
      const double marginal = q(e, e) + 2.0 * interaction(e);
      if (marginal < best_cost) {
        best_cost = marginal;
        best = e;
      }
    }
    take(best);
  }
  return x;
}

void edge_exchange(const Instance& inst, Vector& x) {
  const Graph& g = inst.graph;
  const Matrix& q = inst.q;
  const double tol = 1e-12 * std::max(1.0, q.cwiseAbs().maxCoeff());
  Vector interaction = q * x;
  for (int round = 0; round < 100000; ++round) {
    std::vector<char> in_tree(g.m());
    for (int e = 0; e < g.m(); ++e) in_tree[e] = x(e) != 0.0;
    double best_delta = -tol;
    int best_in = -1;
    int best_out = -1;
    for (int e = 0; e < g.m(); ++e) {
      if (in_tree[e]) continue;
      for (int f : tree_path(g, in_tree, g.edge(e).u, g.edge(e).v)) {
        const double delta = q(e, e) + 2.0 * (interaction(e) - q(e, f)) - 2.0 * interaction(f) + q(f, f);
        if (delta < best_delta) {
          best_delta = delta;
          best_in = e;
          best_out = f;
        }
      }
    }
    if (best_in < 0) return;
    x(best_in) = 1.0;
    x(best_out) = 0.0;
    interaction += q.col(best_in) - q.col(best_out);
  }
}

}  // namespace

TreeSolution heuristic_upper_bound(const Instance& inst, int effort) {
  const Graph& g = inst.graph;
  if (!g.is_connected()) throw InvalidArgument("graph is disconnected; no spanning tree exists");
  validate_costs(g, inst.q);
  TreeSolution best;
  best.value = std::numeric_limits<double>::infinity();
  if (g.n() == 1) return TreeSolution{0.0, Vector::Zero(g.m()), 1};

  std::vector<int> starts(g.m());
  std::iota(starts.begin(), starts.end(), 0);
  std::stable_sort(starts.begin(), starts.end(), [&](int a, int b) { return inst.q(a, a) < inst.q(b, b); });
  starts.resize(std::min<size_t>(starts.size(), static_cast<size_t>(std::max(1, effort))));
  for (int start : starts) {
    Vector x = greedy_tree(inst, start);
    edge_exchange(inst, x);
    const double value = tree_cost(inst.q, x);
    ++best.trees_visited;
    if (value < best.value) {
      best.value = value;
      best.x = x;
    }
  }
  return best;
}

}  // namespace qmst
