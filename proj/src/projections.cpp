#include "qmst/projections.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qmst {

CutClusters::CutClusters(std::span<const Cut> cuts, const Graph& g) { add(cuts, g); }

bool CutClusters::contains(const Cut& c) const {
  return std::binary_search(cuts_.begin(), cuts_.end(), c);
}

std::span<const int> CutClusters::vertices(int cluster, int edge) const {
  const auto& per_edge = clusters_.at(cluster);
  if (edge < 0 || edge >= static_cast<int>(per_edge.size())) return {};
  return per_edge[edge];
}

void CutClusters::add(std::span<const Cut> more, const Graph& g) {
  for (const Cut& c : more) {
    if (c.edge < 0 || c.edge >= g.m() || c.vertex < 0 || c.vertex >= g.n()) {
      throw InvalidArgument("cut references an invalid vertex or edge");
    }
    cuts_.push_back(c);
  }
  std::sort(cuts_.begin(), cuts_.end());
  cuts_.erase(std::unique(cuts_.begin(), cuts_.end()), cuts_.end());
  rebuild(g);
}

void CutClusters::rebuild(const Graph& g) {
  m_ = g.m();
  clusters_.clear();
  std::vector<std::vector<int>> per_edge(m_);
  for (const Cut& c : cuts_) per_edge[c.edge].push_back(c.vertex);
  for (int f = 0; f < m_; ++f) {
    if (per_edge[f].empty()) continue;
    auto classes = greedy_independent_partition(per_edge[f], g);
    for (size_t k = 0; k < classes.size(); ++k) {
      if (clusters_.size() <= k) clusters_.emplace_back(m_);
      std::sort(classes[k].begin(), classes[k].end());
      clusters_[k][f] = std::move(classes[k]);
    }
  }
}

CutClusters cluster_cuts(std::span<const Cut> cuts, const Graph& g) { return CutClusters(cuts, g); }

Vector project_simplex(const Vector& v, double s) {
  if (!(s > 0)) throw InvalidArgument("simplex radius must be positive");
  const Eigen::Index p = v.size();
  if (p == 0) throw InvalidArgument("cannot project an empty vector onto a simplex");
  std::vector<Eigen::Index> order(p);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return v(a) > v(b); });
  double prefix = 0.0;
  double theta = 0.0;
  for (Eigen::Index k = 0; k < p; ++k) {
    prefix += v(order[k]);
    const double candidate = (prefix - s) / static_cast<double>(k + 1);
    if (k == 0 || v(order[k]) - candidate > 0) theta = candidate;
  }
  return (v.array() - theta).max(0.0).matrix();
}

Vector project_capped_simplex(const Vector& v, double s) {
  const auto p = static_cast<double>(v.size());
  if (!(s > 0) || s > p + 1e-12) throw InvalidArgument("capped simplex needs 0 < s <= dim");
  if (s >= p) return Vector::Ones(v.size());

  // sum(clamp(v - t, 0, 1)) is non-increasing in t; bracket and bisect.
  auto mass = [&](double t) { return (v.array() - t).max(0.0).min(1.0).sum(); };
  double lo = v.minCoeff() - 1.0;  // mass(lo) = p >= s
  double hi = v.maxCoeff();        // mass(hi) = 0 <  s
  for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(1.0, std::abs(lo) + std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    (mass(mid) >= s ? lo : hi) = mid;
  }
  Vector x = (v.array() - 0.5 * (lo + hi)).max(0.0).min(1.0).matrix();

  // Spread the bisection residual over the free coordinates.
  const double residual = s - x.sum();
  const auto free = (x.array() > 0.0 && x.array() < 1.0).count();
  if (free > 0 && residual != 0.0) {
    for (Eigen::Index k = 0; k < x.size(); ++k) {
      if (x(k) > 0.0 && x(k) < 1.0) x(k) = std::clamp(x(k) + residual / free, 0.0, 1.0);
    }
  }
  return x;
}

Matrix project_psd_trace(const Matrix& m, int n) {
  if (m.rows() != m.cols()) throw InvalidArgument("spectral projection needs a square matrix");
  const Matrix sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
  if (eig.info() != Eigen::Success) throw Error("eigensolver failed in spectral projection");
  const Vector lambda = project_simplex(eig.eigenvalues(), static_cast<double>(n));
  const Matrix& u = eig.eigenvectors();
  Matrix r = u * lambda.asDiagonal() * u.transpose();
  return 0.5 * (r + r.transpose());
}

LiftedMatrix project_lifted_polytope(const Matrix& x, int n) {
  const Eigen::Index size = x.rows();
  if (x.cols() != size || size < 2) throw InvalidArgument("lifted projection needs a square matrix of size m+1 >= 2");
  const Eigen::Index m = size - 1;
  if (n - 1 > m || n < 2) throw InvalidArgument("lifted projection needs 1 <= n-1 <= m");

  Matrix out = (0.5 * (x + x.transpose())).cwiseMax(0.0).cwiseMin(1.0);
  // Each y_f occurs three times: diagonal, last column, last row.
  Vector target(m);
  for (Eigen::Index f = 0; f < m; ++f) target(f) = (x(f, f) + x(f, m) + x(m, f)) / 3.0;
  const Vector y = project_capped_simplex(target, static_cast<double>(n - 1));
  for (Eigen::Index f = 0; f < m; ++f) {
    out(f, f) = y(f);
    out(f, m) = y(f);
    out(m, f) = y(f);
  }
  out(m, m) = 1.0;
  return out;
}

namespace {

/// Core of the closed-form RLT row projection. `get` reads the input,
/// `set` writes into the output (initialized to the input by the caller).
template <typename Get, typename Set>
void rlt_row_projection(Get get, Set set, int f, std::span<const int> independent, const Graph& g) {
  const int m = g.m();
  const double triple = (get(f) + get(m) + get(m + 1)) / 3.0;

  struct Candidate {
    double gain;
    int vertex;
  };
  std::vector<Candidate> candidates;
  candidates.reserve(independent.size());
  for (int i : independent) {
    if (g.edge_touches(f, i)) {
      // z_f cancels: the cut reads sum_{e in delta(i)\{f}} z_e >= 0, which
      // shares no coordinate with the other cuts of an independent set.
      const int d = g.degree(i);
      if (d <= 1) continue;
      double rest = 0.0;
      for (int e : g.incident(i)) {
        if (e != f) rest += get(e);
      }
      if (rest < 0.0) {
        const double shift = rest / (d - 1);
        for (int e : g.incident(i)) {
          if (e != f) set(e, get(e) - shift);
        }
      }
      continue;
    }
    double row_sum = 0.0;
    for (int e : g.incident(i)) row_sum += get(e);
    candidates.push_back({triple - row_sum, i});
  }

  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) { return a.gain > b.gain; });

  double omega = 0.0;
  int active = 0;
  if (!candidates.empty() && candidates.front().gain > 0.0) {
    double weighted = 0.0;
    double inverse_degrees = 0.0;
    for (int p = 0; p < static_cast<int>(candidates.size()); ++p) {
      const double d = g.degree(candidates[p].vertex);
      weighted += candidates[p].gain / d;
      inverse_degrees += 1.0 / d;
      const double w = weighted / (3.0 + inverse_degrees);
      if (candidates[p].gain > w) {
        active = p + 1;
        omega = w;
      }
    }
  }

  for (int p = 0; p < active; ++p) {
    const int i = candidates[p].vertex;
    const double step = (candidates[p].gain - omega) / g.degree(i);
    for (int e : g.incident(i)) set(e, get(e) + step);
  }
  const double shared = triple - omega;
  set(f, shared);
  set(m, shared);
  set(m + 1, shared);
}

}  // namespace

Vector project_rlt_row(const Vector& a, int f, std::span<const int> independent, const Graph& g) {
  const int m = g.m();
  if (a.size() != m + 2) throw InvalidArgument("RLT row projection needs a vector of length m+2");
  if (f < 0 || f >= m) throw InvalidArgument("RLT row projection: invalid edge");
  for (size_t x = 0; x < independent.size(); ++x) {
    for (size_t y = x + 1; y < independent.size(); ++y) {
      if (independent[x] == independent[y] || g.adjacent(independent[x], independent[y])) {
        throw InvalidArgument("RLT row projection: vertex set is not independent");
      }
    }
  }
  Vector z = a;
  rlt_row_projection([&](int pos) { return a(pos); }, [&](int pos, double value) { z(pos) = value; }, f,
                     independent, g);
  return z;
}

void project_rlt_row_inplace(Matrix& x, int f, std::span<const int> independent, const Graph& g) {
  const int m = g.m();
  // Positions 0..m-1 never alias m, m+1; reads of those happen before the
  // triple is written, and every other position is read before it is written.
  auto at = [&](int pos) -> double& {
    if (pos < m) return x(f, pos);
    return pos == m ? x(f, m) : x(m, f);
  };
  rlt_row_projection([&](int pos) { return at(pos); }, [&](int pos, double value) { at(pos) = value; }, f,
                     independent, g);
}

DykstraResult dykstra_project(const Matrix& m, const CutClusters& clusters, const Graph& g, int n,
                              const DykstraOptions& options) {
  DykstraResult result;
  if (clusters.empty()) {
    result.x = project_lifted_polytope(m, n);
    result.cycles = 1;
    return result;
  }
  const int edges = g.m();
  const int groups = clusters.max_clusters();

  Matrix x = m;
  Matrix p = Matrix::Zero(m.rows(), m.cols());
  std::vector<Matrix> corrections(groups, Matrix::Zero(m.rows(), m.cols()));
  Matrix x_old(m.rows(), m.cols());
  Matrix tmp(m.rows(), m.cols());
  Matrix in_polytope(m.rows(), m.cols());

  result.converged = false;
  for (int cycle = 1; cycle <= options.max_cycles; ++cycle) {
    x_old = x;
    tmp = x + p;
    x = project_lifted_polytope(tmp, n);
    p = tmp - x;
    in_polytope = x;
    for (int k = 0; k < groups; ++k) {
      tmp = x + corrections[k];
      x = tmp;
      // Rows touch disjoint coordinates, so this loop is order independent.
      for (int f = 0; f < edges; ++f) project_rlt_row_inplace(x, f, clusters.vertices(k, f), g);
      x(edges, edges) = 1.0;
      corrections[k] = tmp - x;
    }
    result.cycles = cycle;
    result.last_change = (x_old - x).norm();
    if (result.last_change < options.tolerance) {
      result.converged = true;
      break;
    }
  }
  result.x = std::move(in_polytope);
  return result;
}

double cut_violation(const LiftedMatrix& x, const Cut& cut, const Graph& g) {
  double sum = 0.0;
  for (int e : g.incident(cut.vertex)) sum += x(cut.edge, e);
  return x(cut.edge, cut.edge) - sum;
}

double max_cut_violation(const LiftedMatrix& x, std::span<const Cut> cuts, const Graph& g) {
  double worst = 0.0;
  for (const Cut& c : cuts) worst = std::max(worst, cut_violation(x, c, g));
  return worst;
}

}  // namespace qmst
