#include "qmst/projections.hpp"

#include "oracles/lifted_oracle.hpp"
#include "oracles/qp_oracle.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

using namespace qmst;

namespace {

oracle::QpProblem simplex_qp(const Vector& v, double s, bool capped) {
  const int p = static_cast<int>(v.size());
  oracle::QpProblem q;
  q.weight = Vector::Ones(p);
  q.target = v;
  q.a_eq = Matrix::Ones(1, p);
  q.b_eq = Vector::Constant(1, s);
  q.a_in = Matrix::Zero(capped ? 2 * p : p, p);
  q.b_in = Vector::Zero(q.a_in.rows());
  for (int i = 0; i < p; ++i) {
    q.a_in(i, i) = 1.0;
    if (capped) {
      q.a_in(p + i, i) = -1.0;
      q.b_in(p + i) = -1.0;
    }
  }
  return q;
}

std::vector<Cut> random_cuts(const Graph& g, int count, std::mt19937_64& rng) {
  std::vector<Cut> cuts;
  for (int k = 0; k < count; ++k) {
    cuts.push_back({static_cast<int>(rng() % g.n()), static_cast<int>(rng() % g.m())});
  }
  return cuts;
}

std::vector<int> random_independent(const Graph& g, std::mt19937_64& rng) {
  std::vector<int> out;
  for (int v = 0; v < g.n(); ++v) {
    if (rng() % 2 == 0) continue;
    bool ok = true;
    for (int w : out) ok = ok && !g.adjacent(v, w);
    if (ok) out.push_back(v);
  }
  return out;
}

}  // namespace

TEST(Simplex, Examples) {
  Vector v = Vector::Constant(3, 1.0 / 3);
  EXPECT_LE((project_simplex(v, 1) - v).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LE((project_simplex(Vector::Constant(3, 0.5), 1) - v).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_THROW(project_simplex(v, 0), InvalidArgument);
  EXPECT_THROW(project_simplex(Vector(0), 1), InvalidArgument);
}

TEST(Simplex, MatchesQpOracle) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 100; ++t) {
    const int p = 1 + static_cast<int>(rng() % 20);
    const double s = 0.5 + (rng() % 40) / 4.0;
    const Vector v = testutil::random_vector(p, -3, 3, rng);
    Vector start = Vector::Zero(p);
    start(0) = s;
    const auto ref = oracle::solve_qp(simplex_qp(v, s, false), start);
    ASSERT_TRUE(ref.converged);
    EXPECT_LE((project_simplex(v, s) - ref.x).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(CappedSimplex, Examples) {
  Vector v(3);
  v << 2, 2, -1;
  Vector expect(3);
  expect << 1, 1, 0;
  EXPECT_LE((project_capped_simplex(v, 2) - expect).cwiseAbs().maxCoeff(), 1e-12);
  Vector feasible(4);
  feasible << 0.2, 0.8, 0.5, 0.5;
  EXPECT_LE((project_capped_simplex(feasible, 2) - feasible).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ(project_capped_simplex(v, 3), Vector::Ones(3));
  EXPECT_THROW(project_capped_simplex(v, 4), InvalidArgument);
  EXPECT_THROW(project_capped_simplex(v, 0), InvalidArgument);
}

TEST(CappedSimplex, MatchesQpOracle) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 100; ++t) {
    const int p = 2 + static_cast<int>(rng() % 19);
    const int s = 1 + static_cast<int>(rng() % (p - 1));
    const Vector v = testutil::random_vector(p, -2, 3, rng);
    Vector start = Vector::Zero(p);
    start.head(s).setOnes();
    const auto ref = oracle::solve_qp(simplex_qp(v, s, true), start);
    ASSERT_TRUE(ref.converged);
    const Vector x = project_capped_simplex(v, s);
    EXPECT_LE((x - ref.x).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_NEAR(x.sum(), s, 1e-12);
  }
}

TEST(ProjectR, Examples) {
  const int m = 5;
  const int n = 3;
  Matrix m0 = static_cast<double>(n) / m * Matrix::Identity(m, m);
  EXPECT_LE((project_psd_trace(m0, n) - m0).cwiseAbs().maxCoeff(), 1e-12);
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 3;
  d(1, 1) = -1;
  Matrix expect = Matrix::Zero(2, 2);
  expect(0, 0) = 2;
  EXPECT_LE((project_psd_trace(d, 2) - expect).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ProjectR, SampledOptimality) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 10; ++t) {
    const int m = 3 + t;
    const int n = 2 + t % 3;
    const Matrix mat = testutil::random_symmetric(m, -2, 2, rng);
    const Matrix r = project_psd_trace(mat, n);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(r);
    EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-9);
    EXPECT_NEAR(r.trace(), n, 1e-9 * n);
    const double best = (mat - r).norm();
    for (int s = 0; s < 1000; ++s) {
      Matrix b = testutil::random_matrix(m, m, -1, 1, rng);
      Matrix feas = b * b.transpose();
      feas *= n / feas.trace();
      EXPECT_LE(best, (mat - feas).norm() + 1e-12);
    }
  }
}

TEST(ProjectY, Examples) {
  const int m = 6;
  const int n = 4;
  Matrix z = Matrix::Zero(m + 1, m + 1);
  z(m, m) = 7.0;
  const Matrix p = project_lifted_polytope(z, n);
  for (int f = 0; f < m; ++f) {
    EXPECT_NEAR(p(f, f), 0.5, 1e-12);
    EXPECT_NEAR(p(f, m), 0.5, 1e-12);
  }
  EXPECT_EQ(p(m, m), 1.0);
  EXPECT_LE((project_lifted_polytope(p, n) - p).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_THROW(project_lifted_polytope(Matrix::Zero(3, 3), 4), InvalidArgument);
}

TEST(ProjectY, MatchesQpOracle) {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 40; ++t) {
    const int n = 3 + static_cast<int>(rng() % 3);
    const Graph g = testutil::random_graph(n, 0.8, rng);
    const int m = g.m();
    const Matrix mat = testutil::random_matrix(m + 1, m + 1, t % 2 ? -0.5 : 0.2, t % 2 ? 1.5 : 0.8, rng);
    const auto qp = oracle::lifted_projection_qp(mat, g, n, {});
    const auto ref =
        oracle::solve_qp(qp, oracle::tree_lift_reduced(oracle::any_spanning_tree(g), m));
    ASSERT_TRUE(ref.converged);
    const Matrix x = project_lifted_polytope(mat, n);
    EXPECT_LE((x - oracle::expand_reduced(ref.x, m)).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LE((x.topLeftCorner(m, m).diagonal() - x.col(m).head(m)).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NEAR(x.trace(), n, 1e-9);
    EXPECT_GE(x.minCoeff(), 0.0);
    EXPECT_LE(x.maxCoeff(), 1.0);
  }
}

TEST(ProjectTkf, InteriorPointUnchanged) {
  const Graph g = Graph::complete(5);
  const int m = g.m();
  const int f = 0;  // edge {0,1}
  Vector a = Vector::Constant(m + 2, 0.5);
  a(f) = a(m) = a(m + 1) = 0.3;
  const std::vector<int> k{2};
  EXPECT_LE((project_rlt_row(a, f, k, g) - a).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(ProjectTkf, AllGainsNonPositiveOnlyAveragesTriple) {
  const Graph g = Graph::complete(5);
  const int m = g.m();
  const int f = 0;
  std::mt19937_64 rng(5);
  Vector a = testutil::random_vector(m + 2, 0.5, 1.0, rng);
  a(f) = 0.1;
  a(m) = 0.2;
  a(m + 1) = 0.3;
  const std::vector<int> k{2};
  const Vector z = project_rlt_row(a, f, k, g);
  for (int e = 0; e < m; ++e) {
    if (e != f) {
      EXPECT_EQ(z(e), a(e));
    }
  }
  EXPECT_NEAR(z(f), 0.2, 1e-15);
  EXPECT_EQ(z(f), z(m));
  EXPECT_EQ(z(f), z(m + 1));
}

TEST(ProjectTkf, RejectsDependentSets) {
  const Graph g = Graph::complete(4);
  const Vector a = Vector::Zero(g.m() + 2);
  const std::vector<int> k{0, 1};
  EXPECT_THROW(project_rlt_row(a, 0, k, g), InvalidArgument);
  EXPECT_THROW(project_rlt_row(Vector::Zero(3), 0, {}, g), InvalidArgument);
}

TEST(ProjectTkf, MatchesQpOracle) {
  std::mt19937_64 rng(6);
  int checked = 0;
  for (int t = 0; t < 150; ++t) {
    const int n = 4 + static_cast<int>(rng() % 5);
    const Graph g = testutil::random_graph(n, 0.5, rng);
    const int m = g.m();
    const int f = static_cast<int>(rng() % m);
    const std::vector<int> k = random_independent(g, rng);
    const Vector a = testutil::random_vector(m + 2, -1, 1, rng);
    const auto qp = oracle::rlt_row_qp(a, f, k, g);
    const auto ref = oracle::solve_qp(qp, Vector::Zero(m));
    ASSERT_TRUE(ref.converged);
    const Vector z = project_rlt_row(a, f, k, g);
    EXPECT_LE((z - oracle::rlt_row_expand(ref.x, f, m)).cwiseAbs().maxCoeff(), 1e-9) << "trial " << t;
    EXPECT_EQ(z(f), z(m));
    EXPECT_EQ(z(f), z(m + 1));
    for (int i : k) {
      double sum = 0.0;
      for (int e : g.incident(i)) sum += z(e);
      EXPECT_GE(sum - z(f), -1e-10);
    }
    ++checked;
  }
  EXPECT_EQ(checked, 150);
}

TEST(ProjectTkf, InplaceMatchesVectorForm) {
  std::mt19937_64 rng(7);
  const Graph g = testutil::random_graph(7, 0.5, rng);
  const int m = g.m();
  Matrix x = testutil::random_matrix(m + 1, m + 1, -1, 1, rng);
  const int f = 2;
  const std::vector<int> k = random_independent(g, rng);
  Vector a(m + 2);
  a.head(m + 1) = x.row(f).transpose();
  a(m + 1) = x(m, f);
  const Vector z = project_rlt_row(a, f, k, g);
  Matrix before = x;
  project_rlt_row_inplace(x, f, k, g);
  for (int e = 0; e <= m; ++e) EXPECT_EQ(x(f, e), z(e));
  EXPECT_EQ(x(m, f), z(m + 1));
  for (int r = 0; r <= m; ++r) {
    for (int c = 0; c <= m; ++c) {
      if (r != f && !(r == m && c == f)) {
        EXPECT_EQ(x(r, c), before(r, c));
      }
    }
  }
}

TEST(CutClusters, Structure) {
  const Graph k5 = Graph::complete(5);
  std::vector<Cut> cuts{{0, 3}, {1, 3}, {2, 3}, {2, 3}, {4, 1}};
  CutClusters c(cuts, k5);
  EXPECT_EQ(c.size(), 4);
  EXPECT_EQ(c.max_clusters(), 3);
  EXPECT_TRUE(c.contains({1, 3}));
  EXPECT_FALSE(c.contains({1, 4}));
  EXPECT_TRUE(c.vertices(1, 1).empty());
  EXPECT_EQ(c.vertices(0, 1).size(), 1u);
  EXPECT_THROW(CutClusters(std::vector<Cut>{{5, 0}}, k5), InvalidArgument);

  Graph c4(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}});
  CutClusters sparse(std::vector<Cut>{{0, 1}, {2, 1}}, c4);
  EXPECT_EQ(sparse.max_clusters(), 1);
}

TEST(CutClusters, RandomPartitionValidity) {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 50; ++t) {
    const Graph g = testutil::random_graph(7, 0.5, rng);
    const auto cuts = random_cuts(g, 30, rng);
    CutClusters c(cuts, g);
    std::vector<Cut> seen;
    for (int k = 0; k < c.max_clusters(); ++k) {
      for (int f = 0; f < g.m(); ++f) {
        const auto vs = c.vertices(k, f);
        for (size_t a = 0; a < vs.size(); ++a) {
          seen.push_back({vs[a], f});
          for (size_t b = a + 1; b < vs.size(); ++b) EXPECT_FALSE(g.adjacent(vs[a], vs[b]));
        }
      }
    }
    std::sort(seen.begin(), seen.end());
    EXPECT_EQ(seen, c.cuts());
  }
}

TEST(Dykstra, EmptyCutsIsSingleProjection) {
  std::mt19937_64 rng(9);
  const Graph g = Graph::complete(4);
  const Matrix mat = testutil::random_matrix(7, 7, -1, 2, rng);
  const auto r = dykstra_project(mat, CutClusters{}, g, 4);
  EXPECT_EQ(r.cycles, 1);
  EXPECT_EQ((r.x - project_lifted_polytope(mat, 4)).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Dykstra, FeasiblePointIsFixed) {
  const Graph g = Graph::complete(4);
  Vector x = Vector::Zero(6);
  x(0) = x(1) = x(2) = 1;
  const Matrix lift = testutil::tree_lift(x);
  std::vector<Cut> cuts{{2, 0}, {3, 4}, {0, 5}};
  const auto r = dykstra_project(lift, CutClusters(cuts, g), g, 4);
  EXPECT_TRUE(r.converged);
  EXPECT_LE(r.cycles, 2);
  EXPECT_LE((r.x - lift).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Dykstra, MatchesQpOracle) {
  std::mt19937_64 rng(10);
  for (int t = 0; t < 25; ++t) {
    const int n = 4 + static_cast<int>(rng() % 2);
    const Graph g = t < 5 ? Graph::complete(4) : testutil::random_graph(n, 0.7, rng);
    const int m = g.m();
    const auto cuts = random_cuts(g, t < 5 ? 3 : 8, rng);
    const CutClusters clusters(cuts, g);
    const Matrix mat = testutil::random_matrix(m + 1, m + 1, -0.3, 1.0, rng);
    DykstraOptions opts;
    opts.tolerance = 1e-11;
    opts.max_cycles = 200000;
    const auto r = dykstra_project(mat, clusters, g, g.n(), opts);
    EXPECT_TRUE(r.converged);
    const auto qp = oracle::lifted_projection_qp(mat, g, g.n(), clusters.cuts());
    const auto ref = oracle::solve_qp(qp, oracle::tree_lift_reduced(oracle::any_spanning_tree(g), m));
    ASSERT_TRUE(ref.converged);
    EXPECT_LE((r.x - oracle::expand_reduced(ref.x, m)).cwiseAbs().maxCoeff(), 1e-4) << "trial " << t;
    EXPECT_LE(max_cut_violation(r.x, clusters.cuts(), g), 1e-4);
  }
}

TEST(Dykstra, ResidualDecreasesAndRespectsCap) {
  std::mt19937_64 rng(11);
  const Graph g = testutil::random_graph(6, 0.6, rng);
  const auto cuts = random_cuts(g, 15, rng);
  const CutClusters clusters(cuts, g);
  const Matrix mat = testutil::random_matrix(g.m() + 1, g.m() + 1, -0.5, 1.2, rng);
  DykstraOptions tight;
  tight.tolerance = 1e-14;
  tight.max_cycles = 3;
  const auto capped = dykstra_project(mat, clusters, g, 6, tight);
  EXPECT_FALSE(capped.converged);
  EXPECT_EQ(capped.cycles, 3);
  const auto full = dykstra_project(mat, clusters, g, 6);
  EXPECT_TRUE(full.converged);
  EXPECT_LT(full.last_change, 1e-5);
}

TEST(Projections, IdempotentAndNonexpansive) {
  std::mt19937_64 rng(12);
  const Graph g = testutil::random_graph(6, 0.6, rng);
  const int m = g.m();
  for (int t = 0; t < 20; ++t) {
    const Vector u = testutil::random_vector(m, -2, 2, rng);
    const Vector v = testutil::random_vector(m, -2, 2, rng);
    EXPECT_LE((project_simplex(project_simplex(u, 3), 3) - project_simplex(u, 3)).norm(), 1e-10);
    EXPECT_LE((project_simplex(u, 3) - project_simplex(v, 3)).norm(), (u - v).norm() + 1e-12);
    EXPECT_LE((project_capped_simplex(project_capped_simplex(u, 3), 3) - project_capped_simplex(u, 3)).norm(), 1e-10);
    EXPECT_LE((project_capped_simplex(u, 3) - project_capped_simplex(v, 3)).norm(), (u - v).norm() + 1e-10);

    const Matrix a = testutil::random_matrix(m + 1, m + 1, -1, 2, rng);
    const Matrix b = testutil::random_matrix(m + 1, m + 1, -1, 2, rng);
    const Matrix pa = project_lifted_polytope(a, 5);
    EXPECT_LE((project_lifted_polytope(pa, 5) - pa).norm(), 1e-10);
    EXPECT_LE((pa - project_lifted_polytope(b, 5)).norm(), (a - b).norm() + 1e-10);

    const Matrix sa = testutil::random_symmetric(m, -1, 1, rng);
    const Matrix sb = testutil::random_symmetric(m, -1, 1, rng);
    const Matrix ra = project_psd_trace(sa, 4);
    EXPECT_LE((project_psd_trace(ra, 4) - ra).norm(), 1e-10);
    EXPECT_LE((ra - project_psd_trace(sb, 4)).norm(), (sa - sb).norm() + 1e-10);

    const int f = static_cast<int>(rng() % m);
    const std::vector<int> k = random_independent(g, rng);
    const Vector x = testutil::random_vector(m + 2, -1, 1, rng);
    const Vector y = testutil::random_vector(m + 2, -1, 1, rng);
    const Vector px = project_rlt_row(x, f, k, g);
    EXPECT_LE((project_rlt_row(px, f, k, g) - px).norm(), 1e-10);
    EXPECT_LE((px - project_rlt_row(y, f, k, g)).norm(), (x - y).norm() + 1e-10);
  }
}

TEST(CutViolation, TreeLiftsSatisfyAllCuts) {
  std::mt19937_64 rng(13);
  const Graph g = testutil::random_graph(7, 0.5, rng);
  const Matrix lift = testutil::tree_lift(oracle::any_spanning_tree(g));
  std::vector<Cut> all;
  for (int i = 0; i < g.n(); ++i) {
    for (int f = 0; f < g.m(); ++f) all.push_back({i, f});
  }
  EXPECT_LE(max_cut_violation(lift, all, g), 0.0);
}
