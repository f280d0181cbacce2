#include "qmst/bounds.hpp"
#include "qmst/prsm.hpp"

#include "oracles/lifted_oracle.hpp"
#include "oracles/tree_oracle.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace qmst;

namespace {

std::vector<Cut> random_cuts(const Graph& g, int count, std::mt19937_64& rng) {
  std::vector<Cut> cuts;
  for (int k = 0; k < count; ++k) {
    cuts.push_back({static_cast<int>(rng() % g.n()), static_cast<int>(rng() % g.m())});
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  return cuts;
}

double scale(double v) { return std::max(1.0, std::abs(v)); }

}  // namespace

TEST(LpBound, ClosedFormMatchesLp) {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 40; ++t) {
    const int n = 3 + static_cast<int>(rng() % 3);
    const Graph g = testutil::random_graph(n, 0.8, rng);
    const Matrix c = testutil::random_matrix(g.m() + 1, g.m() + 1, -1, 1, rng);
    const double ref = oracle::lifted_lp_value(c, {}, g, n);
    EXPECT_NEAR(lp_min_lifted_polytope(c, n), ref, 1e-9 * scale(ref)) << "trial " << t;
  }
}

TEST(LpBound, ClosedFormTreeLiftsAreFeasible) {
  std::mt19937_64 rng(32);
  const Graph g = Graph::complete(5);
  for (const auto& tree : oracle::all_spanning_trees(g)) {
    Vector x = Vector::Zero(g.m());
    for (int e : tree) x(e) = 1;
    const Matrix c = testutil::random_matrix(g.m() + 1, g.m() + 1, -1, 1, rng);
    EXPECT_LE(lp_min_lifted_polytope(c, 5), (c.array() * testutil::tree_lift(x).array()).sum() + 1e-12);
  }
}

TEST(LpBound, CutLpMatchesOracle) {
  std::mt19937_64 rng(33);
  for (int t = 0; t < 40; ++t) {
    const int n = 4 + static_cast<int>(rng() % 2);
    const Graph g = testutil::random_graph(n, 0.7, rng);
    const auto cuts = random_cuts(g, 3 + static_cast<int>(rng() % 12), rng);
    const Matrix c = testutil::random_matrix(g.m() + 1, g.m() + 1, -1, 1, rng);
    const double ref = oracle::lifted_lp_value(c, cuts, g, n);
    const LpBound got = lp_min_with_cuts(c, cuts, g, n);
    ASSERT_TRUE(got.optimal);
    EXPECT_NEAR(got.value, ref, 1e-7 * scale(ref)) << "trial " << t;
    EXPECT_LE(got.value, ref + 1e-12 * scale(ref));
    EXPECT_GE(got.multipliers.minCoeff(), 0.0);
  }
}

TEST(LpBound, CutsOnlyRaiseTheBound) {
  std::mt19937_64 rng(34);
  const Graph g = Graph::complete(5);
  for (int t = 0; t < 10; ++t) {
    const Matrix c = testutil::random_matrix(g.m() + 1, g.m() + 1, -1, 1, rng);
    const double base = lp_min_lifted_polytope(c, 5);
    EXPECT_NEAR(lp_min_with_cuts(c, {}, g, 5).value, base, 1e-9 * scale(base));
    EXPECT_GE(lp_min_with_cuts(c, random_cuts(g, 20, rng), g, 5).value, base - 1e-9 * scale(base));
  }
}

TEST(LpBound, LagrangianIsValidForAnyMultipliers) {
  std::mt19937_64 rng(35);
  for (int t = 0; t < 40; ++t) {
    const int n = 4 + static_cast<int>(rng() % 2);
    const Graph g = testutil::random_graph(n, 0.7, rng);
    const auto cuts = random_cuts(g, 10, rng);
    const Matrix c = testutil::random_matrix(g.m() + 1, g.m() + 1, -1, 1, rng);
    const double ref = oracle::lifted_lp_value(c, cuts, g, n);
    for (int s = 0; s < 5; ++s) {
      const Vector mu = testutil::random_vector(static_cast<int>(cuts.size()), 0, s, rng);
      EXPECT_LE(lp_lagrangian(c, cuts, mu, g, n), ref + 1e-12 * scale(ref));
    }
    EXPECT_NEAR(lp_lagrangian(c, cuts, Vector::Zero(static_cast<int>(cuts.size())), g, n),
                lp_min_lifted_polytope(c, n), 1e-9 * scale(ref));
  }
}

TEST(LpBound, RejectsBadShapes) {
  const Graph g = Graph::complete(4);
  EXPECT_THROW(lp_min_with_cuts(Matrix::Zero(3, 3), {}, g, 4), InvalidArgument);
  const std::vector<Cut> bad{{9, 0}};
  EXPECT_THROW(lp_min_with_cuts(Matrix::Zero(7, 7), bad, g, 4), InvalidArgument);
}

TEST(SafeBound, NeverExceedsOptimum) {
  std::mt19937_64 rng(36);
  for (int t = 0; t < 30; ++t) {
    const int n = 4 + static_cast<int>(rng() % 3);
    const Graph g = testutil::random_graph(n, 0.6, rng);
    const int m = g.m();
    const Matrix q = testutil::random_symmetric(m, -5, 10, rng);
    const auto opt = oracle::exhaustive_qmstp(g, q);
    const Matrix s = testutil::random_symmetric(m + 1, -3, 3, rng);
    const CutClusters cuts(random_cuts(g, 10, rng), g);
    const SafeBound b = valid_lower_bound(s, pad_cost(q), facial_basis(m, n), cuts, g, n);
    EXPECT_LE(b.value, opt.value + 1e-9 * scale(opt.value)) << "trial " << t;
    EXPECT_NEAR(b.value, b.lp_value - n * b.lambda_max_term, 1e-9 * scale(b.value));
    EXPECT_TRUE(b.lp_optimal);
  }
}

TEST(SafeBound, ZeroDualGivesLpBound) {
  const Graph g = Graph::complete(4);
  const Matrix q = Matrix::Ones(6, 6);
  const SafeBound b = valid_lower_bound(Matrix::Zero(7, 7), pad_cost(q), facial_basis(6, 4), {}, g, 4);
  EXPECT_EQ(b.lambda_max_term, 0.0);
  EXPECT_NEAR(b.value, 3.0, 1e-12);  // only the diagonal survives the LP
}

TEST(BruteForce, MatchesExhaustive) {
  std::mt19937_64 rng(37);
  for (int t = 0; t < 40; ++t) {
    const int n = 3 + static_cast<int>(rng() % 5);
    const Graph g = testutil::random_graph(n, 0.6, rng);
    const bool signed_costs = t % 3 == 0;
    const Matrix q = testutil::random_symmetric(g.m(), signed_costs ? -20 : 0, 20, rng);
    const auto ref = oracle::exhaustive_qmstp(g, q);
    const auto inst = testutil::instance_from(g, q);
    const auto got = brute_force_qmstp(inst);
    EXPECT_NEAR(got.value, ref.value, 1e-9 * scale(ref.value)) << "trial " << t;
    EXPECT_NEAR(tree_cost(q, got.x), got.value, 1e-9 * scale(ref.value));
    EXPECT_EQ(got.x.sum(), n - 1);
    EXPECT_LE(got.trees_visited, ref.trees);
    EnumerationOptions all;
    all.prune_by_cost = false;
    const auto full = brute_force_qmstp(inst, all);
    EXPECT_EQ(full.trees_visited, ref.trees);
    EXPECT_NEAR(full.value, ref.value, 1e-9 * scale(ref.value));
  }
}

TEST(BruteForce, K4Examples) {
  const Graph g = Graph::complete(4);
  EnumerationOptions all;
  all.prune_by_cost = false;
  const auto identity = brute_force_qmstp(testutil::instance_from(g, Matrix::Identity(6, 6)), all);
  EXPECT_EQ(identity.trees_visited, 16);
  EXPECT_DOUBLE_EQ(identity.value, 3.0);
  const auto ones = brute_force_qmstp(testutil::instance_from(g, Matrix::Ones(6, 6)));
  EXPECT_DOUBLE_EQ(ones.value, 9.0);
}

TEST(BruteForce, RejectsLargeAndDisconnected) {
  InstanceSpec spec;
  spec.n = 13;
  EXPECT_THROW(brute_force_qmstp(generate(spec)), InvalidArgument);
  const Graph split(4, {{0, 1}, {2, 3}, {1, 2}});
  const auto path = brute_force_qmstp(testutil::instance_from(split, Matrix::Ones(3, 3)));
  EXPECT_DOUBLE_EQ(path.value, 9.0);
  const Graph disconnected(4, {{0, 1}, {2, 3}});
  EXPECT_THROW(brute_force_qmstp(testutil::instance_from(disconnected, Matrix::Ones(2, 2))), InvalidArgument);
}

TEST(Heuristic, FeasibleAndAboveOptimum) {
  std::mt19937_64 rng(38);
  for (int t = 0; t < 30; ++t) {
    const int n = 4 + static_cast<int>(rng() % 4);
    const Graph g = testutil::random_graph(n, 0.6, rng);
    const Matrix q = testutil::random_symmetric(g.m(), t % 2 ? -10 : 0, 20, rng);
    const auto inst = testutil::instance_from(g, q);
    const auto h = heuristic_upper_bound(inst);
    const auto opt = oracle::exhaustive_qmstp(g, q);
    EXPECT_GE(h.value, opt.value - 1e-9 * scale(opt.value));
    EXPECT_NEAR(tree_cost(q, h.x), h.value, 1e-9 * scale(h.value));
    // Incidence vector is a spanning tree.
    std::vector<Edge> edges;
    for (int e = 0; e < g.m(); ++e) {
      if (h.x(e) > 0.5) edges.push_back(g.edge(e));
    }
    EXPECT_EQ(static_cast<int>(edges.size()), n - 1);
    EXPECT_TRUE(Graph(n, edges).is_connected());
  }
}

TEST(Heuristic, LinearCostsGiveMinimumSpanningTree) {
  std::mt19937_64 rng(39);
  for (int t = 0; t < 10; ++t) {
    const Graph g = testutil::random_graph(7, 0.6, rng);
    const Vector d = testutil::random_vector(g.m(), 1, 10, rng);
    const Matrix q = d.asDiagonal();
    const auto inst = testutil::instance_from(g, q);
    EXPECT_NEAR(heuristic_upper_bound(inst, 1).value, oracle::exhaustive_qmstp(g, q).value, 1e-9);
  }
}
