#include "qmst/validation.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>

namespace qmst {

bool CheckReport::passed() const { return failures() == 0; }

int CheckReport::failures() const {
  int bad = 0;
  for (const CheckItem& item : items) bad += !item.passed;
  return bad;
}

bool ValidationReport::passed() const {
  for (const CheckReport& g : groups) {
    if (!g.passed()) return false;
  }
  return true;
}

std::string ValidationReport::text() const {
  std::ostringstream out;
  out.imbue(std::locale::classic());
  for (const CheckReport& g : groups) {
    out << (g.passed() ? "[PASS] " : "[FAIL] ") << g.group << " (" << static_cast<int>(g.items.size()) - g.failures() << "/"
        << g.items.size() << ")\n";
    for (const CheckItem& item : g.items) {
      out << "  " << (item.passed ? "ok   " : "FAIL ") << item.name << ": value " << item.value;
      if (item.tolerance > 0) out << ", tol " << item.tolerance;
      if (!item.detail.empty()) out << " (" << item.detail << ")";
      out << "\n";
    }
  }
  out << (passed() ? "all checks passed" : "some checks FAILED") << "\n";
  return out.str();
}

Graph counterexample_graph() {
  return Graph(4, {{0, 1}, {0, 2}, {0, 3}, {2, 3}, {1, 3}, {1, 2}});
}

CutsetCounterexample cutset_counterexample() {
  CutsetCounterexample c;
  c.x.resize(6);
  c.x << 2.0 / 3, 2.0 / 3, 2.0 / 3, 1.0 / 3, 1.0 / 3, 1.0 / 3;
  const Matrix i3 = Matrix::Identity(3, 3);
  const Matrix j3 = Matrix::Ones(3, 3);
  c.y.resize(6, 6);
  c.y << i3 / 3 + j3 / 3, 2 * i3 / 3, 2 * i3 / 3, i3 / 3;
  return c;
}

MisdpCounterexample misdp_counterexample() {
  MisdpCounterexample c;
  c.x = Matrix::Constant(4, 4, 0.75);
  c.x.row(0).setConstant(0.25);
  c.x.col(0).setConstant(0.25);
  c.x.diagonal().setZero();
  const Matrix i3 = Matrix::Identity(3, 3);
  const Matrix j3 = Matrix::Ones(3, 3);
  c.y.resize(6, 6);
  c.y << j3 / 16 + 3 * i3 / 16, 3 * j3 / 16, 3 * j3 / 16, 9 * j3 / 16 + 3 * i3 / 16;
  return c;
}

namespace {

void add(CheckReport& r, std::string name, bool ok, double value, double tol = 0.0, std::string detail = {}) {
  r.items.push_back(CheckItem{std::move(name), ok, value, tol, std::move(detail)});
}

Matrix lifted(const Matrix& y, const Vector& x) {
  const Eigen::Index m = x.size();
  Matrix z(m + 1, m + 1);
  z.topLeftCorner(m, m) = y;
  z.topRightCorner(m, 1) = x;
  z.bottomLeftCorner(1, m) = x.transpose();
  z(m, m) = 1.0;
  return z;
}

Vector eigenvalues(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
  return eig.eigenvalues();
}

/// Minimum of sum_{e in delta(S)} x_e over nonempty proper S.
double min_cut_value(const Graph& g, const Vector& x) {
  double best = std::numeric_limits<double>::infinity();
  const unsigned full = (1u << g.n()) - 1;
  for (unsigned s = 1; s < full; ++s) {
    double sum = 0.0;
    for (int k = 0; k < g.m(); ++k) {
      const Edge& e = g.edge(k);
      if (((s >> e.u) & 1u) != ((s >> e.v) & 1u)) sum += x(k);
    }
    best = std::min(best, sum);
  }
  return best;
}

void for_each_spanning_tree(const Graph& g, const std::function<void(const std::vector<int>&)>& visit) {
  std::vector<int> chosen;
  std::function<void(int, std::vector<int>)> rec = [&](int k, std::vector<int> comp) {
    if (static_cast<int>(chosen.size()) == g.n() - 1) {
      visit(chosen);
      return;
    }
    if (g.m() - k < g.n() - 1 - static_cast<int>(chosen.size())) return;
    const Edge& e = g.edge(k);
    const int a = comp[e.u];
    const int b = comp[e.v];
    if (a != b) {
      std::vector<int> merged = comp;
      for (int& c : merged) {
        if (c == b) c = a;
      }
      chosen.push_back(k);
      rec(k + 1, std::move(merged));
      chosen.pop_back();
    }
    rec(k + 1, std::move(comp));
  };
  std::vector<int> comp(g.n());
  std::iota(comp.begin(), comp.end(), 0);
  rec(0, std::move(comp));
}

}  // namespace

CheckReport check_counterexample_cutset_feasible(const CutsetCounterexample& data) {
  CheckReport r;
  r.group = "cutset_counterexample";
  const Graph g = counterexample_graph();
  const int n = g.n();
  const Vector& x = data.x;
  const Matrix& y = data.y;
  const double tol = 1e-12;

  add(r, "Y symmetric", (y - y.transpose()).cwiseAbs().maxCoeff() <= tol, (y - y.transpose()).cwiseAbs().maxCoeff(),
      tol);
  const double diag_err = (y.diagonal() - x).cwiseAbs().maxCoeff();
  add(r, "diag(Y) = x", diag_err <= tol, diag_err, tol);
  const double row_err = (y.rowwise().sum() - (n - 1) * x).cwiseAbs().maxCoeff();
  add(r, "Y 1 = (n-1) x", row_err <= tol, row_err, tol);
  add(r, "0 <= Y <= J", y.minCoeff() >= -tol && y.maxCoeff() <= 1 + tol, y.minCoeff(), tol,
      "min entry; max " + std::to_string(y.maxCoeff()));
  add(r, "0 <= x <= 1", x.minCoeff() >= -tol && x.maxCoeff() <= 1 + tol, x.minCoeff(), tol);
  const double sum_err = std::abs(x.sum() - (n - 1));
  add(r, "sum x = n-1", sum_err <= tol, sum_err, tol);
  const double cut = min_cut_value(g, x);
  add(r, "all 14 cut-set sums >= 1", cut >= 1 - tol, cut, tol, "minimum over nonempty proper S");

  const Vector lambda = eigenvalues(lifted(y, x));
  double closest = std::numeric_limits<double>::infinity();
  for (double l : lambda) {
    if (std::abs(l + 1.0 / 3) < std::abs(closest + 1.0 / 3)) closest = l;
  }
  add(r, "Z has eigenvalue -1/3", std::abs(closest + 1.0 / 3) <= 1e-9, closest, 1e-9);
  add(r, "Z not PSD", lambda.minCoeff() < -1e-9, lambda.minCoeff(), 1e-9, "smallest eigenvalue");
  return r;
}

CheckReport check_counterexample_misdp_feasible(const MisdpCounterexample& data) {
  CheckReport r;
  r.group = "misdp_counterexample";
  const Graph g = counterexample_graph();
  const int n = g.n();
  const Matrix& xm = data.x;
  const Matrix& y = data.y;
  const double tol = 1e-12;

  const double xsym = (xm - xm.transpose()).cwiseAbs().maxCoeff();
  add(r, "X symmetric", xsym <= tol, xsym, tol);
  add(r, "X zero diagonal", xm.diagonal().cwiseAbs().maxCoeff() <= tol, xm.diagonal().cwiseAbs().maxCoeff(), tol);
  add(r, "0 <= X <= 1", xm.minCoeff() >= -tol && xm.maxCoeff() <= 1 + tol, xm.minCoeff(), tol);
  const double weight_err = std::abs(xm.sum() - 2.0 * (n - 1));
  add(r, "<X, J> = 2(n-1)", weight_err <= tol, weight_err, tol);

  Vector b;
  try {
    b = b_map(xm, g);
  } catch (const InvalidArgument& e) {
    add(r, "X supported on E", false, 1.0, 0.0, e.what());
    return r;
  }
  Vector expected(6);
  expected << 0.25, 0.25, 0.25, 0.75, 0.75, 0.75;
  const double b_err = (b - expected).cwiseAbs().maxCoeff();
  add(r, "B(X) = (1/4,1/4,1/4,3/4,3/4,3/4)", b_err <= tol, b_err, tol);

  const double ysym = (y - y.transpose()).cwiseAbs().maxCoeff();
  add(r, "Y symmetric", ysym <= tol, ysym, tol);
  const double diag_err = (y.diagonal() - b).cwiseAbs().maxCoeff();
  add(r, "diag(Y) = B(X)", diag_err <= tol, diag_err, tol);

  const double z_min = eigenvalues(lifted(y, b)).minCoeff();
  add(r, "(Y, B(X); B(X)^T, 1) PSD", z_min >= -1e-9, z_min, 1e-9, "smallest eigenvalue");

  const SpectralConstants c = spectral_constants(n);
  Matrix lmi = laplacian(xm);
  lmi.array() += c.alpha;
  lmi.diagonal().array() -= c.beta;
  const double lmi_min = eigenvalues(lmi).minCoeff();
  add(r, "Diag(X1) - X + alpha J - beta I PSD", lmi_min >= -1e-9, lmi_min, 1e-9, "smallest eigenvalue");

  double star = 0.0;
  for (int e : g.incident(0)) star += b(e);
  add(r, "delta(v1) sum = 3/4", std::abs(star - 0.75) <= tol, star, tol);
  add(r, "cut-set for S={v1} violated", star < 1.0 - 1e-9, star, 1e-9);
  return r;
}

CheckReport check_cg_identities(const Graph& g) {
  const int n = g.n();
  if (n < 3 || n > 10) throw InvalidArgument("CG identity check needs 3 <= n <= 10");
  CheckReport r;
  r.group = "cg_identities";
  const std::string tag = "n=" + std::to_string(n) + " ";
  const SpectralConstants c = spectral_constants(n);

  int bad_floor = 0;
  const unsigned full = (1u << n) - 1;
  for (unsigned s = 1; s < full; ++s) {
    const double size = std::popcount(s);
    if (std::floor(size * (size * c.alpha - c.beta)) != -1.0) ++bad_floor;
  }
  add(r, tag + "floor(|S|(|S|alpha - beta)) = -1", bad_floor == 0, bad_floor, 0.0,
      std::to_string(full - 1) + " subsets, value = violations");

  long trees = 0;
  long bad_cutset = 0;
  long bad_rlt = 0;
  std::vector<int> degree(n);
  for_each_spanning_tree(g, [&](const std::vector<int>& tree) {
    ++trees;
    for (unsigned s = 1; s < full; ++s) {
      int crossing = 0;
      for (int k : tree) {
        const Edge& e = g.edge(k);
        crossing += ((s >> e.u) & 1u) != ((s >> e.v) & 1u);
      }
      bad_cutset += crossing < 1;
    }
    // At Y = x x^T the RLT sum over delta(i) in row f is x_f deg_T(i).
    std::fill(degree.begin(), degree.end(), 0);
    for (int k : tree) {
      ++degree[g.edge(k).u];
      ++degree[g.edge(k).v];
    }
    for (int f = 0; f < g.m(); ++f) {
      const bool in_tree = std::find(tree.begin(), tree.end(), f) != tree.end();
      for (int i = 0; i < n; ++i) bad_rlt += in_tree && degree[i] < 1;
    }
  });
  add(r, tag + "spanning trees enumerated", trees > 0, static_cast<double>(trees));
  add(r, tag + "cut-set constraints at tree lifts", bad_cutset == 0, static_cast<double>(bad_cutset), 0.0,
      "value = violations");
  add(r, tag + "RLT constraints at tree lifts", bad_rlt == 0, static_cast<double>(bad_rlt), 0.0,
      "value = violations");
  return r;
}

ValidationReport run_validation(const ValidationOptions& options) {
  if (options.min_n < 3 || options.max_n > 10 || options.min_n > options.max_n) {
    throw InvalidArgument("validation sweep needs 3 <= min_n <= max_n <= 10");
  }
  ValidationReport report;
  CutsetCounterexample first = cutset_counterexample();
  MisdpCounterexample second = misdp_counterexample();
  if (options.perturb) {
    first.y(0, 3) += 0.05;
    first.y(3, 0) += 0.05;
    second.x(0, 1) = second.x(1, 0) = 0.3;
  }
  report.groups.push_back(check_counterexample_cutset_feasible(first));
  report.groups.push_back(check_counterexample_misdp_feasible(second));

  CheckReport sweep;
  sweep.group = "cg_identities";
  for (int n = options.min_n; n <= options.max_n; ++n) {
    CheckReport part = check_cg_identities(Graph::complete(n));
    sweep.items.insert(sweep.items.end(), part.items.begin(), part.items.end());
  }
  report.groups.push_back(std::move(sweep));
  return report;
}

}  // namespace qmst
