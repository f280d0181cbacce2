#include "qmst/prsm.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <chrono>
#include <cmath>

namespace qmst {

void PrsmParams::validate() const {
  if (tau && !(*tau > 0.0 && std::isfinite(*tau))) throw InvalidArgument("tau must be positive");
  const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
  if (!(gamma1 > -1.0 && gamma1 < 1.0)) throw InvalidArgument("gamma1 must lie in (-1, 1)");
  if (!(gamma2 > 0.0 && gamma2 < golden)) throw InvalidArgument("gamma2 must lie in (0, (1+sqrt 5)/2)");
  if (!(gamma1 + gamma2 > 0.0)) throw InvalidArgument("gamma1 + gamma2 must be positive");
  if (!(std::abs(gamma1) < 1.0 + gamma2 - gamma2 * gamma2)) {
    throw InvalidArgument("|gamma1| must be below 1 + gamma2 - gamma2^2");
  }
  if (!(eps_prsm > 0.0)) throw InvalidArgument("eps_prsm must be positive");
  if (!(eps_proj > 0.0)) throw InvalidArgument("eps_proj must be positive");
  if (!(cut_violation_eps >= 0.0)) throw InvalidArgument("cut_violation_eps must be nonnegative");
  if (ncutsmax && *ncutsmax < 0) throw InvalidArgument("ncutsmax must be nonnegative");
  if (ncutsmin < 0) throw InvalidArgument("ncutsmin must be nonnegative");
  if (!(epslbimprov >= 0.0)) throw InvalidArgument("epslbimprov must be nonnegative");
  if (noutermax < 1) throw InvalidArgument("noutermax must be at least 1");
  if (max_total_iters < 0) throw InvalidArgument("max_total_iters must be nonnegative");
  if (!(time_limit_secs >= 0.0)) throw InvalidArgument("time_limit_secs must be nonnegative");
  if (max_dykstra_cycles < 1) throw InvalidArgument("max_dykstra_cycles must be at least 1");
}

std::string_view termination_name(Termination t) {
  switch (t) {
    case Termination::Residual: return "residual";
    case Termination::GapClosed: return "gap_closed";
    case Termination::FewCuts: return "few_cuts";
    case Termination::SmallImprovement: return "small_improvement";
    case Termination::OuterCap: return "outer_cap";
    case Termination::IterCap: return "iter_cap";
    case Termination::TimeLimit: return "time_limit";
  }
  return "unknown";
}

Matrix facial_basis(int m, int n) {
  if (n < 3 || m < n - 1) throw InvalidArgument("facial basis needs m >= n-1 >= 2");
  Matrix v = Matrix::Zero(m + 1, m);
  v.topRows(m).diagonal().setConstant(n - 1);
  v.row(m).setOnes();
  Eigen::HouseholderQR<Matrix> qr(v);
  Matrix w = qr.householderQ() * Matrix::Identity(m + 1, m);
  return w;
}

double default_tau(const Matrix& q) {
  const double fro = q.norm();
  if (fro == 0.0) return 1.0;
  const double tr = q.trace();
  const double qmax = std::max(tr, fro);
  const double qmin = std::min(tr, fro);
  if (qmin > 0.0 && qmax / qmin < 1.2) return std::sqrt(qmin / static_cast<double>(q.rows() + 1) * fro);
  // A nonpositive trace makes the ratio meaningless; fall back to the norm.
  if (qmin <= 0.0) return std::sqrt(fro);
  return std::sqrt(qmax / qmin * fro);
}

Matrix initial_ytil(int n, int m) {
  if (n < 3 || m < n - 1) throw InvalidArgument("initial point needs m >= n-1 >= 2");
  const double diag = static_cast<double>(n - 1) / m;
  const double off = static_cast<double>(n - 1) * (n - 2) / (static_cast<double>(m) * (m - 1));
  Matrix y = Matrix::Constant(m + 1, m + 1, off);
  y.topLeftCorner(m, m).diagonal().setConstant(diag);
  y.col(m).setConstant(diag);
  y.row(m).setConstant(diag);
  y(m, m) = 1.0;
  return y;
}

PrsmState initial_state(const Graph& g) {
  PrsmState state;
  const Matrix w = facial_basis(g.m(), g.n());
  state.ytil = initial_ytil(g.n(), g.m());
  state.r = w.transpose() * state.ytil * w;
  state.s = Matrix::Zero(g.m() + 1, g.m() + 1);
  return state;
}

StepInfo prsm_inner_step(PrsmState& state, const PrsmParams& params, double tau, const Matrix& q_padded,
                         const Matrix& w, const Graph& g) {
  const int n = g.n();
  state.r = project_psd_trace(w.transpose() * (state.ytil + state.s / tau) * w, n);
  Matrix wrw = w * state.r * w.transpose();
  state.s += params.gamma1 * tau * (state.ytil - wrw);
  state.s = (0.5 * (state.s + state.s.transpose())).eval();

  DykstraOptions opts;
  opts.tolerance = params.eps_proj;
  opts.max_cycles = params.max_dykstra_cycles;
  const DykstraResult proj = dykstra_project(wrw - (q_padded + state.s) / tau, state.cuts, g, n, opts);
  state.ytil = proj.x;
  state.s += params.gamma2 * tau * (state.ytil - wrw);
  state.s = (0.5 * (state.s + state.s.transpose())).eval();
  ++state.k;
  return StepInfo{proj.cycles, proj.converged};
}

Residuals residuals(const Matrix& ytil_prev, const PrsmState& state, double tau, const Matrix& w) {
  Residuals r;
  r.primal = (state.ytil - w * state.r * w.transpose()).norm() / (1.0 + state.ytil.norm());
  r.dual = tau * (w.transpose() * (ytil_prev - state.ytil) * w).norm() / (1.0 + state.s.norm());
  return r;
}

std::vector<ViolatedCut> separate_cuts(const Matrix& ytil, const Graph& g, double eps, const CutClusters* existing) {
  std::vector<ViolatedCut> out;
  for (int f = 0; f < g.m(); ++f) {
    for (int i = 0; i < g.n(); ++i) {
      const Cut cut{i, f};
      const double v = cut_violation(ytil, cut, g);
      if (v > eps && (existing == nullptr || !existing->contains(cut))) out.push_back({cut, v});
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const ViolatedCut& a, const ViolatedCut& b) {
    if (a.violation != b.violation) return a.violation > b.violation;
    return a.cut < b.cut;
  });
  return out;
}

BoundResult solve_bound(const Instance& inst, const PrsmParams& params) {
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(clock::now() - start).count(); };

  params.validate();
  const Graph& g = inst.graph;
  const int n = g.n();
  const int m = g.m();
  if (n < 3) throw InvalidArgument("bound computation needs n >= 3");
  if (!g.is_connected()) throw InvalidArgument("graph is disconnected; no spanning tree exists");
  validate_costs(g, inst.q);

  const Matrix w = facial_basis(m, n);
  const Matrix q_padded = pad_cost(inst.q);
  const double tau = params.tau.value_or(default_tau(inst.q));
  const int ncutsmax = params.ncutsmax.value_or(m);

  BoundResult result;
  result.tau = tau;
  PrsmState state = initial_state(g);
  double previous_best = 0.0;

  for (int round = 1;; ++round) {
    state.outer = round;
    OuterRound log;
    log.round = round;
    log.cuts_active = state.cuts.size();
    std::optional<Termination> stop;
    while (true) {
      if (result.iterations >= params.max_total_iters) {
        stop = Termination::IterCap;
        break;
      }
      if (elapsed() >= params.time_limit_secs) {
        stop = Termination::TimeLimit;
        break;
      }
      const Matrix previous = state.ytil;
      const StepInfo info = prsm_inner_step(state, params, tau, q_padded, w, g);
      ++result.iterations;
      ++log.inner_iterations;
      log.dykstra_cycles += info.dykstra_cycles;
      const Residuals res = residuals(previous, state, tau, w);
      log.primal_residual = res.primal;
      log.dual_residual = res.dual;
      if (std::max(res.primal, res.dual) <= params.eps_prsm) break;
    }

    const SafeBound bound = valid_lower_bound(state.s, q_padded, w, state.cuts, g, n);
    state.best_valid_lb = std::max(state.best_valid_lb, bound.value);
    log.valid_lb = bound.value;
    log.best_lb = state.best_valid_lb;
    log.lp_value = bound.lp_value;
    log.lambda_max_term = bound.lambda_max_term;
    if (round == 1) {
      result.lb_dnn = state.best_valid_lb;
      result.time_dnn = elapsed();
    }

    auto finish = [&](Termination why) {
      log.seconds = elapsed();
      result.outer_log.push_back(log);
      result.lb_cuts = state.best_valid_lb;
      result.termination = why;
      result.time_total = elapsed();
      return result;
    };

    if (stop) return finish(*stop);
    if (inst.ub && *inst.ub - state.best_valid_lb <= 1e-6 * std::max(1.0, std::abs(*inst.ub))) {
      return finish(Termination::GapClosed);
    }
    if (round >= 2 &&
        (state.best_valid_lb - previous_best) / std::max(1.0, std::abs(previous_best)) < params.epslbimprov) {
      return finish(Termination::SmallImprovement);
    }
    if (!params.use_cuts) return finish(Termination::Residual);
    if (round >= params.noutermax) return finish(Termination::OuterCap);

    std::vector<ViolatedCut> found = separate_cuts(state.ytil, g, params.cut_violation_eps, &state.cuts);
    log.cuts_found = static_cast<int>(found.size());
    if (log.cuts_found < params.ncutsmin) return finish(Termination::FewCuts);

    if (static_cast<int>(found.size()) > ncutsmax) found.resize(ncutsmax);
    std::vector<Cut> added;
    added.reserve(found.size());
    for (const ViolatedCut& v : found) added.push_back(v.cut);
    state.cuts.add(added, g);
    log.cuts_added = static_cast<int>(added.size());
    result.cuts_added += log.cuts_added;
    previous_best = state.best_valid_lb;
    log.seconds = elapsed();
    result.outer_log.push_back(log);
  }
}

}  // namespace qmst
