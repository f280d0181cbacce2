#include "qmst/simplex.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace qmst {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
constexpr double kInf = std::numeric_limits<double>::infinity();

enum class VarState : unsigned char { Basic, AtLower, AtUpper };

class BoundedSimplex {
 public:
  BoundedSimplex(const LpProblem& p, int max_iterations)
      : rows_(static_cast<int>(p.a.rows())),
        vars_(static_cast<int>(p.a.cols())),
        total_(vars_ + rows_),
        max_iterations_(max_iterations) {
    lo_ = Vector::Zero(total_);
    up_ = Vector::Constant(total_, kInf);
    lo_.head(vars_) = p.lower;
    up_.head(vars_) = p.upper;
    x_ = Vector::Zero(total_);
    x_.head(vars_) = p.lower;
    state_.assign(total_, VarState::AtLower);

    const Vector residual = p.b - p.a * p.lower;
    sign_ = Vector::Ones(rows_);
    for (int i = 0; i < rows_; ++i) {
      if (residual(i) < 0) sign_(i) = -1.0;
    }
    tableau_.resize(rows_, total_);
    tableau_.leftCols(vars_) = sign_.asDiagonal() * p.a;
    tableau_.rightCols(rows_).setIdentity();
    basis_.resize(rows_);
    for (int i = 0; i < rows_; ++i) {
      basis_[i] = vars_ + i;
      state_[vars_ + i] = VarState::Basic;
      x_(vars_ + i) = std::abs(residual(i));
    }
    rhs_scale_ = 1.0 + p.b.cwiseAbs().maxCoeff();
  }

  LpSolution solve(const Vector& c) {
    LpSolution out;
    Vector phase1 = Vector::Zero(total_);
    phase1.tail(rows_).setOnes();
    LpStatus status = run(phase1);
    if (status == LpStatus::IterationLimit) return finish(c, status);
    if (x_.tail(rows_).sum() > 1e-7 * rows_ * rhs_scale_) return finish(c, LpStatus::Infeasible);

    for (int i = 0; i < rows_; ++i) {
      const int art = vars_ + i;
      up_(art) = 0.0;
      if (state_[art] != VarState::Basic) {
        x_(art) = 0.0;
        state_[art] = VarState::AtLower;
      }
    }
    Vector phase2 = Vector::Zero(total_);
    phase2.head(vars_) = c;
    status = run(phase2);
    return finish(c, status);
  }

 private:
  LpSolution finish(const Vector& c, LpStatus status) {
    LpSolution out;
    out.status = status;
    out.iterations = iterations_;
    out.x = x_.head(vars_).cwiseMax(lo_.head(vars_)).cwiseMin(up_.head(vars_));
    out.objective = c.dot(out.x);
    Vector cb(rows_);
    for (int i = 0; i < rows_; ++i) cb(i) = basis_[i] < vars_ ? c(basis_[i]) : 0.0;
    out.duals = (tableau_.rightCols(rows_).transpose() * cb).cwiseProduct(sign_);
    return out;
  }

  LpStatus run(const Vector& cost) {
    Vector cb(rows_);
    for (int i = 0; i < rows_; ++i) cb(i) = cost(basis_[i]);
    Vector d = cost - tableau_.transpose() * cb;
    const double dtol = 1e-9 * std::max(1.0, cost.cwiseAbs().maxCoeff());
    constexpr double ptol = 1e-9;
    int degenerate_run = 0;
    bool bland = false;

    while (true) {
      if (iterations_ >= max_iterations_) return LpStatus::IterationLimit;

      int q = -1;
      double best = 0.0;
      for (int j = 0; j < total_; ++j) {
        if (state_[j] == VarState::Basic || lo_(j) == up_(j)) continue;
        double score = 0.0;
        if (state_[j] == VarState::AtLower && d(j) < -dtol) score = -d(j);
        if (state_[j] == VarState::AtUpper && d(j) > dtol) score = d(j);
        if (score <= 0.0) continue;
        if (bland) {
          q = j;
          break;
        }
        if (score > best) {
          best = score;
          q = j;
        }
      }
      if (q < 0) return LpStatus::Optimal;
      ++iterations_;

      const double dir = state_[q] == VarState::AtLower ? 1.0 : -1.0;
      double step = up_(q) - lo_(q);
      int leave = -1;
      double leave_alpha = 0.0;
      for (int i = 0; i < rows_; ++i) {
        const double alpha = dir * tableau_(i, q);
        const int b = basis_[i];
        double limit;
        if (alpha > ptol) {
          limit = (x_(b) - lo_(b)) / alpha;
        } else if (alpha < -ptol) {
          if (up_(b) == kInf) continue;
          limit = (up_(b) - x_(b)) / -alpha;
        } else {
          continue;
        }
        limit = std::max(limit, 0.0);
        const bool better = limit < step - 1e-12 ||
                            (limit <= step + 1e-12 && leave >= 0 && std::abs(alpha) > std::abs(leave_alpha));
        if (leave < 0 ? limit <= step : better) {
          step = limit;
          leave = i;
          leave_alpha = alpha;
        }
      }
      if (step == kInf) return LpStatus::Unbounded;

      for (int i = 0; i < rows_; ++i) x_(basis_[i]) -= step * dir * tableau_(i, q);
      x_(q) += dir * step;

      if (step <= 1e-12) {
        if (++degenerate_run > 50) bland = true;
      } else {
        degenerate_run = 0;
        bland = false;
      }

      if (leave < 0) {
        state_[q] = dir > 0 ? VarState::AtUpper : VarState::AtLower;
        x_(q) = dir > 0 ? up_(q) : lo_(q);
        continue;
      }

      const int out_var = basis_[leave];
      if (leave_alpha > 0) {
        x_(out_var) = lo_(out_var);
        state_[out_var] = VarState::AtLower;
      } else {
        x_(out_var) = up_(out_var);
        state_[out_var] = VarState::AtUpper;
      }
      basis_[leave] = q;
      state_[q] = VarState::Basic;
      pivot(leave, q, d);
    }
  }

  void pivot(int p, int q, Vector& d) {
    const double piv = tableau_(p, q);
    tableau_.row(p) /= piv;
    const Vector column = tableau_.col(q);
    const Eigen::RowVectorXd prow = tableau_.row(p);
    tableau_.noalias() -= column * prow;
    tableau_.row(p) = prow;
    d -= d(q) * prow.transpose();
    d(q) = 0.0;
  }

  int rows_;
  int vars_;
  int total_;
  int max_iterations_;
  int iterations_ = 0;
  double rhs_scale_ = 1.0;
  RowMatrix tableau_;
  Vector lo_, up_, x_, sign_;
  std::vector<VarState> state_;
  std::vector<int> basis_;
};

}  // namespace

LpSolution solve_lp(const LpProblem& p, int max_iterations) {
  const auto rows = p.a.rows();
  const auto cols = p.a.cols();
  if (p.b.size() != rows || p.c.size() != cols || p.lower.size() != cols || p.upper.size() != cols) {
    throw InvalidArgument("LP dimensions do not match");
  }
  if (!p.lower.allFinite()) throw InvalidArgument("LP lower bounds must be finite");
  if ((p.upper.array() < p.lower.array()).any()) throw InvalidArgument("LP has an empty bound interval");
  if (rows == 0) {
    LpSolution s;
    s.status = LpStatus::Optimal;
    s.x.resize(cols);
    for (Eigen::Index j = 0; j < cols; ++j) s.x(j) = p.c(j) < 0 && std::isfinite(p.upper(j)) ? p.upper(j) : p.lower(j);
    if (((p.c.array() < 0) && !p.upper.array().isFinite()).any()) s.status = LpStatus::Unbounded;
    s.objective = p.c.dot(s.x);
    s.duals.resize(0);
    return s;
  }
  BoundedSimplex solver(p, max_iterations);
  return solver.solve(p.c);
}

}  // namespace qmst
