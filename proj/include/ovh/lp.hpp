#pragma once

#include "ovh/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace ovh {

inline constexpr double kFeasibilityTolerance = 1e-7;

/// { x free | A_ineq x <= b_ineq, A_eq x = b_eq }
struct FeasibilityProblem {
  Matrix A_ineq;
  Vector b_ineq;
  Matrix A_eq;
  Vector b_eq;

  Eigen::Index num_vars() const {
    return A_ineq.rows() > 0 || A_eq.rows() == 0 ? A_ineq.cols() : A_eq.cols();
  }

  void validate() const {
    if (A_ineq.rows() != b_ineq.size() || A_eq.rows() != b_eq.size()) {
      throw DimensionError("FeasibilityProblem: right-hand side length does not match rows");
    }
    if (A_ineq.rows() > 0 && A_eq.rows() > 0 && A_ineq.cols() != A_eq.cols()) {
      throw DimensionError("FeasibilityProblem: inequality and equality column counts differ");
    }
    detail::require_finite(A_ineq, "FeasibilityProblem A_ineq");
    detail::require_finite(b_ineq, "FeasibilityProblem b_ineq");
    detail::require_finite(A_eq, "FeasibilityProblem A_eq");
    detail::require_finite(b_eq, "FeasibilityProblem b_eq");
  }

  /// Largest constraint violation of x (inequalities one-sided, equalities absolute).
  double residual(const Vector& x) const {
    double r = 0.0;
    if (A_ineq.rows() > 0) r = std::max(r, (A_ineq * x - b_ineq).maxCoeff());
    if (A_eq.rows() > 0) r = std::max(r, (A_eq * x - b_eq).cwiseAbs().maxCoeff());
    return r;
  }
};

enum class LpStatus { Feasible, Infeasible };

struct FeasibilityResult {
  LpStatus status = LpStatus::Infeasible;
  std::optional<Vector> witness;
  double residual = std::numeric_limits<double>::infinity();

  bool feasible() const noexcept { return status == LpStatus::Feasible; }
};

/// Pivot cap exceeded.
class SolverStall : public ResourceCapError {
 public:
  using ResourceCapError::ResourceCapError;
};

namespace detail {

/// Dense simplex tableau over the split variables x = anchor + u - v, u, v >= 0.
/// Column layout: u (n) | v (n) | slacks (one per inequality) | artificials | rhs.
/// The last row holds reduced costs, with -objective in the rhs column.
class SimplexTableau {
 public:
  static constexpr double kPivotEps = 1e-9;
  static constexpr double kCostEps = 1e-11;

  SimplexTableau(const FeasibilityProblem& p, const Vector& anchor)
      : n_(p.num_vars()), m_ineq_(p.A_ineq.rows()), m_eq_(p.A_eq.rows()) {
    const Eigen::Index m = m_ineq_ + m_eq_;
    std::vector<Eigen::Index> art_rows;
    Vector rhs(m);
    for (Eigen::Index i = 0; i < m_ineq_; ++i) rhs(i) = p.b_ineq(i) - p.A_ineq.row(i).dot(anchor);
    for (Eigen::Index i = 0; i < m_eq_; ++i) rhs(m_ineq_ + i) = p.b_eq(i) - p.A_eq.row(i).dot(anchor);
    for (Eigen::Index i = 0; i < m; ++i) {
      if (i >= m_ineq_ || rhs(i) < 0.0) art_rows.push_back(i);
    }
    n_art_ = static_cast<Eigen::Index>(art_rows.size());
    art_begin_ = 2 * n_ + m_ineq_;
    rhs_col_ = art_begin_ + n_art_;
    t_.setZero(m + 1, rhs_col_ + 1);
    basis_.assign(static_cast<std::size_t>(m), -1);

    for (Eigen::Index i = 0; i < m; ++i) {
      const auto a = i < m_ineq_ ? p.A_ineq.row(i) : p.A_eq.row(i - m_ineq_);
      t_.row(i).segment(0, n_) = a;
      t_.row(i).segment(n_, n_) = -a;
      if (i < m_ineq_) t_(i, 2 * n_ + i) = 1.0;
      t_(i, rhs_col_) = rhs(i);
      if (rhs(i) < 0.0) t_.row(i) *= -1.0;
    }
    for (Eigen::Index k = 0; k < n_art_; ++k) {
      const Eigen::Index row = art_rows[static_cast<std::size_t>(k)];
      t_(row, art_begin_ + k) = 1.0;
      basis_[static_cast<std::size_t>(row)] = art_begin_ + k;
    }
    for (Eigen::Index i = 0; i < m_ineq_; ++i) {
      if (basis_[static_cast<std::size_t>(i)] < 0) basis_[static_cast<std::size_t>(i)] = 2 * n_ + i;
    }
    // Phase-one costs: 1 on each artificial, priced out against the basis.
    for (Eigen::Index row : art_rows) t_.row(m) -= t_.row(row);
    for (Eigen::Index k = 0; k < n_art_; ++k) t_(m, art_begin_ + k) = 0.0;
    max_pivots_ = 50 * static_cast<std::size_t>(m + rhs_col_);
  }

  Eigen::Index rows() const noexcept { return t_.rows() - 1; }
  double objective() const { return -t_(rows(), rhs_col_); }
  Eigen::Index artificial_count() const noexcept { return n_art_; }

  /// Bland's rule iterations on the current objective row. Columns >= `col_limit`
  /// never enter. Returns false when the objective is unbounded below.
  bool optimize(Eigen::Index col_limit) {
    const Eigen::Index m = rows();
    for (;;) {
      Eigen::Index enter = -1;
      for (Eigen::Index j = 0; j < col_limit; ++j) {
        if (t_(m, j) < -kCostEps) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return true;
      Eigen::Index leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < m; ++i) {
        const double a = t_(i, enter);
        if (a <= kPivotEps) continue;
        const double ratio = std::max(t_(i, rhs_col_), 0.0) / a;
        if (ratio < best ||
            (leave >= 0 && ratio == best && basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leave)])) {
          best = ratio;
          leave = i;
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
    }
  }

  void pivot(Eigen::Index r, Eigen::Index c) {
    if (++pivots_ > max_pivots_) {
      throw SolverStall("simplex: pivot cap of " + std::to_string(max_pivots_) + " exceeded");
    }
    t_.row(r) /= t_(r, c);
    const Vector col = t_.col(c);
    const Eigen::RowVectorXd prow = t_.row(r);
    for (Eigen::Index i = 0; i < t_.rows(); ++i) {
      if (i == r || col(i) == 0.0) continue;
      t_.row(i) -= col(i) * prow;
      t_(i, c) = 0.0;
    }
    basis_[static_cast<std::size_t>(r)] = c;
  }

  /// Pivot zero-level artificials out of the basis where a structural entry allows it.
  void expel_artificials() {
    for (Eigen::Index i = 0; i < rows(); ++i) {
      if (basis_[static_cast<std::size_t>(i)] < art_begin_) continue;
      for (Eigen::Index j = 0; j < art_begin_; ++j) {
        if (std::abs(t_(i, j)) > kPivotEps) {
          pivot(i, j);
          break;
        }
      }
    }
  }

  /// Replace the objective row with costs on x (for u) and -x (for v).
  void set_objective(const Vector& cost) {
    const Eigen::Index m = rows();
    t_.row(m).setZero();
    t_.row(m).segment(0, n_) = cost.transpose();
    t_.row(m).segment(n_, n_) = -cost.transpose();
    for (Eigen::Index i = 0; i < m; ++i) {
      const Eigen::Index b = basis_[static_cast<std::size_t>(i)];
      const double cb = b < 2 * n_ ? t_(m, b) : 0.0;
      if (cb != 0.0) t_.row(m) -= cb * t_.row(i);
    }
  }

  Vector point(const Vector& anchor) const {
    Vector x = anchor;
    for (Eigen::Index i = 0; i < rows(); ++i) {
      const Eigen::Index b = basis_[static_cast<std::size_t>(i)];
      if (b < n_) {
        x(b) += t_(i, rhs_col_);
      } else if (b < 2 * n_) {
        x(b - n_) -= t_(i, rhs_col_);
      }
    }
    return x;
  }

  Eigen::Index artificial_begin() const noexcept { return art_begin_; }
  Eigen::Index rhs_column() const noexcept { return rhs_col_; }

 private:
  Eigen::Index n_, m_ineq_, m_eq_;
  Eigen::Index n_art_ = 0, art_begin_ = 0, rhs_col_ = 0;
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> t_;
  std::vector<Eigen::Index> basis_;
  std::size_t pivots_ = 0;
  std::size_t max_pivots_ = 0;
};

inline Vector default_anchor(const FeasibilityProblem& p, const Vector* anchor) {
  if (anchor == nullptr) return Vector::Zero(p.num_vars());
  if (anchor->size() != p.num_vars()) throw DimensionError("solve_feasibility: anchor length mismatch");
  return *anchor;
}

inline FeasibilityResult solve_feasibility_impl(const FeasibilityProblem& p, double tol,
                                                const Vector* anchor_hint) {
  p.validate();
  if (!(tol > 0.0)) throw std::invalid_argument("solve_feasibility: tolerance must be positive");
  const Vector anchor = default_anchor(p, anchor_hint);
  FeasibilityResult result;
  if (p.A_ineq.rows() + p.A_eq.rows() == 0) {
    result.status = LpStatus::Feasible;
    result.witness = anchor;
    result.residual = 0.0;
    return result;
  }
  SimplexTableau tab(p, anchor);
  if (tab.artificial_count() > 0) tab.optimize(tab.artificial_begin());
  if (tab.objective() > tol) {
    result.residual = tab.objective();
    return result;
  }
  Vector w = tab.point(anchor);
  result.residual = p.residual(w);
  if (result.residual <= tol) {
    result.status = LpStatus::Feasible;
    result.witness = std::move(w);
  }
  return result;
}

}  // namespace detail

/// Phase-one simplex feasibility test with Bland's rule. Feasible iff the optimal
/// artificial objective is within `tol` and the extracted witness satisfies
/// every constraint within `tol` by direct substitution.
inline FeasibilityResult solve_feasibility(const FeasibilityProblem& p,
                                           double tol = kFeasibilityTolerance) {
  return detail::solve_feasibility_impl(p, tol, nullptr);
}

/// Same problem, with the free variables shifted by `anchor`. A point known to
/// satisfy most inequalities keeps the phase-one basis small; the status does
/// not depend on the anchor.
inline FeasibilityResult solve_feasibility(const FeasibilityProblem& p, double tol,
                                           const Vector& anchor) {
  return detail::solve_feasibility_impl(p, tol, &anchor);
}

struct LinearProgramSolution {
  enum class Status { Optimal, Infeasible, Unbounded };
  Status status = Status::Infeasible;
  Vector x;
  double value = 0.0;
};

/// min cost.x over the feasibility problem's constraint set (two-phase simplex).
inline LinearProgramSolution minimize(const FeasibilityProblem& p, const Vector& cost,
                                      double tol = kFeasibilityTolerance) {
  p.validate();
  if (cost.size() != p.num_vars()) throw DimensionError("minimize: cost length mismatch");
  LinearProgramSolution sol;
  const Vector anchor = Vector::Zero(p.num_vars());
  if (p.A_ineq.rows() + p.A_eq.rows() == 0) {
    if (cost.isZero(0.0)) {
      sol.status = LinearProgramSolution::Status::Optimal;
      sol.x = anchor;
    } else {
      sol.status = LinearProgramSolution::Status::Unbounded;
    }
    return sol;
  }
  detail::SimplexTableau tab(p, anchor);
  if (tab.artificial_count() > 0) tab.optimize(tab.artificial_begin());
  if (tab.objective() > tol) return sol;
  tab.expel_artificials();
  tab.set_objective(cost);
  if (!tab.optimize(tab.artificial_begin())) {
    sol.status = LinearProgramSolution::Status::Unbounded;
    return sol;
  }
  sol.status = LinearProgramSolution::Status::Optimal;
  sol.x = tab.point(anchor);
  sol.value = cost.dot(sol.x);
  return sol;
}

}  // namespace ovh
