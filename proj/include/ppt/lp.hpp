// Dense two-phase simplex for the small linear programs in this library:
// polytope membership / ray-scaling queries and the constrained extremal
// polynomial problem. Bland's rule throughout, so the solve is deterministic
// and cannot cycle.
#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace ppt {

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

struct LpResult {
  LpStatus status = LpStatus::kInfeasible;
  double objective = 0.0;
  std::vector<double> x;
};

// Solves  max c^T x  s.t.  A x = b,  x >= 0.
// A is row-major, size rows x cols. Rows with b < 0 are sign-flipped internally.
class SimplexSolver {
 public:
  SimplexSolver(std::vector<std::vector<double>> a, std::vector<double> b,
                std::vector<double> c)
      : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)) {
    rows_ = a_.size();
    cols_ = rows_ ? a_[0].size() : 0;
    if (b_.size() != rows_ || c_.size() != cols_)
      throw std::invalid_argument("SimplexSolver: inconsistent dimensions");
  }

  LpResult solve() {
    for (std::size_t i = 0; i < rows_; ++i) {
      if (b_[i] < 0.0) {
        b_[i] = -b_[i];
        for (auto& v : a_[i]) v = -v;
      }
    }
    // Tableau with artificial variables appended; phase 1 drives them to zero.
    std::size_t total = cols_ + rows_;
    tab_.assign(rows_, std::vector<double>(total + 1, 0.0));
    basis_.resize(rows_);
    for (std::size_t i = 0; i < rows_; ++i) {
      for (std::size_t j = 0; j < cols_; ++j) tab_[i][j] = a_[i][j];
      tab_[i][cols_ + i] = 1.0;
      tab_[i][total] = b_[i];
      basis_[i] = cols_ + i;
    }

    std::vector<double> phase1_cost(total, 0.0);
    for (std::size_t j = cols_; j < total; ++j) phase1_cost[j] = -1.0;
    double p1 = run_phase(phase1_cost, total, total);
    if (p1 < -kFeasTol) return {LpStatus::kInfeasible, 0.0, {}};

    // Pivot any artificial still in the basis out onto a structural column.
    // If the row has no structural entry it is redundant and stays put at zero.
    for (std::size_t i = 0; i < rows_; ++i) {
      if (basis_[i] >= cols_) {
        std::size_t piv = cols_;
        for (std::size_t j = 0; j < cols_; ++j) {
          if (std::fabs(tab_[i][j]) > kPivTol) {
            piv = j;
            break;
          }
        }
        if (piv < cols_) pivot(i, piv, total);
      }
    }

    // Phase 2: artificials carry zero cost and may not re-enter the basis.
    std::vector<double> phase2_cost(total, 0.0);
    for (std::size_t j = 0; j < cols_; ++j) phase2_cost[j] = c_[j];
    double obj = run_phase(phase2_cost, total, cols_);
    if (unbounded_) return {LpStatus::kUnbounded, 0.0, {}};

    LpResult r;
    r.status = LpStatus::kOptimal;
    r.objective = obj;
    r.x.assign(cols_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i)
      if (basis_[i] < cols_) r.x[basis_[i]] = tab_[i][total];
    return r;
  }

 private:
  static constexpr double kFeasTol = 1e-8;
  static constexpr double kPivTol = 1e-11;

  double run_phase(const std::vector<double>& cost, std::size_t total,
                   std::size_t enter_limit) {
    unbounded_ = false;
    // Reduced costs z_j - c_j recomputed per iteration; sizes here are small
    // enough that clarity beats an incremental update.
    for (std::size_t iter = 0;; ++iter) {
      if (iter > 50000) throw std::runtime_error("simplex: iteration cap hit");
      std::vector<double> y(rows_);
      for (std::size_t i = 0; i < rows_; ++i) y[i] = cost[basis_[i]];
      std::size_t enter = total;
      for (std::size_t j = 0; j < enter_limit; ++j) {  // Bland: first improving
        double zj = 0.0;
        for (std::size_t i = 0; i < rows_; ++i) zj += y[i] * tab_[i][j];
        if (cost[j] - zj > kReducedTol) {
          enter = j;
          break;
        }
      }
      if (enter == total) break;  // optimal for this phase
      std::size_t leave = rows_;
      double best = 0.0;
      for (std::size_t i = 0; i < rows_; ++i) {
        if (tab_[i][enter] > kPivTol) {
          double ratio = tab_[i][total] / tab_[i][enter];
          if (leave == rows_ || ratio < best - 1e-15 ||
              (std::fabs(ratio - best) <= 1e-15 && basis_[i] < basis_[leave])) {
            leave = i;
            best = ratio;
          }
        }
      }
      if (leave == rows_) {
        unbounded_ = true;
        break;
      }
      pivot(leave, enter, total);
    }
    double obj = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) obj += cost[basis_[i]] * tab_[i][total];
    return obj;
  }

  void pivot(std::size_t r, std::size_t c, std::size_t total) {
    double p = tab_[r][c];
    for (std::size_t j = 0; j <= total; ++j) tab_[r][j] /= p;
    for (std::size_t i = 0; i < rows_; ++i) {
      if (i == r) continue;
      double f = tab_[i][c];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j <= total; ++j) tab_[i][j] -= f * tab_[r][j];
    }
    basis_[r] = c;
  }

  static constexpr double kReducedTol = 1e-9;

  std::vector<std::vector<double>> a_;
  std::vector<double> b_;
  std::vector<double> c_;
  std::vector<std::vector<double>> tab_;
  std::vector<std::size_t> basis_;
  std::size_t rows_ = 0, cols_ = 0;
  bool unbounded_ = false;
};

inline LpResult solve_lp(std::vector<std::vector<double>> a, std::vector<double> b,
                         std::vector<double> c) {
  return SimplexSolver(std::move(a), std::move(b), std::move(c)).solve();
}

// max c^T x  s.t.  A x <= b,  x >= 0, with b >= 0: the slack basis is feasible,
// so no phase 1 is needed. Dantzig pricing with a Bland fallback on stall.
class IneqSimplexSolver {
 public:
  IneqSimplexSolver(const std::vector<std::vector<double>>& a,
                    const std::vector<double>& b, const std::vector<double>& c)
      : rows_(a.size()), cols_(c.size()) {
    for (double v : b)
      if (v < 0.0) throw std::invalid_argument("IneqSimplexSolver: b must be >= 0");
    total_ = cols_ + rows_;
    tab_.assign(rows_, std::vector<double>(total_ + 1, 0.0));
    basis_.resize(rows_);
    for (std::size_t i = 0; i < rows_; ++i) {
      for (std::size_t j = 0; j < cols_; ++j) tab_[i][j] = a[i][j];
      tab_[i][cols_ + i] = 1.0;
      tab_[i][total_] = b[i];
      basis_[i] = cols_ + i;
    }
    cost_.assign(total_, 0.0);
    for (std::size_t j = 0; j < cols_; ++j) cost_[j] = c[j];
  }

  LpResult solve() {
    bool bland = false;
    double last_obj = 0.0;
    int stall = 0;
    for (std::size_t iter = 0;; ++iter) {
      if (iter > 100000) throw std::runtime_error("IneqSimplexSolver: iteration cap");
      std::vector<double> y(rows_);
      for (std::size_t i = 0; i < rows_; ++i) y[i] = cost_[basis_[i]];
      std::size_t enter = total_;
      double best_rc = kReducedTol;
      for (std::size_t j = 0; j < total_; ++j) {
        double zj = 0.0;
        for (std::size_t i = 0; i < rows_; ++i) zj += y[i] * tab_[i][j];
        double rc = cost_[j] - zj;
        if (rc > best_rc) {
          enter = j;
          best_rc = rc;
          if (bland) break;  // Bland: first improving column
        }
      }
      if (enter == total_) break;
      std::size_t leave = rows_;
      double best = 0.0;
      for (std::size_t i = 0; i < rows_; ++i) {
        if (tab_[i][enter] > kPivTol) {
          double ratio = tab_[i][total_] / tab_[i][enter];
          if (leave == rows_ || ratio < best - 1e-15 ||
              (std::fabs(ratio - best) <= 1e-15 && basis_[i] < basis_[leave])) {
            leave = i;
            best = ratio;
          }
        }
      }
      if (leave == rows_) return {LpStatus::kUnbounded, 0.0, {}};
      pivot(leave, enter);
      double obj = objective();
      if (obj <= last_obj + 1e-14 * (1.0 + std::fabs(last_obj))) {
        if (++stall > 80) bland = true;  // degenerate cycling guard
      } else {
        stall = 0;
        last_obj = obj;
      }
    }
    LpResult r;
    r.status = LpStatus::kOptimal;
    r.objective = objective();
    r.x.assign(cols_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i)
      if (basis_[i] < cols_) r.x[basis_[i]] = tab_[i][total_];
    return r;
  }

 private:
  static constexpr double kPivTol = 1e-11;
  static constexpr double kReducedTol = 1e-9;

  double objective() const {
    double obj = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) obj += cost_[basis_[i]] * tab_[i][total_];
    return obj;
  }

  void pivot(std::size_t r, std::size_t c) {
    double p = tab_[r][c];
    for (std::size_t j = 0; j <= total_; ++j) tab_[r][j] /= p;
    for (std::size_t i = 0; i < rows_; ++i) {
      if (i == r) continue;
      double f = tab_[i][c];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j <= total_; ++j) tab_[i][j] -= f * tab_[r][j];
    }
    basis_[r] = c;
  }

  std::size_t rows_, cols_, total_;
  std::vector<std::vector<double>> tab_;
  std::vector<std::size_t> basis_;
  std::vector<double> cost_;
};

inline LpResult solve_lp_ineq(const std::vector<std::vector<double>>& a,
                              const std::vector<double>& b,
                              const std::vector<double>& c) {
  return IneqSimplexSolver(a, b, c).solve();
}

}  // namespace ppt
