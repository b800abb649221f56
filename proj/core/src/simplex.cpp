#include "stabcert/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "stabcert/deadline.hpp"
#include "stabcert/settings.hpp"

namespace stabcert::lp {

const char* to_string(LpStatus s) noexcept {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
  }
  return "?";
}

namespace {

enum class ColumnKind { Structural, StructuralNeg, Slack, Artificial };

struct Column {
  ColumnKind kind;
  std::size_t source;  // original variable (structural) or row (slack/artificial)
};

class Tableau {
 public:
  Tableau(const LpProblem& p) : problem_(p) {
    const std::size_t k = p.num_rows();
    const std::size_t m = p.num_vars();
    const NumericSettings& cfg = settings();
    tol_ = cfg.simplex_tol;
    const std::size_t budget = k + m;
    bland_after_ = static_cast<long>(cfg.bland_switch_factor) * static_cast<long>(budget);
    cap_ = static_cast<long>(cfg.simplex_cap_factor) * static_cast<long>(budget);

    lower_.assign(m, 0.0);
    if (!p.lower_bounds.empty()) lower_ = p.lower_bounds;

    for (std::size_t j = 0; j < m; ++j) {
      columns_.push_back({ColumnKind::Structural, j});
      if (std::isinf(lower_[j])) columns_.push_back({ColumnKind::StructuralNeg, j});
    }

    // Shift finite lower bounds into the right-hand side and make it nonnegative.
    Vector b = p.rhs;
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < m; ++j)
        if (!std::isinf(lower_[j])) b[i] -= p.constraints(i, j) * lower_[j];
    std::vector<double> row_sign(k, 1.0);
    std::vector<bool> needs_artificial(k, false);
    for (std::size_t i = 0; i < k; ++i) {
      if (b[i] < 0.0) row_sign[i] = -1.0;
      needs_artificial[i] = p.senses[i] == RowSense::Equal || row_sign[i] < 0.0;
    }
    std::vector<std::size_t> slack_col(k, npos), art_col(k, npos);
    for (std::size_t i = 0; i < k; ++i) {
      if (p.senses[i] == RowSense::LessEqual) {
        slack_col[i] = columns_.size();
        columns_.push_back({ColumnKind::Slack, i});
      }
    }
    for (std::size_t i = 0; i < k; ++i) {
      if (needs_artificial[i]) {
        art_col[i] = columns_.size();
        columns_.push_back({ColumnKind::Artificial, i});
      }
    }

    rows_ = k;
    rhs_ = columns_.size();
    t_ = Matrix(k + 1, columns_.size() + 1);
    basis_.assign(k, npos);
    for (std::size_t i = 0; i < k; ++i) {
      auto row = t_.row(i);
      const double s = row_sign[i];
      for (std::size_t c = 0; c < columns_.size(); ++c) {
        const Column& col = columns_[c];
        if (col.kind == ColumnKind::Structural) row[c] = s * p.constraints(i, col.source);
        if (col.kind == ColumnKind::StructuralNeg) row[c] = -s * p.constraints(i, col.source);
      }
      if (slack_col[i] != npos) row[slack_col[i]] = s;
      if (art_col[i] != npos) {
        row[art_col[i]] = 1.0;
        basis_[i] = art_col[i];
      } else {
        basis_[i] = slack_col[i];
      }
      row[rhs_] = s * b[i];
    }
    feas_tol_ = tol_ * std::max(1.0, std::abs(*std::max_element(b.begin(), b.end(),
                                                              [](double x, double y) { return std::abs(x) < std::abs(y); })));
  }

  LpSolution solve() {
    LpSolution out;
    if (has_artificials()) {
      setup_phase1();
      run();  // bounded: the phase-1 objective cannot exceed zero
      if (t_(rows_, rhs_) < -feas_tol_) {
        out.status = LpStatus::Infeasible;
        out.iterations = static_cast<int>(iterations_);
        return out;
      }
      expel_artificials();
    }
    setup_phase2();
    const bool bounded = run();
    out.iterations = static_cast<int>(iterations_);
    if (!bounded) {
      out.status = LpStatus::Unbounded;
      return out;
    }
    out.status = LpStatus::Optimal;
    out.x = extract();
    double value = 0.0;
    for (std::size_t j = 0; j < out.x.size(); ++j) value += problem_.objective[j] * out.x[j];
    out.value = value;
    return out;
  }

 private:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  bool has_artificials() const {
    return std::any_of(columns_.begin(), columns_.end(),
                       [](const Column& c) { return c.kind == ColumnKind::Artificial; });
  }

  bool eligible(std::size_t c) const { return !(phase2_ && columns_[c].kind == ColumnKind::Artificial); }

  void setup_phase1() {
    auto obj = t_.row(rows_);
    std::fill(obj.begin(), obj.end(), 0.0);
    for (std::size_t i = 0; i < rows_; ++i) {
      if (columns_[basis_[i]].kind != ColumnKind::Artificial) continue;
      auto row = t_.row(i);
      for (std::size_t c = 0; c <= rhs_; ++c) obj[c] -= row[c];
    }
    for (std::size_t i = 0; i < rows_; ++i)
      if (columns_[basis_[i]].kind == ColumnKind::Artificial) obj[basis_[i]] = 0.0;
  }

  double cost(std::size_t c) const {
    const Column& col = columns_[c];
    const double sign = problem_.sense == ObjectiveSense::Maximize ? 1.0 : -1.0;
    if (col.kind == ColumnKind::Structural) return sign * problem_.objective[col.source];
    if (col.kind == ColumnKind::StructuralNeg) return -sign * problem_.objective[col.source];
    return 0.0;
  }

  void setup_phase2() {
    phase2_ = true;
    auto obj = t_.row(rows_);
    std::fill(obj.begin(), obj.end(), 0.0);
    for (std::size_t c = 0; c < columns_.size(); ++c) obj[c] = -cost(c);
    for (std::size_t i = 0; i < rows_; ++i) {
      const double cb = cost(basis_[i]);
      if (cb == 0.0) continue;
      auto row = t_.row(i);
      for (std::size_t c = 0; c <= rhs_; ++c) obj[c] += cb * row[c];
    }
    for (std::size_t i = 0; i < rows_; ++i) obj[basis_[i]] = 0.0;
  }

  void expel_artificials() {
    for (std::size_t i = 0; i < rows_; ++i) {
      if (columns_[basis_[i]].kind != ColumnKind::Artificial) continue;
      auto row = t_.row(i);
      std::size_t best = npos;
      double best_mag = tol_;
      for (std::size_t c = 0; c < columns_.size(); ++c) {
        if (columns_[c].kind == ColumnKind::Artificial) continue;
        if (std::abs(row[c]) > best_mag) {
          best_mag = std::abs(row[c]);
          best = c;
        }
      }
      // No candidate: the row is redundant and its artificial stays at zero.
      if (best != npos) pivot(i, best);
    }
  }

  // Returns false if the problem is unbounded in the current phase.
  bool run() {
    for (;;) {
      check_deadline();
      const bool bland = iterations_ >= bland_after_;
      const std::size_t enter = price(bland);
      if (enter == npos) return true;
      const std::size_t leave = ratio_test(enter, bland);
      if (leave == npos) return false;
      if (++iterations_ > cap_) {
        std::ostringstream msg;
        msg << "simplex exceeded the iteration cap of " << cap_ << " pivots";
        throw IterationLimit(msg.str());
      }
      pivot(leave, enter);
    }
  }

  std::size_t price(bool bland) const {
    auto obj = t_.row(rows_);
    std::size_t best = npos;
    double best_val = -tol_;
    for (std::size_t c = 0; c < columns_.size(); ++c) {
      if (!eligible(c)) continue;
      if (obj[c] < best_val) {
        best = c;
        if (bland) return c;
        best_val = obj[c];
      }
    }
    return best;
  }

  std::size_t ratio_test(std::size_t enter, bool bland) const {
    std::size_t best = npos;
    double best_ratio = std::numeric_limits<double>::infinity();
    double best_piv = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) {
      const double a = t_(i, enter);
      if (a <= tol_) continue;
      const double ratio = std::max(t_(i, rhs_), 0.0) / a;
      bool take = false;
      if (best == npos || ratio < best_ratio - 1e-12 * std::max(1.0, best_ratio)) {
        take = true;
      } else if (ratio <= best_ratio + 1e-12 * std::max(1.0, best_ratio)) {
        take = bland ? basis_[i] < basis_[best] : a > best_piv;
      }
      if (take) {
        best = i;
        best_ratio = std::min(ratio, best_ratio);
        best_piv = a;
      }
    }
    return best;
  }

  void pivot(std::size_t r, std::size_t c) {
    auto pr = t_.row(r);
    const double piv = pr[c];
    nz_.clear();
    for (std::size_t j = 0; j <= rhs_; ++j) {
      if (pr[j] == 0.0) continue;
      pr[j] /= piv;
      nz_.push_back(j);
    }
    pr[c] = 1.0;
    for (std::size_t i = 0; i <= rows_; ++i) {
      if (i == r) continue;
      auto ri = t_.row(i);
      const double f = ri[c];
      if (f == 0.0) continue;
      for (std::size_t j : nz_) ri[j] -= f * pr[j];
      ri[c] = 0.0;
    }
    basis_[r] = c;
  }

  Vector extract() const {
    const std::size_t m = problem_.num_vars();
    std::vector<double> colval(columns_.size(), 0.0);
    for (std::size_t i = 0; i < rows_; ++i) colval[basis_[i]] = t_(i, rhs_);
    Vector x(m, 0.0);
    for (std::size_t j = 0; j < m; ++j)
      if (!std::isinf(lower_[j])) x[j] = lower_[j];
    for (std::size_t c = 0; c < columns_.size(); ++c) {
      const Column& col = columns_[c];
      if (col.kind == ColumnKind::Structural) x[col.source] += colval[c];
      if (col.kind == ColumnKind::StructuralNeg) x[col.source] -= colval[c];
    }
    return x;
  }

  const LpProblem& problem_;
  Vector lower_;
  std::vector<Column> columns_;
  std::vector<std::size_t> basis_;
  std::vector<std::size_t> nz_;
  Matrix t_;
  std::size_t rows_ = 0;
  std::size_t rhs_ = 0;
  double tol_ = 1e-9;
  double feas_tol_ = 1e-9;
  long iterations_ = 0;
  long bland_after_ = 0;
  long cap_ = 0;
  bool phase2_ = false;
};

void validate(const LpProblem& p) {
  const std::size_t k = p.num_rows();
  const std::size_t m = p.num_vars();
  if (m == 0 || k == 0) throw InvalidArgument("solve_lp: need at least one variable and one constraint");
  if (p.constraints.rows() != k || p.constraints.cols() != m) {
    throw InvalidArgument("solve_lp: constraint matrix shape does not match rhs/objective");
  }
  if (p.senses.size() != k) throw InvalidArgument("solve_lp: one sense per constraint row required");
  if (!p.lower_bounds.empty() && p.lower_bounds.size() != m) {
    throw InvalidArgument("solve_lp: lower bounds must cover every variable");
  }
  auto finite = [](double v) { return std::isfinite(v); };
  if (!std::all_of(p.objective.begin(), p.objective.end(), finite) ||
      !std::all_of(p.rhs.begin(), p.rhs.end(), finite) || !p.constraints.all_finite()) {
    throw InvalidArgument("solve_lp: problem data must be finite");
  }
  for (double l : p.lower_bounds) {
    if (std::isnan(l) || l == std::numeric_limits<double>::infinity()) {
      throw InvalidArgument("solve_lp: lower bounds must be finite or -infinity");
    }
  }
}

}  // namespace

LpSolution solve_lp(const LpProblem& problem) {
  validate(problem);
  return Tableau(problem).solve();
}

}  // namespace stabcert::lp
