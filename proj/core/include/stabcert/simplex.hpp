#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "stabcert/error.hpp"
#include "stabcert/matrix.hpp"

namespace stabcert::lp {

enum class RowSense { LessEqual, Equal };
enum class ObjectiveSense { Maximize, Minimize };

// optimize c^T x  s.t.  G x (<= | =) h,  x >= lower.
// A lower bound of -infinity makes the variable free.
struct LpProblem {
  Vector objective;
  Matrix constraints;
  std::vector<RowSense> senses;
  Vector rhs;
  Vector lower_bounds;  // empty means all zero
  ObjectiveSense sense = ObjectiveSense::Maximize;

  std::size_t num_vars() const noexcept { return objective.size(); }
  std::size_t num_rows() const noexcept { return rhs.size(); }
};

enum class LpStatus { Optimal, Infeasible, Unbounded };
const char* to_string(LpStatus s) noexcept;

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  Vector x;            // Optimal only
  double value = 0.0;  // objective at x
  int iterations = 0;  // pivots over both phases
};

// Pivot count exceeded simplex_cap_factor * (rows + vars).
class IterationLimit : public Error {
 public:
  using Error::Error;
};

// Dense two-phase primal simplex. Dantzig pricing switches to Bland's rule
// after bland_switch_factor * (rows + vars) pivots.
LpSolution solve_lp(const LpProblem& problem);

}  // namespace stabcert::lp
