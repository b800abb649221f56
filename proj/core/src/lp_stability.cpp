#include "stabcert/lp_stability.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "stabcert/memory.hpp"
#include "stabcert/settings.hpp"
#include "stabcert/simplex.hpp"

namespace stabcert::lp {

const char* to_string(StabilityLpStatus s) noexcept {
  switch (s) {
    case StabilityLpStatus::StrictlyFeasible: return "strictly_feasible";
    case StabilityLpStatus::Infeasible: return "infeasible";
    case StabilityLpStatus::DegenerateMargin: return "degenerate_margin";
  }
  return "?";
}

double certificate_slack(const embedding::EmbeddingPair& pair, std::span<const double> p) {
  Vector ap = pair.hat * p;
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < ap.size(); ++i) {
    const double sigma = pair.domain == TimeDomain::DT ? p[i] : 0.0;
    worst = std::max(worst, ap[i] - sigma);
  }
  return worst;
}

LpOutcome lp_stability_test(const embedding::EmbeddingPair& pair) {
  const auto start = std::chrono::steady_clock::now();
  memory::PeakScope mem;
  LpOutcome out;
  {
    const std::size_t n = pair.n();
    const bool dt = pair.domain == TimeDomain::DT;

    // Ahat commutes with the swap of its two halves, so averaging any
    // feasible p with its swap keeps eps: an optimum p = [v; v] exists and
    // the program reduces to the comparison matrix M = up + down.
    // With v = q + eps 1, q >= 0:
    //   CT: M q + eps (M 1 + 1) <= 0
    //   DT: (M - I) q + eps (M 1) <= 0
    //   sum(q) + n eps = n
    LpProblem prob;
    prob.sense = ObjectiveSense::Maximize;
    prob.objective.assign(n + 1, 0.0);
    prob.objective[n] = 1.0;
    prob.constraints = Matrix(n + 1, n + 1);
    prob.senses.assign(n + 1, RowSense::LessEqual);
    prob.senses[n] = RowSense::Equal;
    prob.rhs.assign(n + 1, 0.0);
    prob.rhs[n] = static_cast<double>(n);
    prob.lower_bounds.assign(n + 1, 0.0);
    prob.lower_bounds[n] = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      auto up = pair.up.row(i);
      auto down = pair.down.row(i);
      auto dst = prob.constraints.row(i);
      double row_sum = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        dst[j] = up[j] + down[j];
        row_sum += dst[j];
      }
      if (dt) dst[i] -= 1.0;
      dst[n] = dt ? row_sum : row_sum + 1.0;
    }
    auto last = prob.constraints.row(n);
    std::fill(last.begin(), last.end() - 1, 1.0);
    last[n] = static_cast<double>(n);

    const LpSolution sol = solve_lp(prob);
    out.iterations = sol.iterations;
    if (sol.status != LpStatus::Optimal) {
      // Cannot happen for a well-formed pair: the program is always feasible
      // and eps is bounded by min(p) <= 1.
      out.status = StabilityLpStatus::Infeasible;
      out.margin = -std::numeric_limits<double>::infinity();
    } else {
      const double eps = sol.x[n];
      out.margin = eps;
      out.p.resize(2 * n);
      for (std::size_t i = 0; i < n; ++i) out.p[i] = out.p[n + i] = sol.x[i] + eps;

      const double tol = settings().lp_margin_tol;
      if (eps > tol) {
        // Replay against the raw inequalities before certifying.
        const double slack = certificate_slack(pair, out.p);
        const double min_p = *std::min_element(out.p.begin(), out.p.end());
        const bool replay_ok = slack < -0.5 * eps && min_p > 0.5 * eps;
        out.status = replay_ok ? StabilityLpStatus::StrictlyFeasible : StabilityLpStatus::DegenerateMargin;
      } else if (eps < -tol) {
        out.status = StabilityLpStatus::Infeasible;
      } else {
        out.status = StabilityLpStatus::DegenerateMargin;
      }
    }
  }
  out.memory_bytes = mem.peak_bytes();
  out.solve_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace stabcert::lp
