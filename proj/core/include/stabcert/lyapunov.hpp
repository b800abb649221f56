#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include "stabcert/error.hpp"
#include "stabcert/matrix.hpp"
#include "stabcert/system.hpp"

namespace stabcert::lyapunov {

// The Lyapunov/Stein operator is singular: some eigenvalue pair satisfies
// l_i + l_j = 0 (CT) or l_i l_j = 1 (DT).
class NoUniqueSolution : public Error {
 public:
  using Error::Error;
};

struct LyapunovSolution {
  Matrix p;                 // exactly symmetric
  double residual = 0.0;    // |A^T P + P A + Q|max  or  |A P A^T - P + Q|max
  double residual_bound = 0.0;
  bool residual_ok = false;
  bool pd = false;          // Cholesky verdict on P
  double solve_time = 0.0;  // seconds
};

// A^T P + P A = -Q by Bartels-Stewart on the real Schur form of A.
LyapunovSolution solve_ct_lyapunov(const Matrix& a, const Matrix& q);
// A P A^T - P = -Q by blockwise back-substitution on the real Schur form.
LyapunovSolution solve_dt_stein(const Matrix& a, const Matrix& q);

// Dense n^2 x n^2 vectorized solve; reproduces the steep cost of treating P
// as n^2 free unknowns. Rejects n > kronecker_max_dim.
//   CT: (I (x) A^T + A^T (x) I) vec P = -vec Q
//   DT: (A (x) A - I) vec P = -vec Q
LyapunovSolution solve_kronecker(const Matrix& a, const Matrix& q, TimeDomain domain);

enum class BaselineMethod { Schur, Kronecker };

enum class NotCertifiedReason { None, NoUniqueSolution, NotPD, ResidualTooLarge };
const char* to_string(NotCertifiedReason r) noexcept;

struct BaselineVerdict {
  bool stable = false;
  NotCertifiedReason reason = NotCertifiedReason::None;
  std::optional<LyapunovSolution> solution;
  double solve_time = 0.0;
  std::size_t memory_bytes = 0;
};

// Solves with Q = I; stable iff the solve succeeds, the residual bound holds
// and P is positive definite.
BaselineVerdict sdp_stability_test(const Matrix& a, TimeDomain domain,
                                   BaselineMethod method = BaselineMethod::Schur);

double ct_residual(const Matrix& a, const Matrix& p, const Matrix& q);
double dt_residual(const Matrix& a, const Matrix& p, const Matrix& q);

}  // namespace stabcert::lyapunov
