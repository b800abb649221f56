#pragma once

#include <optional>
#include <string>

#include "stabcert/matrix.hpp"
#include "stabcert/system.hpp"

namespace stabcert::linearization {

struct EquilibriumResult {
  Vector x;
  double residual = 0.0;   // |f(x)|inf (CT) or |f(x) - x|inf (DT)
  int iterations = 0;
  bool converged = false;  // false: x is the best iterate found
};

// Damped Newton on g(x) = f(x) (CT) or f(x) - x (DT). Throws SingularMatrix
// when the Newton matrix is singular at an iterate.
EquilibriumResult refine_equilibrium(const dsl::SystemDef& sys, std::span<const double> guess);

enum class JacobianMethod { Symbolic, FiniteDifference };
const char* to_string(JacobianMethod m) noexcept;

struct JacobianResult {
  Matrix a;
  JacobianMethod method = JacobianMethod::Symbolic;
  // Symbolic only: relative disagreement with central differences, and
  // whether it stayed within jacobian_crosscheck_rel.
  double crosscheck_error = 0.0;
  bool crosscheck_ok = true;
};

JacobianResult jacobian_at(const dsl::SystemDef& sys, std::span<const double> x);

// Central differences with per-column step fd_step_rel * (1 + |x_j|).
Matrix finite_difference_jacobian(const dsl::SystemDef& sys, std::span<const double> x);

enum class Discretization { Euler, Zoh };
const char* to_string(Discretization d) noexcept;
Discretization parse_discretization(const std::string& s);

// euler: I + Ts * Ac; zoh: expm(Ts * Ac).
Matrix discretize(const Matrix& ac, double ts, Discretization method);

struct LinearizationResult {
  Vector x_e;
  Matrix a;
  TimeDomain domain = TimeDomain::CT;
  double residual = 0.0;
  JacobianMethod jacobian_method = JacobianMethod::Symbolic;
  bool verified = false;             // residual <= equilibrium_tol * (1 + |x_e|inf)
  bool jacobian_crosscheck_ok = true;
  int newton_iterations = 0;
};

LinearizationResult linearize(const dsl::SystemDef& sys, std::span<const double> guess);

}  // namespace stabcert::linearization
