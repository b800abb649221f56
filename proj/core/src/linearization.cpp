#include "stabcert/linearization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stabcert/linalg.hpp"
#include "stabcert/settings.hpp"

namespace stabcert::linearization {

namespace {

double norm_inf(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

Vector residual_vector(const dsl::SystemDef& sys, std::span<const double> x) {
  Vector g = dsl::eval_field(sys, x);
  if (sys.domain == TimeDomain::DT) {
    for (std::size_t i = 0; i < g.size(); ++i) g[i] -= x[i];
  }
  return g;
}

double residual_norm(const dsl::SystemDef& sys, std::span<const double> x) {
  try {
    const Vector g = residual_vector(sys, x);
    const double r = norm_inf(g);
    return std::isfinite(r) ? r : std::numeric_limits<double>::infinity();
  } catch (const dsl::DomainError&) {
    return std::numeric_limits<double>::infinity();
  }
}

}  // namespace

const char* to_string(JacobianMethod m) noexcept {
  return m == JacobianMethod::Symbolic ? "symbolic" : "finite-difference";
}

const char* to_string(Discretization d) noexcept { return d == Discretization::Euler ? "euler" : "zoh"; }

Discretization parse_discretization(const std::string& s) {
  if (s == "euler") return Discretization::Euler;
  if (s == "zoh") return Discretization::Zoh;
  throw InvalidArgument("discretization must be 'euler' or 'zoh', got '" + s + "'");
}

Matrix finite_difference_jacobian(const dsl::SystemDef& sys, std::span<const double> x) {
  const std::size_t n = sys.dim();
  if (x.size() != n) throw InvalidArgument("finite_difference_jacobian: wrong state dimension");
  Matrix jac(n, n);
  Vector probe(x.begin(), x.end());
  for (std::size_t j = 0; j < n; ++j) {
    const double h = settings().fd_step_rel * (1.0 + std::abs(x[j]));
    probe[j] = x[j] + h;
    const Vector fp = dsl::eval_field(sys, probe);
    probe[j] = x[j] - h;
    const Vector fm = dsl::eval_field(sys, probe);
    probe[j] = x[j];
    const double width = (x[j] + h) - (x[j] - h);
    for (std::size_t i = 0; i < n; ++i) jac(i, j) = (fp[i] - fm[i]) / width;
  }
  return jac;
}

JacobianResult jacobian_at(const dsl::SystemDef& sys, std::span<const double> x) {
  for (double v : x) {
    if (!std::isfinite(v)) throw InvalidArgument("jacobian_at: point has non-finite entries");
  }
  JacobianResult out;
  dsl::ExprMatrix symbolic;
  try {
    symbolic = dsl::jacobian_symbolic(sys);
  } catch (const dsl::DifferentiationError&) {
    out.a = finite_difference_jacobian(sys, x);
    out.method = JacobianMethod::FiniteDifference;
    return out;
  }
  const std::vector<double> env = sys.environment(x);
  try {
    out.a = dsl::evaluate(symbolic, env);
  } catch (const dsl::DomainError& e) {
    throw dsl::DomainError(std::string("jacobian: ") + e.what());
  }
  if (!out.a.all_finite()) throw dsl::DomainError("jacobian has non-finite entries");
  out.method = JacobianMethod::Symbolic;

  const Matrix fd = finite_difference_jacobian(sys, x);
  out.crosscheck_error = max_abs_diff(out.a, fd) / std::max(1.0, out.a.max_abs());
  out.crosscheck_ok = out.crosscheck_error <= settings().jacobian_crosscheck_rel;
  return out;
}

EquilibriumResult refine_equilibrium(const dsl::SystemDef& sys, std::span<const double> guess) {
  const std::size_t n = sys.dim();
  if (guess.size() != n) throw InvalidArgument("refine_equilibrium: guess has the wrong dimension");
  for (double v : guess) {
    if (!std::isfinite(v)) throw InvalidArgument("refine_equilibrium: guess has non-finite entries");
  }
  const NumericSettings& cfg = settings();

  EquilibriumResult res;
  res.x.assign(guess.begin(), guess.end());
  Vector g = residual_vector(sys, res.x);
  res.residual = norm_inf(g);

  for (int it = 0; it < cfg.newton_max_iterations; ++it) {
    if (res.residual <= cfg.newton_tol * (1.0 + norm_inf(res.x))) {
      res.converged = true;
      return res;
    }
    Matrix jac = jacobian_at(sys, res.x).a;
    if (sys.domain == TimeDomain::DT) {
      for (std::size_t i = 0; i < n; ++i) jac(i, i) -= 1.0;
    }
    const Vector step = linalg::LuDecomposition(std::move(jac)).solve(g);

    double t = 1.0;
    Vector trial(n);
    double trial_norm = std::numeric_limits<double>::infinity();
    bool improved = false;
    for (int halving = 0; halving <= cfg.newton_max_halvings; ++halving) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = res.x[i] - t * step[i];
      trial_norm = residual_norm(sys, trial);
      if (trial_norm <= res.residual) {
        improved = true;
        break;
      }
      t *= 0.5;
    }
    res.iterations = it + 1;
    if (!improved) return res;
    res.x = trial;
    g = residual_vector(sys, res.x);
    res.residual = trial_norm;
  }
  res.converged = res.residual <= cfg.newton_tol * (1.0 + norm_inf(res.x));
  return res;
}

Matrix discretize(const Matrix& ac, double ts, Discretization method) {
  if (!ac.square()) throw InvalidArgument("discretize: matrix must be square");
  if (!(ts > 0.0) || !std::isfinite(ts)) throw InvalidArgument("discretize: sampling time must be positive");
  if (method == Discretization::Euler) return Matrix::identity(ac.rows()) + ts * ac;
  return linalg::expm(ts * ac);
}

LinearizationResult linearize(const dsl::SystemDef& sys, std::span<const double> guess) {
  const EquilibriumResult eq = refine_equilibrium(sys, guess);
  const JacobianResult jac = jacobian_at(sys, eq.x);
  LinearizationResult out;
  out.x_e = eq.x;
  out.a = jac.a;
  out.domain = sys.domain;
  out.residual = eq.residual;
  out.jacobian_method = jac.method;
  out.jacobian_crosscheck_ok = jac.crosscheck_ok;
  out.newton_iterations = eq.iterations;
  out.verified = eq.residual <= settings().equilibrium_tol * (1.0 + norm_inf(eq.x));
  return out;
}

}  // namespace stabcert::linearization
