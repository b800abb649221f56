#include "stabcert/lyapunov.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "stabcert/deadline.hpp"
#include "stabcert/linalg.hpp"
#include "stabcert/memory.hpp"
#include "stabcert/settings.hpp"

namespace stabcert::lyapunov {

const char* to_string(NotCertifiedReason r) noexcept {
  switch (r) {
    case NotCertifiedReason::None: return "none";
    case NotCertifiedReason::NoUniqueSolution: return "NoUniqueSolution";
    case NotCertifiedReason::NotPD: return "NotPD";
    case NotCertifiedReason::ResidualTooLarge: return "ResidualTooLarge";
  }
  return "?";
}

namespace {

void check_inputs(const Matrix& a, const Matrix& q) {
  if (a.empty() || !a.square()) throw InvalidArgument("lyapunov: A must be square");
  if (q.rows() != a.rows() || q.cols() != a.cols()) throw InvalidArgument("lyapunov: Q must match A");
  const double scale = q.max_abs();
  for (std::size_t i = 0; i < q.rows(); ++i)
    for (std::size_t j = i + 1; j < q.cols(); ++j)
      if (std::abs(q(i, j) - q(j, i)) > settings().symmetry_rel * scale) {
        throw InvalidArgument("lyapunov: Q must be symmetric");
      }
}

// Up to 4x4 dense solve with partial pivoting for the coupled diagonal blocks.
struct SmallSystem {
  std::size_t n = 0;
  std::array<double, 16> m{};
  std::array<double, 4> rhs{};

  double& at(std::size_t i, std::size_t j) { return m[i * 4 + j]; }

  void solve(double tol) {
    for (std::size_t k = 0; k < n; ++k) {
      std::size_t p = k;
      for (std::size_t i = k + 1; i < n; ++i)
        if (std::abs(at(i, k)) > std::abs(at(p, k))) p = i;
      if (!(std::abs(at(p, k)) > tol)) {
        throw NoUniqueSolution("Lyapunov operator is singular: eigenvalues of A are in resonance");
      }
      if (p != k) {
        for (std::size_t j = 0; j < n; ++j) std::swap(at(k, j), at(p, j));
        std::swap(rhs[k], rhs[p]);
      }
      for (std::size_t i = k + 1; i < n; ++i) {
        const double f = at(i, k) / at(k, k);
        for (std::size_t j = k; j < n; ++j) at(i, j) -= f * at(k, j);
        rhs[i] -= f * rhs[k];
      }
    }
    for (std::size_t i = n; i-- > 0;) {
      double s = rhs[i];
      for (std::size_t j = i + 1; j < n; ++j) s -= at(i, j) * rhs[j];
      rhs[i] = s / at(i, i);
    }
  }
};

struct Blocks {
  std::vector<std::size_t> start;
  std::vector<std::size_t> size;
};

Blocks blocks_of(const Matrix& t) {
  Blocks b;
  std::size_t pos = 0;
  for (std::size_t s : linalg::schur_block_sizes(t)) {
    b.start.push_back(pos);
    b.size.push_back(s);
    pos += s;
  }
  return b;
}

// C = -U^T Q U
Matrix transformed_rhs(const linalg::SchurForm& sf, const Matrix& q) {
  Matrix c = sf.q.transpose() * (q * sf.q);
  c *= -1.0;
  return c;
}

Matrix back_transform(const linalg::SchurForm& sf, const Matrix& x) {
  Matrix p = sf.q * (x * sf.q.transpose());
  const std::size_t n = p.rows();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = 0.5 * (p(i, j) + p(j, i));
      p(i, j) = v;
      p(j, i) = v;
    }
  return p;
}

// T^T X + X T = C, T quasi-upper-triangular.
Matrix solve_ct_schur(const Matrix& t, const Matrix& c) {
  const std::size_t n = t.rows();
  const Blocks bl = blocks_of(t);
  const std::size_t nb = bl.start.size();
  const double tol = 1e-14 * std::max(1.0, t.max_abs());
  Matrix x(n, n);

  for (std::size_t k = 0; k < nb; ++k) {
    check_deadline();
    const std::size_t k0 = bl.start[k], kp = bl.size[k];
    for (std::size_t l = k; l < nb; ++l) {
      const std::size_t l0 = bl.start[l], lq = bl.size[l];
      SmallSystem sys;
      sys.n = kp * lq;
      for (std::size_t a = 0; a < kp; ++a) {
        for (std::size_t b = 0; b < lq; ++b) {
          double r = c(k0 + a, l0 + b);
          // - sum_{m<k} T_mk^T X_ml
          for (std::size_t s = 0; s < k0; ++s) r -= t(s, k0 + a) * x(s, l0 + b);
          // - sum_{m<l} X_km T_ml
          for (std::size_t s = 0; s < l0; ++s) r -= x(k0 + a, s) * t(s, l0 + b);
          sys.rhs[a + kp * b] = r;
        }
      }
      for (std::size_t a = 0; a < kp; ++a)
        for (std::size_t b = 0; b < lq; ++b) {
          const std::size_t row = a + kp * b;
          for (std::size_t a2 = 0; a2 < kp; ++a2) sys.at(row, a2 + kp * b) += t(k0 + a2, k0 + a);
          for (std::size_t b2 = 0; b2 < lq; ++b2) sys.at(row, a + kp * b2) += t(l0 + b2, l0 + b);
        }
      sys.solve(tol);
      for (std::size_t a = 0; a < kp; ++a)
        for (std::size_t b = 0; b < lq; ++b) {
          const double v = sys.rhs[a + kp * b];
          x(k0 + a, l0 + b) = v;
          x(l0 + b, k0 + a) = v;
        }
    }
  }
  return x;
}

// T X T^T - X = C, T quasi-upper-triangular.
Matrix solve_dt_schur(const Matrix& t, const Matrix& c) {
  const std::size_t n = t.rows();
  const Blocks bl = blocks_of(t);
  const std::size_t nb = bl.start.size();
  const double tmax = t.max_abs();
  const double tol = 1e-14 * std::max(1.0, tmax * tmax);
  Matrix x(n, n);
  Matrix y(n, n);  // rows of X T^T for completed block rows

  for (std::size_t kk = nb; kk-- > 0;) {
    check_deadline();
    const std::size_t k0 = bl.start[kk], kp = bl.size[kk];
    const std::size_t k_end = k0 + kp;
    for (std::size_t ll = kk + 1; ll-- > 0;) {
      const std::size_t l0 = bl.start[ll], lq = bl.size[ll];
      const std::size_t l_end = l0 + lq;
      // Z = sum_{j > l} X_kj T_lj^T  (kp x lq)
      double z[2][2] = {{0, 0}, {0, 0}};
      for (std::size_t a = 0; a < kp; ++a)
        for (std::size_t b = 0; b < lq; ++b) {
          double s = 0.0;
          for (std::size_t cidx = l_end; cidx < n; ++cidx) s += x(k0 + a, cidx) * t(l0 + b, cidx);
          z[a][b] = s;
        }
      SmallSystem sys;
      sys.n = kp * lq;
      for (std::size_t a = 0; a < kp; ++a) {
        for (std::size_t b = 0; b < lq; ++b) {
          double r = c(k0 + a, l0 + b);
          // - sum_{m > k} T_km Y_ml
          for (std::size_t s = k_end; s < n; ++s) r -= t(k0 + a, s) * y(s, l0 + b);
          // - T_kk Z
          for (std::size_t a2 = 0; a2 < kp; ++a2) r -= t(k0 + a, k0 + a2) * z[a2][b];
          sys.rhs[a + kp * b] = r;
        }
      }
      for (std::size_t a = 0; a < kp; ++a)
        for (std::size_t b = 0; b < lq; ++b) {
          const std::size_t row = a + kp * b;
          for (std::size_t a2 = 0; a2 < kp; ++a2)
            for (std::size_t b2 = 0; b2 < lq; ++b2)
              sys.at(row, a2 + kp * b2) += t(k0 + a, k0 + a2) * t(l0 + b, l0 + b2);
          sys.at(row, row) -= 1.0;
        }
      sys.solve(tol);
      for (std::size_t a = 0; a < kp; ++a)
        for (std::size_t b = 0; b < lq; ++b) {
          const double v = sys.rhs[a + kp * b];
          x(k0 + a, l0 + b) = v;
          x(l0 + b, k0 + a) = v;
        }
    }
    // Block row k of X is complete: Y_k = X_k T^T.
    for (std::size_t r = k0; r < k_end; ++r) {
      for (std::size_t col = 0; col < n; ++col) {
        double s = 0.0;
        const std::size_t j0 = col == 0 ? 0 : col - 1;
        for (std::size_t j = j0; j < n; ++j) s += x(r, j) * t(col, j);
        y(r, col) = s;
      }
    }
  }
  return x;
}

double ct_scale(const Matrix& a) { return a.max_abs(); }
double dt_scale(const Matrix& a) { return std::max(1.0, a.max_abs()); }

LyapunovSolution finish(const Matrix& a, const Matrix& q, Matrix p, TimeDomain domain,
                        std::chrono::steady_clock::time_point start) {
  LyapunovSolution sol;
  const std::size_t n = a.rows();
  sol.residual = domain == TimeDomain::CT ? ct_residual(a, p, q) : dt_residual(a, p, q);
  const double scale = domain == TimeDomain::CT ? ct_scale(a) : dt_scale(a);
  sol.residual_bound = settings().lyapunov_residual_rel * static_cast<double>(n) * scale * p.max_abs();
  sol.residual_ok = std::isfinite(sol.residual) && sol.residual <= sol.residual_bound;
  sol.pd = p.all_finite() && linalg::cholesky(p).has_value();
  sol.p = std::move(p);
  sol.solve_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return sol;
}

}  // namespace

double ct_residual(const Matrix& a, const Matrix& p, const Matrix& q) {
  Matrix r = a.transpose() * p + p * a + q;
  return r.max_abs();
}

double dt_residual(const Matrix& a, const Matrix& p, const Matrix& q) {
  Matrix r = a * (p * a.transpose()) - p + q;
  return r.max_abs();
}

LyapunovSolution solve_ct_lyapunov(const Matrix& a, const Matrix& q) {
  check_inputs(a, q);
  const auto start = std::chrono::steady_clock::now();
  const linalg::SchurForm sf = linalg::real_schur(a);
  const Matrix x = solve_ct_schur(sf.t, transformed_rhs(sf, q));
  return finish(a, q, back_transform(sf, x), TimeDomain::CT, start);
}

LyapunovSolution solve_dt_stein(const Matrix& a, const Matrix& q) {
  check_inputs(a, q);
  const auto start = std::chrono::steady_clock::now();
  const linalg::SchurForm sf = linalg::real_schur(a);
  const Matrix x = solve_dt_schur(sf.t, transformed_rhs(sf, q));
  return finish(a, q, back_transform(sf, x), TimeDomain::DT, start);
}

LyapunovSolution solve_kronecker(const Matrix& a, const Matrix& q, TimeDomain domain) {
  check_inputs(a, q);
  const std::size_t n = a.rows();
  if (n > static_cast<std::size_t>(settings().kronecker_max_dim)) {
    std::ostringstream msg;
    msg << "kronecker solve capped at n <= " << settings().kronecker_max_dim << " (got " << n << ")";
    throw InvalidArgument(msg.str());
  }
  const auto start = std::chrono::steady_clock::now();
  const std::size_t nn = n * n;
  // Column-major vec: index(i, j) = i + n j.
  Matrix k(nn, nn);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t row = i + n * j;
      if (domain == TimeDomain::CT) {
        // (A^T P)_ij = sum_r A_ri P_rj ; (P A)_ij = sum_r P_ir A_rj
        for (std::size_t r = 0; r < n; ++r) {
          k(row, r + n * j) += a(r, i);
          k(row, i + n * r) += a(r, j);
        }
      } else {
        // (A P A^T)_ij = sum_{r,s} A_ir P_rs A_js
        for (std::size_t r = 0; r < n; ++r) {
          const double air = a(i, r);
          if (air == 0.0) continue;
          for (std::size_t s = 0; s < n; ++s) k(row, r + n * s) += air * a(j, s);
        }
        k(row, row) -= 1.0;
      }
    }
  }
  Matrix rhs(nn, 1);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) rhs(i + n * j, 0) = -q(i, j);
  Matrix vec_p;
  try {
    vec_p = linalg::lu_solve(k, rhs);
  } catch (const SingularMatrix& e) {
    throw NoUniqueSolution(std::string("Kronecker system singular: ") + e.what());
  }
  Matrix p(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) p(i, j) = vec_p(i + n * j, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = 0.5 * (p(i, j) + p(j, i));
      p(i, j) = v;
      p(j, i) = v;
    }
  return finish(a, q, std::move(p), domain, start);
}

BaselineVerdict sdp_stability_test(const Matrix& a, TimeDomain domain, BaselineMethod method) {
  if (a.empty() || !a.square()) throw InvalidArgument("sdp_stability_test: matrix must be square");
  const auto start = std::chrono::steady_clock::now();
  BaselineVerdict v;
  {
    memory::PeakScope mem;
    const Matrix q = Matrix::identity(a.rows());
    try {
      LyapunovSolution sol;
      if (method == BaselineMethod::Kronecker) {
        sol = solve_kronecker(a, q, domain);
      } else {
        sol = domain == TimeDomain::CT ? solve_ct_lyapunov(a, q) : solve_dt_stein(a, q);
      }
      if (!sol.residual_ok) {
        v.reason = NotCertifiedReason::ResidualTooLarge;
      } else if (!sol.pd) {
        v.reason = NotCertifiedReason::NotPD;
      } else {
        v.stable = true;
      }
      v.solution = std::move(sol);
    } catch (const NoUniqueSolution&) {
      v.reason = NotCertifiedReason::NoUniqueSolution;
    }
    v.memory_bytes = mem.peak_bytes();
  }
  v.solve_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return v;
}

}  // namespace stabcert::lyapunov
