#include "stabcert/linalg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "stabcert/deadline.hpp"
#include "stabcert/error.hpp"
#include "stabcert/settings.hpp"

namespace stabcert::linalg {

namespace {

void require_square(const Matrix& a, const char* op) {
  if (a.empty() || !a.square()) throw InvalidArgument(std::string(op) + ": matrix must be square");
}

}  // namespace

// ---------------------------------------------------------------------------
// LU

LuDecomposition::LuDecomposition(Matrix a) : lu_(std::move(a)) {
  require_square(lu_, "lu");
  const std::size_t n = lu_.rows();
  const double threshold = settings().lu_pivot_rel * lu_.max_abs();
  perm_.resize(n);
  for (std::size_t i = 0; i < n; ++i) perm_[i] = i;

  for (std::size_t k = 0; k < n; ++k) {
    check_deadline();
    std::size_t p = k;
    double best = std::abs(lu_(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      const double v = std::abs(lu_(i, k));
      if (v > best) {
        best = v;
        p = i;
      }
    }
    if (best < threshold || best == 0.0) {
      std::ostringstream msg;
      msg << "matrix is singular to working precision (pivot " << best << " at column " << k << ")";
      throw SingularMatrix(msg.str());
    }
    if (p != k) {
      auto rk = lu_.row(k);
      auto rp = lu_.row(p);
      std::swap_ranges(rk.begin(), rk.end(), rp.begin());
      std::swap(perm_[k], perm_[p]);
      sign_ = -sign_;
    }
    const double pivot = lu_(k, k);
    auto rk = lu_.row(k);
    for (std::size_t i = k + 1; i < n; ++i) {
      auto ri = lu_.row(i);
      const double l = ri[k] / pivot;
      ri[k] = l;
      if (l == 0.0) continue;
      for (std::size_t j = k + 1; j < n; ++j) ri[j] -= l * rk[j];
    }
  }
}

Matrix LuDecomposition::solve(const Matrix& b) const {
  const std::size_t n = lu_.rows();
  if (b.rows() != n) throw InvalidArgument("lu_solve: right-hand side row count differs from n");
  const std::size_t k = b.cols();
  Matrix x(n, k);
  for (std::size_t i = 0; i < n; ++i) {
    auto src = b.row(perm_[i]);
    std::copy(src.begin(), src.end(), x.row(i).begin());
  }
  // forward substitution with unit-diagonal L
  for (std::size_t i = 0; i < n; ++i) {
    auto xi = x.row(i);
    for (std::size_t m = 0; m < i; ++m) {
      const double l = lu_(i, m);
      if (l == 0.0) continue;
      auto xm = x.row(m);
      for (std::size_t c = 0; c < k; ++c) xi[c] -= l * xm[c];
    }
  }
  for (std::size_t ii = n; ii-- > 0;) {
    auto xi = x.row(ii);
    for (std::size_t m = ii + 1; m < n; ++m) {
      const double u = lu_(ii, m);
      if (u == 0.0) continue;
      auto xm = x.row(m);
      for (std::size_t c = 0; c < k; ++c) xi[c] -= u * xm[c];
    }
    const double d = lu_(ii, ii);
    for (std::size_t c = 0; c < k; ++c) xi[c] /= d;
  }
  return x;
}

Vector LuDecomposition::solve(std::span<const double> b) const {
  Matrix rhs(b.size(), 1, b);
  Matrix x = solve(rhs);
  return Vector(x.data().begin(), x.data().end());
}

double LuDecomposition::determinant() const noexcept {
  double d = sign_;
  for (std::size_t i = 0; i < lu_.rows(); ++i) d *= lu_(i, i);
  return d;
}

Matrix lu_solve(const Matrix& a, const Matrix& b) { return LuDecomposition(a).solve(b); }

double determinant(const Matrix& a) {
  try {
    return LuDecomposition(a).determinant();
  } catch (const SingularMatrix&) {
    return 0.0;
  }
}

// ---------------------------------------------------------------------------
// Cholesky

std::optional<Matrix> cholesky(const Matrix& s) {
  require_square(s, "cholesky");
  const std::size_t n = s.rows();
  const double scale = s.max_abs();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::abs(s(i, j) - s(j, i)) > settings().symmetry_rel * scale) {
        throw InvalidArgument("cholesky: input is not symmetric");
      }
    }
  }
  Matrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = s(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > 0.0)) return std::nullopt;
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double v = 0.5 * (s(i, j) + s(j, i));
      for (std::size_t k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
      l(i, j) = v / ljj;
    }
  }
  return l;
}

// ---------------------------------------------------------------------------
// Hessenberg reduction and Francis QR (after the EISPACK orthes/hqr2 pair)

HessenbergForm hessenberg(const Matrix& a) {
  require_square(a, "hessenberg");
  const std::size_t n = a.rows();
  Matrix h = a;
  Matrix v = Matrix::identity(n);
  if (n < 3) return {std::move(v), std::move(h)};

  std::vector<double> ort(n, 0.0);
  const std::size_t high = n - 1;
  for (std::size_t m = 1; m + 1 <= high; ++m) {
    double scale = 0.0;
    for (std::size_t i = m; i <= high; ++i) scale += std::abs(h(i, m - 1));
    if (scale == 0.0) continue;

    double hh = 0.0;
    for (std::size_t i = high + 1; i-- > m;) {
      ort[i] = h(i, m - 1) / scale;
      hh += ort[i] * ort[i];
    }
    double g = std::sqrt(hh);
    if (ort[m] > 0) g = -g;
    hh -= ort[m] * g;
    ort[m] -= g;

    for (std::size_t j = m; j < n; ++j) {
      double f = 0.0;
      for (std::size_t i = high + 1; i-- > m;) f += ort[i] * h(i, j);
      f /= hh;
      for (std::size_t i = m; i <= high; ++i) h(i, j) -= f * ort[i];
    }
    for (std::size_t i = 0; i <= high; ++i) {
      double f = 0.0;
      for (std::size_t j = high + 1; j-- > m;) f += ort[j] * h(i, j);
      f /= hh;
      for (std::size_t j = m; j <= high; ++j) h(i, j) -= f * ort[j];
    }
    ort[m] *= scale;
    h(m, m - 1) = scale * g;
  }

  for (std::size_t m = high - 1; m >= 1; --m) {
    if (h(m, m - 1) != 0.0) {
      for (std::size_t i = m + 1; i <= high; ++i) ort[i] = h(i, m - 1);
      for (std::size_t j = m; j <= high; ++j) {
        double g = 0.0;
        for (std::size_t i = m; i <= high; ++i) g += ort[i] * v(i, j);
        g = (g / ort[m]) / h(m, m - 1);
        for (std::size_t i = m; i <= high; ++i) v(i, j) += g * ort[i];
      }
    }
  }
  for (std::size_t i = 2; i < n; ++i)
    for (std::size_t j = 0; j + 1 < i; ++j) h(i, j) = 0.0;
  return {std::move(v), std::move(h)};
}

namespace {

struct SchurWork {
  Matrix t;
  Matrix q;
  std::vector<Complex> eig;
};

// Francis double-shift iteration on an upper Hessenberg matrix. When
// accumulate is false, q is left untouched and only eigenvalues are needed,
// but T is still fully maintained so the result is a valid Schur factor.
void francis_qr(Matrix& h, Matrix* v, std::vector<Complex>& eig) {
  const int nn = static_cast<int>(h.rows());
  const int low = 0;
  const int high = nn - 1;
  const double eps = std::numeric_limits<double>::epsilon();
  const long cap = static_cast<long>(settings().qr_iterations_per_dim) * nn;
  std::vector<double> d(nn, 0.0), e(nn, 0.0);
  std::vector<bool> done(nn, false);

  double exshift = 0.0;
  double p = 0, q = 0, r = 0, s = 0, z = 0, w = 0, x = 0, y = 0;

  double norm = 0.0;
  for (int i = 0; i < nn; ++i)
    for (int j = std::max(i - 1, 0); j < nn; ++j) norm += std::abs(h(i, j));

  int n = nn - 1;
  int iter = 0;
  long total = 0;
  while (n >= low) {
    int l = n;
    while (l > low) {
      s = std::abs(h(l - 1, l - 1)) + std::abs(h(l, l));
      if (s == 0.0) s = norm;
      if (std::abs(h(l, l - 1)) <= eps * s) break;
      --l;
    }

    if (l == n) {
      // one root
      h(n, n) += exshift;
      if (n > 0) h(n, n - 1) = 0.0;
      d[n] = h(n, n);
      e[n] = 0.0;
      done[n] = true;
      --n;
      iter = 0;
    } else if (l == n - 1) {
      // two roots
      w = h(n, n - 1) * h(n - 1, n);
      p = (h(n - 1, n - 1) - h(n, n)) / 2.0;
      q = p * p + w;
      z = std::sqrt(std::abs(q));
      h(n, n) += exshift;
      h(n - 1, n - 1) += exshift;
      x = h(n, n);
      if (n - 1 > 0) h(n - 1, n - 2) = 0.0;
      if (q >= 0) {
        z = p >= 0 ? p + z : p - z;
        d[n - 1] = x + z;
        d[n] = d[n - 1];
        if (z != 0.0) d[n] = x - w / z;
        e[n - 1] = 0.0;
        e[n] = 0.0;
        x = h(n, n - 1);
        s = std::abs(x) + std::abs(z);
        p = x / s;
        q = z / s;
        r = std::sqrt(p * p + q * q);
        p /= r;
        q /= r;
        for (int j = n - 1; j < nn; ++j) {
          z = h(n - 1, j);
          h(n - 1, j) = q * z + p * h(n, j);
          h(n, j) = q * h(n, j) - p * z;
        }
        for (int i = 0; i <= n; ++i) {
          z = h(i, n - 1);
          h(i, n - 1) = q * z + p * h(i, n);
          h(i, n) = q * h(i, n) - p * z;
        }
        if (v != nullptr) {
          for (int i = low; i <= high; ++i) {
            z = (*v)(i, n - 1);
            (*v)(i, n - 1) = q * z + p * (*v)(i, n);
            (*v)(i, n) = q * (*v)(i, n) - p * z;
          }
        }
        h(n, n - 1) = 0.0;
      } else {
        d[n - 1] = x + p;
        d[n] = x + p;
        e[n - 1] = z;
        e[n] = -z;
      }
      done[n] = done[n - 1] = true;
      n -= 2;
      iter = 0;
    } else {
      if (++total > cap) {
        std::vector<Complex> partial;
        for (int i = 0; i < nn; ++i)
          if (done[i]) partial.emplace_back(d[i], e[i]);
        std::ostringstream msg;
        msg << "QR iteration did not converge within " << cap << " sweeps";
        throw ConvergenceFailure(msg.str(), std::move(partial));
      }
      check_deadline();

      x = h(n, n);
      y = 0.0;
      w = 0.0;
      if (l < n) {
        y = h(n - 1, n - 1);
        w = h(n, n - 1) * h(n - 1, n);
      }
      // exceptional shifts
      if (iter == 10) {
        exshift += x;
        for (int i = low; i <= n; ++i) h(i, i) -= x;
        s = std::abs(h(n, n - 1)) + std::abs(h(n - 1, n - 2));
        x = y = 0.75 * s;
        w = -0.4375 * s * s;
      }
      if (iter == 30) {
        s = (y - x) / 2.0;
        s = s * s + w;
        if (s > 0) {
          s = std::sqrt(s);
          if (y < x) s = -s;
          s = x - w / ((y - x) / 2.0 + s);
          for (int i = low; i <= n; ++i) h(i, i) -= s;
          exshift += s;
          x = y = w = 0.964;
        }
      }
      ++iter;

      // look for two consecutive small subdiagonal elements
      int m = n - 2;
      while (m >= l) {
        z = h(m, m);
        r = x - z;
        s = y - z;
        p = (r * s - w) / h(m + 1, m) + h(m, m + 1);
        q = h(m + 1, m + 1) - z - r - s;
        r = h(m + 2, m + 1);
        s = std::abs(p) + std::abs(q) + std::abs(r);
        p /= s;
        q /= s;
        r /= s;
        if (m == l) break;
        if (std::abs(h(m, m - 1)) * (std::abs(q) + std::abs(r)) <
            eps * (std::abs(p) * (std::abs(h(m - 1, m - 1)) + std::abs(z) + std::abs(h(m + 1, m + 1))))) {
          break;
        }
        --m;
      }
      for (int i = m + 2; i <= n; ++i) {
        h(i, i - 2) = 0.0;
        if (i > m + 2) h(i, i - 3) = 0.0;
      }

      // double QR step on rows l..n, columns m..n
      for (int k = m; k <= n - 1; ++k) {
        const bool notlast = (k != n - 1);
        if (k != m) {
          p = h(k, k - 1);
          q = h(k + 1, k - 1);
          r = notlast ? h(k + 2, k - 1) : 0.0;
          x = std::abs(p) + std::abs(q) + std::abs(r);
          if (x == 0.0) continue;
          p /= x;
          q /= x;
          r /= x;
        }
        s = std::sqrt(p * p + q * q + r * r);
        if (p < 0) s = -s;
        if (s == 0) continue;
        if (k != m) {
          h(k, k - 1) = -s * x;
        } else if (l != m) {
          h(k, k - 1) = -h(k, k - 1);
        }
        p += s;
        x = p / s;
        y = q / s;
        z = r / s;
        q /= p;
        r /= p;

        for (int j = k; j < nn; ++j) {
          p = h(k, j) + q * h(k + 1, j);
          if (notlast) {
            p += r * h(k + 2, j);
            h(k + 2, j) -= p * z;
          }
          h(k, j) -= p * x;
          h(k + 1, j) -= p * y;
        }
        for (int i = 0; i <= std::min(n, k + 3); ++i) {
          p = x * h(i, k) + y * h(i, k + 1);
          if (notlast) {
            p += z * h(i, k + 2);
            h(i, k + 2) -= p * r;
          }
          h(i, k) -= p;
          h(i, k + 1) -= p * q;
        }
        if (v != nullptr) {
          for (int i = low; i <= high; ++i) {
            p = x * (*v)(i, k) + y * (*v)(i, k + 1);
            if (notlast) {
              p += z * (*v)(i, k + 2);
              (*v)(i, k + 2) -= p * r;
            }
            (*v)(i, k) -= p;
            (*v)(i, k + 1) -= p * q;
          }
        }
      }
    }
  }

  // Bulge chasing leaves round-off below the first subdiagonal.
  for (int i = 2; i < nn; ++i)
    for (int j = 0; j + 1 < i; ++j) h(i, j) = 0.0;

  eig.resize(nn);
  for (int i = 0; i < nn; ++i) eig[i] = Complex(d[i], e[i]);
}

}  // namespace

SchurForm real_schur(const Matrix& a) {
  require_square(a, "real_schur");
  auto [q, h] = hessenberg(a);
  std::vector<Complex> eig;
  francis_qr(h, &q, eig);
  return {std::move(q), std::move(h)};
}

std::vector<std::size_t> schur_block_sizes(const Matrix& t) {
  std::vector<std::size_t> sizes;
  const std::size_t n = t.rows();
  for (std::size_t i = 0; i < n;) {
    if (i + 1 < n && t(i + 1, i) != 0.0) {
      sizes.push_back(2);
      i += 2;
    } else {
      sizes.push_back(1);
      i += 1;
    }
  }
  return sizes;
}

std::vector<Complex> schur_eigenvalues(const Matrix& t) {
  std::vector<Complex> out;
  out.reserve(t.rows());
  std::size_t i = 0;
  for (std::size_t b : schur_block_sizes(t)) {
    if (b == 1) {
      out.emplace_back(t(i, i), 0.0);
    } else {
      const double a11 = t(i, i), a12 = t(i, i + 1), a21 = t(i + 1, i), a22 = t(i + 1, i + 1);
      const double p = 0.5 * (a11 - a22);
      const double disc = p * p + a12 * a21;
      const double mid = 0.5 * (a11 + a22);
      if (disc < 0) {
        const double im = std::sqrt(-disc);
        out.emplace_back(mid, im);
        out.emplace_back(mid, -im);
      } else {
        const double r = std::sqrt(disc);
        out.emplace_back(mid + r, 0.0);
        out.emplace_back(mid - r, 0.0);
      }
    }
    i += b;
  }
  return out;
}

std::vector<Complex> eigenvalues(const Matrix& a) {
  require_square(a, "eigenvalues");
  if (!a.all_finite()) throw InvalidArgument("eigenvalues: matrix has non-finite entries");
  auto [q, h] = hessenberg(a);
  std::vector<Complex> eig;
  francis_qr(h, nullptr, eig);
  return eig;
}

double spectral_abscissa(const Matrix& a) {
  double best = -std::numeric_limits<double>::infinity();
  for (const Complex& z : eigenvalues(a)) best = std::max(best, z.real());
  return best;
}

double spectral_radius(const Matrix& a) {
  double best = 0.0;
  for (const Complex& z : eigenvalues(a)) best = std::max(best, std::abs(z));
  return best;
}

// ---------------------------------------------------------------------------
// expm

Matrix expm(const Matrix& a) {
  require_square(a, "expm");
  const std::size_t n = a.rows();
  static constexpr std::array<double, 14> b = {
      64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
      129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
      1323241920.0,        40840800.0,          960960.0,           16380.0,
      182.0,               1.0};

  const double norm = a.norm1();
  int squarings = 0;
  if (norm > settings().expm_theta13) {
    squarings = static_cast<int>(std::ceil(std::log2(norm / settings().expm_theta13)));
  }
  const Matrix as = a * std::ldexp(1.0, -squarings);
  const Matrix id = Matrix::identity(n);
  const Matrix a2 = as * as;
  const Matrix a4 = a2 * a2;
  const Matrix a6 = a4 * a2;

  Matrix u_inner = a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2);
  u_inner += b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id;
  const Matrix u = as * u_inner;
  Matrix v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2);
  v += b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;

  Matrix r = LuDecomposition(v - u).solve(v + u);
  for (int k = 0; k < squarings; ++k) {
    r = r * r;
    if (!r.all_finite()) throw NumericOverflow("expm: result overflowed during squaring");
  }
  if (!r.all_finite()) throw NumericOverflow("expm: result is not finite");
  return r;
}

}  // namespace stabcert::linalg
