#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

#include "stabcert/matrix.hpp"

namespace stabcert::linalg {

using Complex = std::complex<double>;

// LU factorization with partial pivoting, PA = LU, stored compactly.
class LuDecomposition {
 public:
  // Throws SingularMatrix when a pivot falls below lu_pivot_rel * max|A|.
  explicit LuDecomposition(Matrix a);

  Matrix solve(const Matrix& b) const;
  Vector solve(std::span<const double> b) const;
  double determinant() const noexcept;
  std::size_t size() const noexcept { return lu_.rows(); }

 private:
  Matrix lu_;
  std::vector<std::size_t> perm_;
  int sign_ = 1;
};

// Solves AX = B.
Matrix lu_solve(const Matrix& a, const Matrix& b);
double determinant(const Matrix& a);

// Lower-triangular L with L L^T = (S + S^T) / 2, or nullopt when a pivot is
// not strictly positive. Throws InvalidArgument if S is not symmetric to
// symmetry_rel * max|S|.
std::optional<Matrix> cholesky(const Matrix& s);

struct SchurForm {
  Matrix q;  // orthogonal
  Matrix t;  // quasi-upper-triangular with 1x1 and 2x2 diagonal blocks
};

// Orthogonal Hessenberg reduction A = Q H Q^T.
struct HessenbergForm {
  Matrix q;
  Matrix h;
};
HessenbergForm hessenberg(const Matrix& a);

// Real Schur decomposition A = Q T Q^T by Francis double-shift QR.
// Throws ConvergenceFailure after qr_iterations_per_dim * n sweeps.
SchurForm real_schur(const Matrix& a);

// Sizes of the diagonal blocks of a quasi-triangular T, in order.
std::vector<std::size_t> schur_block_sizes(const Matrix& t);

// Eigenvalues read off a real Schur factor; conjugate pairs are exact conjugates.
std::vector<Complex> schur_eigenvalues(const Matrix& t);

std::vector<Complex> eigenvalues(const Matrix& a);
double spectral_abscissa(const Matrix& a);
double spectral_radius(const Matrix& a);

// Matrix exponential by scaling and squaring with the degree-13 diagonal Pade
// approximant. Throws NumericOverflow if the result is not finite.
Matrix expm(const Matrix& a);

}  // namespace stabcert::linalg
