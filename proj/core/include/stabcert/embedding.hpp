#pragma once

#include <string>
#include <vector>

#include "stabcert/matrix.hpp"
#include "stabcert/system.hpp"

namespace stabcert::embedding {

struct Split {
  Matrix up;    // DT: max(A, 0); CT: diag(A) + max(offdiag(A), 0)
  Matrix down;  // DT: up - A;    CT: max(-offdiag(A), 0)
};

// The 2n x 2n comparison system [[up, down], [down, up]]: nonnegative for DT,
// Metzler for CT. Blocks are kept alongside the assembled matrix.
struct EmbeddingPair {
  TimeDomain domain = TimeDomain::CT;
  Matrix up;
  Matrix down;
  Matrix hat;

  std::size_t n() const noexcept { return up.rows(); }
};

Split split_dt(const Matrix& a);
Split split_ct(const Matrix& a);

// Diagonal kept, off-diagonal entries replaced by their absolute values.
Matrix metzlerize(const Matrix& a);
Matrix entrywise_abs(const Matrix& a);

bool is_metzler(const Matrix& a) noexcept;
bool is_nonnegative(const Matrix& a) noexcept;

EmbeddingPair build_ahat(const Matrix& a, TimeDomain domain);

struct CheckLine {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct SimilarityReport {
  bool structural_pass = false;  // T Ahat T == [[up + down, 0], [-down, A]] exactly
  bool spectral_pass = false;    // eig(Ahat) == eig(up + down) U eig(A), tol 1e-7
  double spectral_error = 0.0;
  std::vector<CheckLine> lines;

  bool pass() const noexcept { return structural_pass && spectral_pass; }
};

// Applies T = [[I, I], [0, -I]] on both sides of Ahat (T is its own inverse)
// and checks the resulting block lower triangular structure.
SimilarityReport verify_similarity(const EmbeddingPair& pair, const Matrix& a);

}  // namespace stabcert::embedding
