#include "stabcert/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "stabcert/linalg.hpp"

namespace stabcert::embedding {

namespace {

void require_square(const Matrix& a) {
  if (a.empty() || !a.square()) throw InvalidArgument("embedding: matrix must be square");
}

// Largest distance in a greedy nearest-neighbour pairing of two multisets.
double multiset_distance(std::vector<linalg::Complex> a, std::vector<linalg::Complex> b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  auto by_parts = [](const linalg::Complex& x, const linalg::Complex& y) {
    return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
  };
  std::sort(a.begin(), a.end(), by_parts);
  std::vector<bool> used(b.size(), false);
  double worst = 0.0;
  for (const auto& z : a) {
    std::size_t best = b.size();
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < b.size(); ++k) {
      if (used[k]) continue;
      const double d = std::abs(z - b[k]);
      if (d < best_d) {
        best_d = d;
        best = k;
      }
    }
    used[best] = true;
    worst = std::max(worst, best_d);
  }
  return worst;
}

}  // namespace

Split split_dt(const Matrix& a) {
  require_square(a);
  Matrix up = a;
  for (double& v : up.data()) v = std::max(v, 0.0);
  Matrix down = up - a;
  return {std::move(up), std::move(down)};
}

Split split_ct(const Matrix& a) {
  require_square(a);
  const std::size_t n = a.rows();
  Matrix up(n, n), down(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double v = a(i, j);
      if (i == j) {
        up(i, j) = v;
      } else if (v >= 0.0) {
        up(i, j) = v;
      } else {
        down(i, j) = -v;
      }
    }
  }
  return {std::move(up), std::move(down)};
}

Matrix metzlerize(const Matrix& a) {
  require_square(a);
  Matrix m = a;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (i != j) m(i, j) = std::abs(m(i, j));
  return m;
}

Matrix entrywise_abs(const Matrix& a) {
  Matrix m = a;
  for (double& v : m.data()) v = std::abs(v);
  return m;
}

bool is_metzler(const Matrix& a) noexcept {
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j && a(i, j) < 0.0) return false;
  return true;
}

bool is_nonnegative(const Matrix& a) noexcept {
  return std::all_of(a.data().begin(), a.data().end(), [](double v) { return v >= 0.0; });
}

EmbeddingPair build_ahat(const Matrix& a, TimeDomain domain) {
  Split s = domain == TimeDomain::DT ? split_dt(a) : split_ct(a);
  const std::size_t n = a.rows();
  Matrix hat(2 * n, 2 * n);
  hat.set_block(0, 0, s.up);
  hat.set_block(0, n, s.down);
  hat.set_block(n, 0, s.down);
  hat.set_block(n, n, s.up);
  return {domain, std::move(s.up), std::move(s.down), std::move(hat)};
}

SimilarityReport verify_similarity(const EmbeddingPair& pair, const Matrix& a) {
  require_square(a);
  const std::size_t n = a.rows();
  if (pair.n() != n || pair.hat.rows() != 2 * n) {
    throw InvalidArgument("verify_similarity: embedding and matrix dimensions differ");
  }
  SimilarityReport report;

  Matrix t(2 * n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    t(i, i) = 1.0;
    t(i, n + i) = 1.0;
    t(n + i, n + i) = -1.0;
  }
  const Matrix tilde = (t * pair.hat) * t;
  const Matrix abs_a = pair.up + pair.down;

  struct Block {
    const char* name;
    std::size_t r0, c0;
    Matrix expected;
  };
  Matrix neg_down = pair.down * -1.0;
  const Block blocks[] = {{"top-left = up + down", 0, 0, abs_a},
                          {"top-right = 0", 0, n, Matrix(n, n)},
                          {"bottom-left = -down", n, 0, neg_down},
                          {"bottom-right = A", n, n, a}};
  report.structural_pass = true;
  for (const Block& b : blocks) {
    const Matrix got = tilde.block(b.r0, b.c0, n, n);
    bool equal = true;
    for (std::size_t k = 0; k < got.data().size(); ++k) {
      if (got.data()[k] != b.expected.data()[k]) {
        equal = false;
        break;
      }
    }
    std::ostringstream detail;
    if (!equal) detail << "max deviation " << max_abs_diff(got, b.expected);
    report.lines.push_back({std::string("structure ") + b.name, equal, detail.str()});
    report.structural_pass = report.structural_pass && equal;
  }

  auto eig_hat = linalg::eigenvalues(pair.hat);
  auto eig_union = linalg::eigenvalues(abs_a);
  const auto eig_a = linalg::eigenvalues(a);
  eig_union.insert(eig_union.end(), eig_a.begin(), eig_a.end());
  report.spectral_error = multiset_distance(std::move(eig_union), std::move(eig_hat));
  const double tol = 1e-7 * std::max(1.0, pair.hat.max_abs());
  report.spectral_pass = report.spectral_error <= tol;
  std::ostringstream detail;
  detail << "max eigenvalue distance " << report.spectral_error << " (tol " << tol << ")";
  report.lines.push_back({"spectrum eig(Ahat) = eig(up + down) U eig(A)", report.spectral_pass, detail.str()});
  return report;
}

}  // namespace stabcert::embedding
