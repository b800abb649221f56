#pragma once

#include <cstddef>
#include <initializer_list>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "stabcert/memory.hpp"

namespace stabcert {

using Vector = std::vector<double>;

// Dense row-major real matrix. Storage goes through the tracked allocator so
// algorithms can report their matrix working set.
class Matrix {
 public:
  using Storage = std::vector<double, memory::TrackedAllocator<double>>;

  Matrix() = default;
  // Zero-filled rows x cols matrix; both dimensions must be >= 1.
  Matrix(std::size_t rows, std::size_t cols);
  // Row-major data; throws InvalidArgument on size mismatch or non-finite entries.
  Matrix(std::size_t rows, std::size_t cols, std::span<const double> data);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> d);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const noexcept { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> data() const noexcept { return {data_.data(), data_.size()}; }
  std::span<double> data() noexcept { return {data_.data(), data_.size()}; }

  Matrix transpose() const;
  double max_abs() const noexcept;
  double norm1() const noexcept;  // max column sum
  double trace() const;
  bool all_finite() const noexcept;

  // Copy of the square block starting at (r0, c0).
  Matrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;
  void set_block(std::size_t r0, std::size_t c0, const Matrix& b);

  Matrix& operator+=(const Matrix& b);
  Matrix& operator-=(const Matrix& b);
  Matrix& operator*=(double s) noexcept;

  friend bool operator==(const Matrix& a, const Matrix& b) noexcept;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  Storage data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(Matrix a, double s);
Matrix operator*(double s, Matrix a);
Matrix operator*(const Matrix& a, const Matrix& b);
Vector operator*(const Matrix& a, std::span<const double> x);

double max_abs_diff(const Matrix& a, const Matrix& b);

// Text format: a "rows cols" header line followed by one whitespace-separated
// row per line, written with 17 significant digits so values round-trip.
void write_matrix(std::ostream& out, const Matrix& m);
Matrix read_matrix(std::istream& in);
Matrix read_matrix_file(const std::string& path);
std::string to_text(const Matrix& m);

}  // namespace stabcert
