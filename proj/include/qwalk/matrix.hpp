#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace qwalk {

/// Dense row-major real matrix. Sizes in this library stay below ~64, so
/// there is no sparse or blocked storage.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> diag);
  static Matrix column(std::span<const double> v);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool is_square() const noexcept { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }
  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  Matrix transpose() const;
  double max_abs() const;
  double trace() const;

  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(double s);

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(Matrix a, double s);
Matrix operator*(double s, Matrix a);
Matrix operator*(const Matrix& a, const Matrix& b);
std::vector<double> operator*(const Matrix& a, std::span<const double> x);

double max_abs_diff(const Matrix& a, const Matrix& b);
bool is_symmetric(const Matrix& m, double rel_tol = 1e-12);

/// Principal or rectangular sub-block selected by row and column index lists.
Matrix submatrix(const Matrix& m, std::span<const std::size_t> rows,
                 std::span<const std::size_t> cols);

/// Complex matrix stored as separate real and imaginary parts.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols);
  ComplexMatrix(Matrix re, Matrix im);

  static ComplexMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return re_.rows(); }
  std::size_t cols() const noexcept { return re_.cols(); }

  std::complex<double> operator()(std::size_t i, std::size_t j) const {
    return {re_(i, j), im_(i, j)};
  }

  Matrix& re() noexcept { return re_; }
  Matrix& im() noexcept { return im_; }
  const Matrix& re() const noexcept { return re_; }
  const Matrix& im() const noexcept { return im_; }

  ComplexMatrix adjoint() const;
  ComplexMatrix transpose() const;

 private:
  Matrix re_;
  Matrix im_;
};

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator*(const Matrix& a, const ComplexMatrix& b);
ComplexMatrix operator*(const ComplexMatrix& a, const Matrix& b);
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);

/// Block-diagonal assembly diag(a, b).
Matrix block_diagonal(const Matrix& a, const Matrix& b);
ComplexMatrix block_diagonal(const ComplexMatrix& a, const ComplexMatrix& b);

}  // namespace qwalk
