// SPDX-License-Identifier: Apache-2.0

#ifndef NOPC_DENSE_HPP
#define NOPC_DENSE_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace nopc
{

// Column-major dense matrix. Columns are the natural unit here (data snapshots,
// basis vectors), so col(j) is a contiguous span.
class Matrix
{
public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
    : rows_(rows), cols_(cols), data_(rows * cols, fill)
  {
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double &operator()(std::size_t i, std::size_t j) { return data_[j * rows_ + i]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[j * rows_ + i]; }

  std::span<double> col(std::size_t j) { return {data_.data() + j * rows_, rows_}; }
  std::span<const double> col(std::size_t j) const { return {data_.data() + j * rows_, rows_}; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  static Matrix identity(std::size_t n);

  Matrix transposed() const;

  friend bool operator==(const Matrix &, const Matrix &) = default;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// y = A x
std::vector<double> multiply(const Matrix &a, std::span<const double> x);
// y = A^T x
std::vector<double> multiply_transposed(const Matrix &a, std::span<const double> x);
// C = A B
Matrix multiply(const Matrix &a, const Matrix &b);
// C = A^T B
Matrix multiply_transposed(const Matrix &a, const Matrix &b);

double frobenius_norm(const Matrix &a);
double max_abs(const Matrix &a);

}  // namespace nopc

#endif  // NOPC_DENSE_HPP
