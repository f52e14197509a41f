// SPDX-License-Identifier: Apache-2.0

#include "nopc/dense.hpp"

#include <algorithm>
#include <cmath>

#include "nopc/error.hpp"

namespace nopc
{

Matrix Matrix::identity(std::size_t n)
{
  Matrix id(n, n);
  for (std::size_t i = 0; i < n; ++i)
  {
    id(i, i) = 1.0;
  }
  return id;
}

Matrix Matrix::transposed() const
{
  Matrix t(cols_, rows_);
  for (std::size_t j = 0; j < cols_; ++j)
  {
    for (std::size_t i = 0; i < rows_; ++i)
    {
      t(j, i) = (*this)(i, j);
    }
  }
  return t;
}

std::vector<double> multiply(const Matrix &a, std::span<const double> x)
{
  NOPC_REQUIRE(x.size() == a.cols(), "length mismatch");
  std::vector<double> y(a.rows(), 0.0);
  for (std::size_t j = 0; j < a.cols(); ++j)
  {
    const double xj = x[j];
    const auto c = a.col(j);
    for (std::size_t i = 0; i < a.rows(); ++i)
    {
      y[i] += c[i] * xj;
    }
  }
  return y;
}

std::vector<double> multiply_transposed(const Matrix &a, std::span<const double> x)
{
  NOPC_REQUIRE(x.size() == a.rows(), "length mismatch");
  std::vector<double> y(a.cols(), 0.0);
  for (std::size_t j = 0; j < a.cols(); ++j)
  {
    const auto c = a.col(j);
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
    {
      s += c[i] * x[i];
    }
    y[j] = s;
  }
  return y;
}

Matrix multiply(const Matrix &a, const Matrix &b)
{
  NOPC_REQUIRE(a.cols() == b.rows(), "dimension mismatch");
  Matrix c(a.rows(), b.cols());
  for (std::size_t j = 0; j < b.cols(); ++j)
  {
    auto cj = c.col(j);
    for (std::size_t k = 0; k < a.cols(); ++k)
    {
      const double bkj = b(k, j);
      const auto ak = a.col(k);
      for (std::size_t i = 0; i < a.rows(); ++i)
      {
        cj[i] += ak[i] * bkj;
      }
    }
  }
  return c;
}

Matrix multiply_transposed(const Matrix &a, const Matrix &b)
{
  NOPC_REQUIRE(a.rows() == b.rows(), "dimension mismatch");
  Matrix c(a.cols(), b.cols());
  for (std::size_t j = 0; j < b.cols(); ++j)
  {
    const auto bj = b.col(j);
    for (std::size_t i = 0; i < a.cols(); ++i)
    {
      const auto ai = a.col(i);
      double s = 0.0;
      for (std::size_t k = 0; k < a.rows(); ++k)
      {
        s += ai[k] * bj[k];
      }
      c(i, j) = s;
    }
  }
  return c;
}

double frobenius_norm(const Matrix &a)
{
  double s = 0.0;
  for (double v : a.data())
  {
    s += v * v;
  }
  return std::sqrt(s);
}

double max_abs(const Matrix &a)
{
  double m = 0.0;
  for (double v : a.data())
  {
    m = std::max(m, std::abs(v));
  }
  return m;
}

}  // namespace nopc
