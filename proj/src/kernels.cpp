// SPDX-License-Identifier: Apache-2.0

#include "nopc/kernels.hpp"

#include <cmath>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "nopc/error.hpp"

namespace nopc::kernels
{

int max_threads()
{
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

double dot(std::span<const double> a, std::span<const double> b)
{
  NOPC_REQUIRE(a.size() == b.size(), "length mismatch");
  const std::size_t n = a.size();
  const std::size_t chunks = (n + reduction_chunk - 1) / reduction_chunk;
  if (chunks <= 1)
  {
    return serial::dot(a, b);
  }
  std::vector<double> partial(chunks, 0.0);
  const auto nchunks = static_cast<std::ptrdiff_t>(chunks);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t c = 0; c < nchunks; ++c)
  {
    const std::size_t begin = static_cast<std::size_t>(c) * reduction_chunk;
    const std::size_t end = std::min(n, begin + reduction_chunk);
    double s = 0.0;
    for (std::size_t i = begin; i < end; ++i)
    {
      s += a[i] * b[i];
    }
    partial[c] = s;
  }
  double s = 0.0;
  for (double p : partial)
  {
    s += p;
  }
  return s;
}

double norm2(std::span<const double> a)
{
  return std::sqrt(dot(a, a));
}

void axpy(double a, std::span<const double> x, std::span<double> y)
{
  NOPC_REQUIRE(x.size() == y.size(), "length mismatch");
  const auto n = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for schedule(static) if (n > 4 * static_cast<std::ptrdiff_t>(reduction_chunk))
  for (std::ptrdiff_t i = 0; i < n; ++i)
  {
    y[i] += a * x[i];
  }
}

void spmv(const CsrMatrix &a, std::span<const double> x, std::span<double> y)
{
  NOPC_REQUIRE(x.size() == a.size() && y.size() == a.size(), "length mismatch");
  const auto rp = a.row_ptr();
  const auto ci = a.col_idx();
  const auto v = a.values();
  const auto n = static_cast<std::ptrdiff_t>(a.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i)
  {
    double s = 0.0;
    for (auto k = rp[i]; k < rp[i + 1]; ++k)
    {
      s += v[k] * x[ci[k]];
    }
    y[i] = s;
  }
}

Matrix gram(const Matrix &a)
{
  const std::size_t n = a.cols();
  Matrix g(n, n);
  const auto nn = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t j = 0; j < nn; ++j)
  {
    for (std::ptrdiff_t i = 0; i <= j; ++i)
    {
      const double s = serial::dot(a.col(i), a.col(j));
      g(i, j) = s;
      g(j, i) = s;
    }
  }
  return g;
}

Matrix outer_gram(const Matrix &a)
{
  const std::size_t m = a.rows();
  Matrix g(m, m);
  const auto mm = static_cast<std::ptrdiff_t>(m);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t j = 0; j < mm; ++j)
  {
    for (std::ptrdiff_t i = 0; i <= j; ++i)
    {
      double s = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k)
      {
        s += a(i, k) * a(j, k);
      }
      g(i, j) = s;
      g(j, i) = s;
    }
  }
  return g;
}

}  // namespace nopc::kernels

namespace nopc::serial
{

double dot(std::span<const double> a, std::span<const double> b)
{
  NOPC_REQUIRE(a.size() == b.size(), "length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
  {
    s += a[i] * b[i];
  }
  return s;
}

void axpy(double a, std::span<const double> x, std::span<double> y)
{
  NOPC_REQUIRE(x.size() == y.size(), "length mismatch");
  for (std::size_t i = 0; i < x.size(); ++i)
  {
    y[i] += a * x[i];
  }
}

void spmv(const CsrMatrix &a, std::span<const double> x, std::span<double> y)
{
  NOPC_REQUIRE(x.size() == a.size() && y.size() == a.size(), "length mismatch");
  const auto rp = a.row_ptr();
  const auto ci = a.col_idx();
  const auto v = a.values();
  for (std::size_t i = 0; i < a.size(); ++i)
  {
    double s = 0.0;
    for (auto k = rp[i]; k < rp[i + 1]; ++k)
    {
      s += v[k] * x[ci[k]];
    }
    y[i] = s;
  }
}

Matrix gram(const Matrix &a)
{
  const std::size_t n = a.cols();
  Matrix g(n, n);
  for (std::size_t j = 0; j < n; ++j)
  {
    for (std::size_t i = 0; i <= j; ++i)
    {
      const double s = dot(a.col(i), a.col(j));
      g(i, j) = s;
      g(j, i) = s;
    }
  }
  return g;
}

Matrix outer_gram(const Matrix &a)
{
  const std::size_t m = a.rows();
  Matrix g(m, m);
  for (std::size_t j = 0; j < m; ++j)
  {
    for (std::size_t i = 0; i <= j; ++i)
    {
      double s = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k)
      {
        s += a(i, k) * a(j, k);
      }
      g(i, j) = s;
      g(j, i) = s;
    }
  }
  return g;
}

}  // namespace nopc::serial
