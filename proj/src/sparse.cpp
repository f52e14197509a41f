// SPDX-License-Identifier: Apache-2.0

#include "nopc/sparse.hpp"

#include <algorithm>
#include <cmath>

#include "nopc/error.hpp"
#include "nopc/kernels.hpp"

namespace nopc
{

CsrMatrix::CsrMatrix(std::size_t n, std::vector<std::int64_t> row_ptr,
                     std::vector<std::int32_t> col_idx)
  : n_(n), row_ptr_(std::move(row_ptr)), col_idx_(std::move(col_idx)),
    values_(col_idx_.size(), 0.0)
{
  NOPC_REQUIRE(row_ptr_.size() == n_ + 1, "row_ptr must have n+1 entries");
  NOPC_REQUIRE(row_ptr_.front() == 0 &&
                   row_ptr_.back() == static_cast<std::int64_t>(col_idx_.size()),
               "row_ptr inconsistent with col_idx");
}

CsrMatrix CsrMatrix::from_connectivity(std::size_t n, std::span<const std::int32_t> connectivity,
                                       std::size_t nodes_per_element)
{
  NOPC_REQUIRE(nodes_per_element > 0 && connectivity.size() % nodes_per_element == 0,
               "connectivity length not a multiple of nodes_per_element");
  std::vector<std::vector<std::int32_t>> rows(n);
  for (std::size_t i = 0; i < n; ++i)
  {
    rows[i].push_back(static_cast<std::int32_t>(i));
  }
  for (std::size_t e = 0; e < connectivity.size(); e += nodes_per_element)
  {
    for (std::size_t a = 0; a < nodes_per_element; ++a)
    {
      const auto ia = connectivity[e + a];
      NOPC_REQUIRE(ia >= 0 && static_cast<std::size_t>(ia) < n, "node index out of range");
      for (std::size_t b = 0; b < nodes_per_element; ++b)
      {
        rows[ia].push_back(connectivity[e + b]);
      }
    }
  }
  std::vector<std::int64_t> row_ptr(n + 1, 0);
  std::vector<std::int32_t> col_idx;
  for (std::size_t i = 0; i < n; ++i)
  {
    auto &r = rows[i];
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
    col_idx.insert(col_idx.end(), r.begin(), r.end());
    row_ptr[i + 1] = static_cast<std::int64_t>(col_idx.size());
  }
  return CsrMatrix(n, std::move(row_ptr), std::move(col_idx));
}

CsrMatrix CsrMatrix::identity(std::size_t n)
{
  std::vector<std::int64_t> row_ptr(n + 1);
  std::vector<std::int32_t> col_idx(n);
  for (std::size_t i = 0; i < n; ++i)
  {
    row_ptr[i + 1] = static_cast<std::int64_t>(i + 1);
    col_idx[i] = static_cast<std::int32_t>(i);
  }
  CsrMatrix id(n, std::move(row_ptr), std::move(col_idx));
  std::fill(id.values_.begin(), id.values_.end(), 1.0);
  return id;
}

std::int64_t CsrMatrix::find(std::size_t i, std::size_t j) const
{
  if (i >= n_)
  {
    return -1;
  }
  const auto begin = col_idx_.begin() + row_ptr_[i];
  const auto end = col_idx_.begin() + row_ptr_[i + 1];
  const auto it = std::lower_bound(begin, end, static_cast<std::int32_t>(j));
  if (it == end || *it != static_cast<std::int32_t>(j))
  {
    return -1;
  }
  return it - col_idx_.begin();
}

double CsrMatrix::operator()(std::size_t i, std::size_t j) const
{
  const auto k = find(i, j);
  return k < 0 ? 0.0 : values_[k];
}

void CsrMatrix::add(std::size_t i, std::size_t j, double v)
{
  const auto k = find(i, j);
  NOPC_REQUIRE(k >= 0, "entry not in sparsity pattern");
  values_[k] += v;
}

std::vector<double> CsrMatrix::diagonal() const
{
  std::vector<double> d(n_);
  for (std::size_t i = 0; i < n_; ++i)
  {
    d[i] = (*this)(i, i);
  }
  return d;
}

std::vector<double> CsrMatrix::multiply(std::span<const double> x) const
{
  NOPC_REQUIRE(x.size() == n_, "length mismatch");
  std::vector<double> y(n_);
  kernels::spmv(*this, x, y);
  return y;
}

void CsrMatrix::eliminate(std::span<const std::int32_t> dofs)
{
  std::vector<char> fixed(n_, 0);
  for (auto d : dofs)
  {
    fixed[d] = 1;
  }
  for (std::size_t i = 0; i < n_; ++i)
  {
    for (auto k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
    {
      const auto j = static_cast<std::size_t>(col_idx_[k]);
      if (fixed[i] || fixed[j])
      {
        values_[k] = (i == j) ? 1.0 : 0.0;
      }
    }
  }
}

CsrMatrix CsrMatrix::combine(double a, const CsrMatrix &other, double b) const
{
  NOPC_REQUIRE(other.n_ == n_ && other.col_idx_ == col_idx_, "sparsity patterns differ");
  CsrMatrix c = *this;
  for (std::size_t k = 0; k < values_.size(); ++k)
  {
    c.values_[k] = a * values_[k] + b * other.values_[k];
  }
  return c;
}

double CsrMatrix::max_abs() const
{
  double m = 0.0;
  for (double v : values_)
  {
    m = std::max(m, std::abs(v));
  }
  return m;
}

double CsrMatrix::asymmetry() const
{
  double m = 0.0;
  for (std::size_t i = 0; i < n_; ++i)
  {
    for (auto k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
    {
      m = std::max(m, std::abs(values_[k] - (*this)(col_idx_[k], i)));
    }
  }
  return m;
}

void CsrMatrix::set_zero()
{
  std::fill(values_.begin(), values_.end(), 0.0);
}

}  // namespace nopc
