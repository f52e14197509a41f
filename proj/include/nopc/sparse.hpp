// SPDX-License-Identifier: Apache-2.0

#ifndef NOPC_SPARSE_HPP
#define NOPC_SPARSE_HPP

#include <cstdint>
#include <span>
#include <vector>

namespace nopc
{

// Square matrix in compressed-sparse-row storage. Column indices within a row are
// sorted and unique. The sparsity pattern is fixed at construction.
class CsrMatrix
{
public:
  CsrMatrix() = default;
  CsrMatrix(std::size_t n, std::vector<std::int64_t> row_ptr, std::vector<std::int32_t> col_idx);

  // Pattern from element connectivity: entry (i, j) exists iff i and j share an element.
  static CsrMatrix from_connectivity(std::size_t n, std::span<const std::int32_t> connectivity,
                                     std::size_t nodes_per_element);
  static CsrMatrix identity(std::size_t n);

  std::size_t size() const { return n_; }
  std::size_t nnz() const { return col_idx_.size(); }

  std::span<const std::int64_t> row_ptr() const { return row_ptr_; }
  std::span<const std::int32_t> col_idx() const { return col_idx_; }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  // Position of (i, j) in values(), or -1 if not in the pattern.
  std::int64_t find(std::size_t i, std::size_t j) const;
  double operator()(std::size_t i, std::size_t j) const;
  void add(std::size_t i, std::size_t j, double v);

  std::vector<double> diagonal() const;
  std::vector<double> multiply(std::span<const double> x) const;

  // Zero the rows and columns of `dofs` and put 1 on their diagonal.
  void eliminate(std::span<const std::int32_t> dofs);

  // Linear combination a*this + b*other; patterns must match.
  CsrMatrix combine(double a, const CsrMatrix &other, double b) const;

  double max_abs() const;
  // max |A_ij - A_ji| over the pattern
  double asymmetry() const;

  void set_zero();

private:
  std::size_t n_ = 0;
  std::vector<std::int64_t> row_ptr_;
  std::vector<std::int32_t> col_idx_;
  std::vector<double> values_;
};

}  // namespace nopc

#endif  // NOPC_SPARSE_HPP
