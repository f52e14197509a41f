// SPDX-License-Identifier: Apache-2.0

#ifndef NOPC_KERNELS_HPP
#define NOPC_KERNELS_HPP

#include <cstddef>
#include <span>

#include "nopc/dense.hpp"
#include "nopc/sparse.hpp"

// Data-parallel kernels used on the hot paths. Each has a plain serial counterpart in
// nopc::serial, kept as the reference the tests and benchmarks compare against.
//
// Reductions are split into fixed-size chunks whose partial sums are added in chunk
// order, so the parallel results do not depend on the thread count.

namespace nopc::kernels
{

inline constexpr std::size_t reduction_chunk = 2048;

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

// y <- a*x + y
void axpy(double a, std::span<const double> x, std::span<double> y);

// y <- A x
void spmv(const CsrMatrix &a, std::span<const double> x, std::span<double> y);

// G = A^T A. Every entry is a sequential dot product, so G is bit-identical to
// serial::gram.
Matrix gram(const Matrix &a);
// G = A A^T
Matrix outer_gram(const Matrix &a);

int max_threads();

}  // namespace nopc::kernels

namespace nopc::serial
{

double dot(std::span<const double> a, std::span<const double> b);
void axpy(double a, std::span<const double> x, std::span<double> y);
void spmv(const CsrMatrix &a, std::span<const double> x, std::span<double> y);
Matrix gram(const Matrix &a);
Matrix outer_gram(const Matrix &a);

}  // namespace nopc::serial

#endif  // NOPC_KERNELS_HPP
