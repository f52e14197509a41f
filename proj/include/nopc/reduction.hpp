// SPDX-License-Identifier: Apache-2.0

#ifndef NOPC_REDUCTION_HPP
#define NOPC_REDUCTION_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "nopc/dense.hpp"
#include "nopc/mesh.hpp"

namespace nopc
{

// Training pairs stored as columns: m_data is q_m x N, u_data is q_u x N.
struct DataSet
{
  Matrix m_data;
  Matrix u_data;
  std::vector<double> m_mean;
  std::vector<double> u_mean;
  ProblemId problem = ProblemId::Source;
  std::uint64_t seed = 0;

  std::size_t size() const { return m_data.cols(); }
};

// Builds a data set and fills the column means.
DataSet make_dataset(Matrix m_data, Matrix u_data, ProblemId problem, std::uint64_t seed);
// Columns `indices` in that order, with means recomputed for the subset.
DataSet subset(const DataSet &data, std::span<const std::size_t> indices);

std::vector<double> column_mean(const Matrix &a);
// a with `mean` subtracted from every column
Matrix center(const Matrix &a, std::span<const double> mean);

struct SvdResult
{
  // Left singular vectors for the numerically nonzero singular values (q x rank).
  Matrix u;
  // Matching right singular vectors (N x rank).
  Matrix v;
  // All min(q, N) singular values, nonincreasing.
  std::vector<double> singular_values;

  std::size_t rank() const { return u.cols(); }
};

// Thin SVD through the symmetric eigenproblem of A^T A (or A A^T when q < N). Singular
// values below rank_rtol * sigma_1 are reported but get no vectors. The largest-magnitude
// entry of every left vector is positive.
SvdResult compute_svd(const Matrix &a, double rank_rtol = 1e-6);

struct Projector
{
  Matrix basis;  // q x r, orthonormal columns
  std::vector<double> mean;
  std::vector<double> singular_values;

  std::size_t dim() const { return basis.rows(); }
  std::size_t rank() const { return basis.cols(); }
};

Projector truncate(const SvdResult &svd, std::vector<double> mean, std::size_t r);
// SVD of the centered data followed by truncation to r.
Projector build_projector(const Matrix &data, std::size_t r);

// basis^T (x - mean)
std::vector<double> encode(const Projector &p, std::span<const double> x);
// basis c + mean
std::vector<double> decode(const Projector &p, std::span<const double> c);

// (1/N) || A - U_r U_r^T A ||_F^2 for A = data centered with p.mean.
double reconstruction_error(const Projector &p, const Matrix &data);

// sigma_j / sigma_1 (all zeros for the zero spectrum)
std::vector<double> normalized_spectrum(std::span<const double> singular_values);
// Index (0-based) of the normalized singular value closest to `level`.
std::size_t index_nearest(std::span<const double> normalized, double level);

// max |B^T B - I|
double orthonormality_defect(const Matrix &b);

}  // namespace nopc

#endif  // NOPC_REDUCTION_HPP
