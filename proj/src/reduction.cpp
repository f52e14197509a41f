// SPDX-License-Identifier: Apache-2.0

#include "nopc/reduction.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "nopc/error.hpp"
#include "nopc/kernels.hpp"

namespace nopc
{

namespace
{

void check_finite(const Matrix &a)
{
  for (double v : a.data())
  {
    if (!std::isfinite(v))
    {
      throw NumericalError("matrix has non-finite entries");
    }
  }
}

// Modified Gram-Schmidt, applied twice.
void reorthonormalize(Matrix &q)
{
  for (int pass = 0; pass < 2; ++pass)
  {
    for (std::size_t j = 0; j < q.cols(); ++j)
    {
      auto cj = q.col(j);
      for (std::size_t k = 0; k < j; ++k)
      {
        const double d = kernels::dot(q.col(k), cj);
        kernels::axpy(-d, q.col(k), cj);
      }
      const double n = kernels::norm2(cj);
      if (!(n > 0.0))
      {
        throw NumericalError("basis vector collapsed during orthonormalization");
      }
      for (double &v : cj)
      {
        v /= n;
      }
    }
  }
}

// sigma_j and vectors of the Gram matrix g, largest first.
void gram_eigen(const Matrix &g, std::vector<double> &values, Matrix &vectors)
{
  const auto n = static_cast<Eigen::Index>(g.rows());
  Eigen::Map<const Eigen::MatrixXd> gm(g.data().data(), n, n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gm);
  if (eig.info() != Eigen::Success)
  {
    throw NumericalError("symmetric eigensolver failed");
  }
  values.resize(g.rows());
  vectors = Matrix(g.rows(), g.rows());
  for (Eigen::Index k = 0; k < n; ++k)
  {
    const Eigen::Index src = n - 1 - k;
    values[k] = std::sqrt(std::max(0.0, eig.eigenvalues()(src)));
    for (Eigen::Index i = 0; i < n; ++i)
    {
      vectors(i, k) = eig.eigenvectors()(i, src);
    }
  }
}

}  // namespace

std::vector<double> column_mean(const Matrix &a)
{
  std::vector<double> mean(a.rows(), 0.0);
  if (a.cols() == 0)
  {
    return mean;
  }
  for (std::size_t j = 0; j < a.cols(); ++j)
  {
    const auto c = a.col(j);
    for (std::size_t i = 0; i < a.rows(); ++i)
    {
      mean[i] += c[i];
    }
  }
  for (double &v : mean)
  {
    v /= static_cast<double>(a.cols());
  }
  return mean;
}

Matrix center(const Matrix &a, std::span<const double> mean)
{
  NOPC_REQUIRE(mean.size() == a.rows(), "mean length does not match the data");
  Matrix c = a;
  for (std::size_t j = 0; j < c.cols(); ++j)
  {
    auto col = c.col(j);
    for (std::size_t i = 0; i < c.rows(); ++i)
    {
      col[i] -= mean[i];
    }
  }
  return c;
}

DataSet make_dataset(Matrix m_data, Matrix u_data, ProblemId problem, std::uint64_t seed)
{
  NOPC_REQUIRE(m_data.cols() == u_data.cols(), "input and output sample counts differ");
  DataSet d;
  d.m_mean = column_mean(m_data);
  d.u_mean = column_mean(u_data);
  d.m_data = std::move(m_data);
  d.u_data = std::move(u_data);
  d.problem = problem;
  d.seed = seed;
  return d;
}

DataSet subset(const DataSet &data, std::span<const std::size_t> indices)
{
  Matrix m(data.m_data.rows(), indices.size());
  Matrix u(data.u_data.rows(), indices.size());
  for (std::size_t k = 0; k < indices.size(); ++k)
  {
    NOPC_REQUIRE(indices[k] < data.size(), "sample index out of range");
    std::ranges::copy(data.m_data.col(indices[k]), m.col(k).begin());
    std::ranges::copy(data.u_data.col(indices[k]), u.col(k).begin());
  }
  return make_dataset(std::move(m), std::move(u), data.problem, data.seed);
}

SvdResult compute_svd(const Matrix &a, double rank_rtol)
{
  NOPC_REQUIRE(rank_rtol > 0.0 && rank_rtol < 1.0, "rank tolerance must be in (0, 1)");
  check_finite(a);
  const std::size_t q = a.rows(), n = a.cols();
  SvdResult out;
  if (q == 0 || n == 0)
  {
    out.u = Matrix(q, 0);
    out.v = Matrix(n, 0);
    return out;
  }
  const bool tall = n <= q;
  std::vector<double> sigma;
  Matrix vecs;
  gram_eigen(tall ? kernels::gram(a) : kernels::outer_gram(a), sigma, vecs);
  out.singular_values = sigma;

  std::size_t rank = 0;
  while (rank < sigma.size() && sigma[rank] > 0.0 && sigma[rank] >= rank_rtol * sigma[0])
  {
    ++rank;
  }
  // Eigenvectors give one side exactly; the other follows as A v / sigma or A^T u / sigma.
  Matrix left(q, rank), right(n, rank);
  for (std::size_t k = 0; k < rank; ++k)
  {
    const auto known = vecs.col(k);
    if (tall)
    {
      std::ranges::copy(known.subspan(0, n), right.col(k).begin());
      const auto av = multiply(a, right.col(k));
      for (std::size_t i = 0; i < q; ++i)
      {
        left(i, k) = av[i] / sigma[k];
      }
    }
    else
    {
      std::ranges::copy(known.subspan(0, q), left.col(k).begin());
      const auto atu = multiply_transposed(a, left.col(k));
      for (std::size_t i = 0; i < n; ++i)
      {
        right(i, k) = atu[i] / sigma[k];
      }
    }
  }
  reorthonormalize(left);
  reorthonormalize(right);

  for (std::size_t k = 0; k < rank; ++k)
  {
    const auto c = left.col(k);
    std::size_t imax = 0;
    for (std::size_t i = 1; i < q; ++i)
    {
      if (std::abs(c[i]) > std::abs(c[imax]))
      {
        imax = i;
      }
    }
    if (c[imax] < 0.0)
    {
      for (double &v : left.col(k))
      {
        v = -v;
      }
      for (double &v : right.col(k))
      {
        v = -v;
      }
    }
  }
  out.u = std::move(left);
  out.v = std::move(right);
  return out;
}

Projector truncate(const SvdResult &svd, std::vector<double> mean, std::size_t r)
{
  NOPC_REQUIRE(r >= 1 && r <= svd.rank(), "truncation rank out of range");
  NOPC_REQUIRE(mean.size() == svd.u.rows(), "mean length does not match the basis");
  Projector p;
  p.basis = Matrix(svd.u.rows(), r);
  for (std::size_t k = 0; k < r; ++k)
  {
    std::ranges::copy(svd.u.col(k), p.basis.col(k).begin());
  }
  p.mean = std::move(mean);
  p.singular_values = svd.singular_values;
  return p;
}

Projector build_projector(const Matrix &data, std::size_t r)
{
  auto mean = column_mean(data);
  const auto svd = compute_svd(center(data, mean));
  return truncate(svd, std::move(mean), r);
}

std::vector<double> encode(const Projector &p, std::span<const double> x)
{
  NOPC_REQUIRE(x.size() == p.dim(), "vector length does not match the projector");
  std::vector<double> d(x.begin(), x.end());
  for (std::size_t i = 0; i < d.size(); ++i)
  {
    d[i] -= p.mean[i];
  }
  return multiply_transposed(p.basis, d);
}

std::vector<double> decode(const Projector &p, std::span<const double> c)
{
  NOPC_REQUIRE(c.size() == p.rank(), "coefficient length does not match the projector");
  auto x = multiply(p.basis, c);
  for (std::size_t i = 0; i < x.size(); ++i)
  {
    x[i] += p.mean[i];
  }
  return x;
}

double reconstruction_error(const Projector &p, const Matrix &data)
{
  NOPC_REQUIRE(data.rows() == p.dim(), "data does not match the projector");
  NOPC_REQUIRE(data.cols() > 0, "empty data");
  const Matrix a = center(data, p.mean);
  const Matrix coeffs = multiply_transposed(p.basis, a);
  const Matrix approx = multiply(p.basis, coeffs);
  double s = 0.0;
  for (std::size_t k = 0; k < a.data().size(); ++k)
  {
    const double d = a.data()[k] - approx.data()[k];
    s += d * d;
  }
  return s / static_cast<double>(data.cols());
}

std::vector<double> normalized_spectrum(std::span<const double> singular_values)
{
  std::vector<double> out(singular_values.begin(), singular_values.end());
  if (out.empty() || out[0] == 0.0)
  {
    std::ranges::fill(out, 0.0);
    return out;
  }
  const double s1 = out[0];
  for (double &v : out)
  {
    v /= s1;
  }
  return out;
}

std::size_t index_nearest(std::span<const double> normalized, double level)
{
  NOPC_REQUIRE(!normalized.empty(), "empty spectrum");
  std::size_t best = 0;
  for (std::size_t j = 1; j < normalized.size(); ++j)
  {
    if (std::abs(normalized[j] - level) < std::abs(normalized[best] - level))
    {
      best = j;
    }
  }
  return best;
}

double orthonormality_defect(const Matrix &b)
{
  const Matrix g = multiply_transposed(b, b);
  double d = 0.0;
  for (std::size_t j = 0; j < g.cols(); ++j)
  {
    for (std::size_t i = 0; i < g.rows(); ++i)
    {
      d = std::max(d, std::abs(g(i, j) - (i == j ? 1.0 : 0.0)));
    }
  }
  return d;
}

}  // namespace nopc
