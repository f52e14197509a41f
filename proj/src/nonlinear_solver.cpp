// SPDX-License-Identifier: Apache-2.0

#include "nopc/nonlinear_solver.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "nopc/error.hpp"
#include "nopc/kernels.hpp"
#include "nopc/text_format.hpp"

namespace nopc
{

namespace
{

std::vector<double> solve_dense(const CsrMatrix &a, std::span<const double> b)
{
  const auto n = static_cast<Eigen::Index>(a.size());
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(n, n);
  const auto rp = a.row_ptr();
  const auto ci = a.col_idx();
  const auto v = a.values();
  for (Eigen::Index i = 0; i < n; ++i)
  {
    for (auto k = rp[i]; k < rp[i + 1]; ++k)
    {
      dense(i, ci[k]) = v[k];
    }
  }
  Eigen::LDLT<Eigen::MatrixXd> ldlt(dense);
  if (ldlt.info() != Eigen::Success)
  {
    throw NumericalError("dense LDLT factorization failed");
  }
  Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(b.data(), n);
  Eigen::VectorXd x = ldlt.solve(rhs);
  return {x.data(), x.data() + n};
}

std::vector<double> solve_cg(const CsrMatrix &a, std::span<const double> b,
                             const LinearSolveConfig &cfg, LinearSolveStats &stats)
{
  const std::size_t n = a.size();
  const std::size_t max_iter = cfg.max_iter > 0 ? cfg.max_iter : 10 * n;
  std::vector<double> x(n, 0.0);
  const double bnorm = kernels::norm2(b);
  if (bnorm == 0.0)
  {
    stats = {0, 0.0};
    return x;
  }
  auto diag = a.diagonal();
  for (double &d : diag)
  {
    if (!(d > 0.0))
    {
      throw NumericalError("CG: non-positive diagonal entry; matrix is not SPD");
    }
    d = 1.0 / d;
  }
  std::vector<double> r(b.begin(), b.end());
  std::vector<double> z(n), p(n), ap(n);
  for (std::size_t i = 0; i < n; ++i)
  {
    z[i] = diag[i] * r[i];
  }
  p = z;
  double rz = kernels::dot(r, z);
  const double target = std::max(cfg.rel_tol * bnorm, cfg.abs_tol);
  for (std::size_t it = 1; it <= max_iter; ++it)
  {
    kernels::spmv(a, p, ap);
    const double pap = kernels::dot(p, ap);
    if (!(pap > 0.0))
    {
      throw NumericalError("CG: matrix is not positive definite");
    }
    const double alpha = rz / pap;
    kernels::axpy(alpha, p, x);
    kernels::axpy(-alpha, ap, r);
    const double rnorm = kernels::norm2(r);
    if (!std::isfinite(rnorm))
    {
      throw NumericalError("CG: non-finite residual");
    }
    if (rnorm <= target)
    {
      // Confirm against the true residual; the recurrence can drift.
      kernels::spmv(a, x, ap);
      double true_res = 0.0;
      for (std::size_t i = 0; i < n; ++i)
      {
        const double d = b[i] - ap[i];
        true_res += d * d;
      }
      true_res = std::sqrt(true_res);
      if (true_res <= target)
      {
        stats = {it, true_res / bnorm};
        return x;
      }
      for (std::size_t i = 0; i < n; ++i)
      {
        r[i] = b[i] - ap[i];
      }
    }
    for (std::size_t i = 0; i < n; ++i)
    {
      z[i] = diag[i] * r[i];
    }
    const double rz_new = kernels::dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i)
    {
      p[i] = z[i] + beta * p[i];
    }
  }
  throw NumericalError("CG did not converge in " + std::to_string(max_iter) + " iterations");
}

}  // namespace

std::vector<double> solve_linear(const CsrMatrix &a, std::span<const double> b,
                                 const LinearSolveConfig &cfg, LinearSolveStats *stats)
{
  NOPC_REQUIRE(b.size() == a.size(), "rhs length mismatch");
  NOPC_REQUIRE(cfg.rel_tol > 0.0 && cfg.rel_tol < 1.0, "rel_tol must be in (0, 1)");
  NOPC_REQUIRE(cfg.abs_tol >= 0.0, "abs_tol must be nonnegative");
  for (double v : a.values())
  {
    if (!std::isfinite(v))
    {
      throw NumericalError("matrix has non-finite entries");
    }
  }
  for (double v : b)
  {
    if (!std::isfinite(v))
    {
      throw NumericalError("rhs has non-finite entries");
    }
  }
  LinearSolveStats local;
  std::vector<double> x;
  if (cfg.method == LinearMethod::DenseLdlt)
  {
    NOPC_REQUIRE(a.size() <= dense_fallback_limit, "system too large for the dense fallback");
    x = solve_dense(a, b);
    const auto ax = a.multiply(x);
    double res = 0.0;
    for (std::size_t i = 0; i < ax.size(); ++i)
    {
      res += (b[i] - ax[i]) * (b[i] - ax[i]);
    }
    const double bnorm = kernels::norm2(b);
    local = {1, bnorm > 0.0 ? std::sqrt(res) / bnorm : 0.0};
    if (std::sqrt(res) > std::max(cfg.rel_tol * bnorm, cfg.abs_tol))
    {
      throw NumericalError("dense solve missed the residual tolerance");
    }
  }
  else
  {
    x = solve_cg(a, b, cfg, local);
  }
  if (stats)
  {
    *stats = local;
  }
  return x;
}

std::vector<double> linearized_update(const ProblemDef &problem, const Field &m, const Field &u,
                                      const LinearSolveConfig &cfg)
{
  auto rhs = assemble_residual(problem, m, u);
  for (double &v : rhs)
  {
    v = -v;
  }
  auto jac = assemble_jacobian_unconstrained(problem, m, u);
  const auto dofs = u.space->dirichlet_dofs();
  std::vector<double> values(dofs.size());
  for (std::size_t k = 0; k < dofs.size(); ++k)
  {
    values[k] = -u.values[dofs[k]];
  }
  apply_dirichlet(jac, rhs, dofs, values);
  auto e = solve_linear(jac, rhs, cfg);
  for (std::size_t k = 0; k < dofs.size(); ++k)
  {
    e[dofs[k]] = values[k];
  }
  return e;
}

namespace
{

// Free-dof residual norm combined with the violation of the Dirichlet values, which the
// residual reports at the constrained dofs.
double merit(const FunctionSpace &space, const std::vector<double> &residual)
{
  const double free = free_norm(space, residual);
  double violation = 0.0;
  for (auto d : space.dirichlet_dofs())
  {
    const double r = residual[static_cast<std::size_t>(d)];
    violation += r * r;
  }
  return violation == 0.0 ? free : std::hypot(free, std::sqrt(violation));
}

}  // namespace

NewtonResult newton_solve(const ProblemDef &problem, const Field &m, const Field &u0,
                          const NewtonConfig &cfg)
{
  NOPC_REQUIRE(cfg.residual_tol > 0.0, "residual tolerance must be positive");
  NOPC_REQUIRE(cfg.backtrack_factor > 0.0 && cfg.backtrack_factor < 1.0,
               "backtrack factor must be in (0, 1)");
  NewtonResult result{u0, {}, {}, {}};
  const auto &space = *u0.space;
  double rnorm = merit(space, assemble_residual(problem, m, result.u));
  result.residual_norms.push_back(rnorm);

  for (std::size_t it = 0; it < cfg.max_iter; ++it)
  {
    if (rnorm <= cfg.residual_tol)
    {
      return result;
    }
    const auto step = linearized_update(problem, m, result.u, cfg.linear);
    double t = 1.0;
    Field trial = result.u;
    double trial_norm = 0.0;
    for (std::size_t h = 0;; ++h)
    {
      for (std::size_t i = 0; i < step.size(); ++i)
      {
        // constrained dofs always take the full step
        const double s = space.is_dirichlet(i) ? 1.0 : t;
        trial.values[i] = result.u.values[i] + s * step[i];
      }
      trial_norm = merit(space, assemble_residual(problem, m, trial));
      if (!cfg.line_search || trial_norm < rnorm)
      {
        break;
      }
      if (h >= cfg.max_halvings)
      {
        throw NumericalError("Newton line search failed at iteration " + std::to_string(it) +
                             " (residual " + format_double(rnorm) + ")");
      }
      t *= cfg.backtrack_factor;
    }
    if (!std::isfinite(trial_norm))
    {
      throw NumericalError("Newton produced a non-finite residual");
    }
    result.u = std::move(trial);
    if (cfg.keep_iterates)
    {
      result.iterates.push_back(result.u);
    }
    rnorm = trial_norm;
    result.residual_norms.push_back(rnorm);
    result.step_lengths.push_back(t);
  }
  if (rnorm <= cfg.residual_tol)
  {
    return result;
  }
  throw NumericalError("Newton did not converge in " + std::to_string(cfg.max_iter) +
                       " iterations (residual " + format_double(rnorm) + ")");
}

std::string newton_stats_csv(const NewtonResult &result)
{
  std::string out = "iter,residual\n";
  for (std::size_t k = 0; k < result.residual_norms.size(); ++k)
  {
    out += std::to_string(k) + ",";
    append_double(out, result.residual_norms[k]);
    out += "\n";
  }
  return out;
}

}  // namespace nopc
